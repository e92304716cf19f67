#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "analysis.hpp"

// Command bodies behind the executable; each returns the process exit code.

namespace hurwitz::cli {

int cmd_analyze(const std::string& file, bool json, bool strict, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& file, const CheckOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& file, const SweepOptions& options, bool json, std::ostream& out, std::ostream& err);
int cmd_example(const std::string& name, const std::optional<std::string>& path, std::ostream& out, std::ostream& err);

/// "RE,IM" -> complex. Throws SpecError.
Complex parse_complex_arg(const std::string& text);

}  // namespace hurwitz::cli
