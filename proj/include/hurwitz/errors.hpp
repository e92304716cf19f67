#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hurwitz {

enum class ErrorKind {
    NonConvergence,
    LatticePoint,
    ContourClash,
    CountMismatch,
    OnBoundary,
    CommonRoot,
    NearPole,
    Coincident,
    IllConditioned,
    StepUnderflow,
    SlopeUnstable,
    InvalidInput,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Streams all arguments into one string.
template <class... Args>
std::string str(const Args&... args) {
    std::ostringstream out;
    (out << ... << args);
    return out.str();
}

}  // namespace hurwitz
