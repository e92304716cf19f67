#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spec_file.hpp"

namespace hurwitz::cli {

enum ExitCode : int {
    kOk = 0,
    kFailed = 1,
    kParseError = 2,
    kBoundary = 3,
    kCaustic = 4,
    kSweepLeftSpace = 5,
};

/// Report of one covering. Every numeric leaf is {"value": ..., "status": "checked" | "unchecked" | "warned"};
/// complex numbers are [re, im]. Keys depend on the genus only.
Json analyze(const CoveringSpec& spec);

struct CheckOptions {
    double fd_step = 1e-5;
    double tol = 1e-6;
    std::uint64_t seed = 42;
};

struct CheckLine {
    std::string identity;
    double error = 0.0;
    double tol = 0.0;
    bool passed = false;
    std::string note;  // "n/a" when the identity has nothing to test on this covering
};

/// The identity suite; random sweep directions come from mt19937_64(seed).
std::vector<CheckLine> check(const CoveringSpec& spec, const CheckOptions& options);

struct SweepOptions {
    std::string param;
    Complex to;
    int steps = 20;
};

struct SweepStep {
    int step = 0;
    Complex value;          // the swept parameter
    Complex tau_ratio;      // route A / route B, as tau^{-48}
    std::optional<Complex> fg_ratio;  // genus 0 with poles
};

struct SweepResult {
    std::vector<SweepStep> steps;
    double tau_drift = 0.0;
    double fg_drift = 0.0;
    bool left_space = false;
    int offending_step = -1;
    std::string reason;
};

/// Straight segment from the current value of `param` to `to`. Stops at the first step (or segment between
/// steps) that meets S1, S2 or the caustic guard.
SweepResult sweep(const CoveringSpec& spec, const SweepOptions& options);

}  // namespace hurwitz::cli
