#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hurwitz/cover0.hpp"
#include "hurwitz/cover1.hpp"

// Covering-spec files: JSON with every complex number written as [re, im].

namespace hurwitz::cli {

using Json = nlohmann::ordered_json;

/// Parse or shape error; the message carries line:column or the JSON path of the offending node.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CoveringSpec {
    int genus = 0;
    std::vector<int> profile;
    cover0::Covering0 g0;  // genus 0
    cover1::Covering1 g1;  // genus 1

    /// Dot paths of the complex parameters: poly_coeffs.r, poles.i.b, poles.i.c.a, and modulus, constant.
    std::vector<std::string> parameter_paths() const;
    Complex get(const std::string& path) const;
    void set(const std::string& path, Complex value);
};

bool operator==(const CoveringSpec& a, const CoveringSpec& b);

/// Throws SpecError on malformed input and hurwitz::Error from validation (OnBoundary, InvalidInput).
CoveringSpec parse_spec(std::string_view text);
CoveringSpec load_spec(const std::string& path);
Json to_json(const CoveringSpec& spec);

Json complex_json(Complex z);
Json complex_json(const std::vector<Complex>& v);

/// Built-in examples: a2, h0_surf, h12. Throws SpecError for other names.
CoveringSpec example(const std::string& name);

}  // namespace hurwitz::cli
