#pragma once

#include <algorithm>
#include <functional>
#include <cmath>
#include <random>
#include <vector>

#include "hurwitz/complex.hpp"

namespace testing {

using hurwitz::Complex;

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    return {n(rng), n(rng)};
}

inline double rel_err(Complex a, Complex b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Every element of `got` matched to a distinct element of `want`; returns the worst distance.
inline double match_sets(std::vector<Complex> got, std::vector<Complex> want) {
    if (got.size() != want.size()) return INFINITY;
    double worst = 0.0;
    for (const Complex w : want) {
        auto it = std::min_element(got.begin(), got.end(),
                                   [&](Complex a, Complex b) { return std::abs(a - w) < std::abs(b - w); });
        worst = std::max(worst, std::abs(*it - w));
        got.erase(it);
    }
    return worst;
}

struct LocalInverse {
    Complex a1;          // dz/dx at x = 0
    Complex schwarzian;  // {z, x} at x = 0
};

/// Taylor coefficients of the local inverse z(x) of x^2 = p(z) - p(zm) near a critical point zm,
/// by Cauchy integrals over a circle |z - zm| = radius (x continued along the circle).
inline LocalInverse local_inverse(const std::function<Complex(Complex)>& p,
                                  const std::function<Complex(Complex)>& dp, Complex zm, double radius,
                                  int samples = 128) {
    const Complex lam = p(zm);
    Complex a[4] = {};
    Complex prev_ratio{};
    for (int j = 0; j < samples; ++j) {
        const Complex u = std::polar(1.0, 2.0 * M_PI * j / samples);
        const Complex z = zm + radius * u;
        // x = (z - zm) * sqrt((p - lam)/(z - zm)^2), the square root continued around the circle
        const Complex w = (p(z) - lam) / ((z - zm) * (z - zm));
        Complex r = std::sqrt(w);
        if (j > 0 && std::abs(r - prev_ratio) > std::abs(-r - prev_ratio)) r = -r;
        prev_ratio = r;
        const Complex x = (z - zm) * r;
        const Complex dx = dp(z) / (2.0 * x);
        const Complex dz = Complex(0.0, 1.0) * radius * u * (2.0 * M_PI / samples);
        for (int n = 1; n <= 3; ++n) a[n] += z * std::pow(x, -(n + 1)) * dx * dz;
    }
    for (auto& v : a) v /= Complex(0.0, 2.0 * M_PI);
    const Complex q2 = a[2] / a[1];
    return {a[1], 6.0 * a[3] / a[1] - 6.0 * q2 * q2};
}

}  // namespace testing
