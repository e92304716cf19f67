#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace hurwitz {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Principal k-th root, branch cut along the negative real axis.
inline Complex principal_root(Complex w, int k) {
    w = Complex(w.real(), w.imag() + 0.0);  // -0 imaginary parts would select the wrong side of the cut
    if (k == 1) return w;
    return std::polar(std::pow(std::abs(w), 1.0 / k), std::arg(w) / k);
}

/// Integer power by repeated squaring; negative exponents allowed.
inline Complex ipow(Complex w, long long n) {
    if (n < 0) return 1.0 / ipow(w, -n);
    Complex result{1.0, 0.0};
    while (n > 0) {
        if (n & 1) result *= w;
        w *= w;
        n >>= 1;
    }
    return result;
}

/// Of the two square roots of w, the one closest to `reference`.
inline Complex sqrt_near(Complex w, Complex reference) {
    const Complex r = std::sqrt(w);
    return std::abs(r - reference) <= std::abs(-r - reference) ? r : -r;
}

}  // namespace hurwitz
