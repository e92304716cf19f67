#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "hurwitz/complex.hpp"

namespace hurwitz::poly {

/// Dense complex polynomial, coefficients lowest degree first.
/// Trailing exact zeros are trimmed on construction; the zero polynomial has no coefficients.
class CPoly {
public:
    CPoly() = default;
    explicit CPoly(std::vector<Complex> coeffs);
    CPoly(std::initializer_list<Complex> coeffs);

    static CPoly constant(Complex c);
    static CPoly monomial(Complex c, int degree);
    /// lc * prod (z - r_i)
    static CPoly from_roots(std::span<const Complex> roots, Complex lc = 1.0);

    bool is_zero() const noexcept { return coeffs_.empty(); }
    /// Degree; 0 for the zero polynomial.
    int degree() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
    Complex leading() const noexcept { return coeffs_.empty() ? Complex{} : coeffs_.back(); }
    Complex operator[](int i) const noexcept {
        return i >= 0 && i < static_cast<int>(coeffs_.size()) ? coeffs_[i] : Complex{};
    }
    const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
    double max_abs_coeff() const noexcept;

    Complex operator()(Complex z) const noexcept;
    CPoly derivative() const;
    CPoly pow(int n) const;

    friend CPoly operator+(const CPoly& a, const CPoly& b);
    friend CPoly operator-(const CPoly& a, const CPoly& b);
    friend CPoly operator*(const CPoly& a, const CPoly& b);
    friend CPoly operator*(Complex s, const CPoly& a);

private:
    void trim();
    std::vector<Complex> coeffs_;
};

/// (p(z), p'(z), ..., p^(n)(z)) by Horner's scheme carried to n derivatives.
std::vector<Complex> eval_derivatives(const CPoly& p, Complex z, int n);

struct RootSet {
    std::vector<Complex> roots;
    double residual = 0.0;  // max |p(root)|
};

struct RootOptions {
    int max_aberth_iterations = 500;
    int max_newton_iterations = 50;
    /// Polishing stops once |p(r)| < polish_tolerance * max|coeff|.
    double polish_tolerance = 1e-13;
    /// Acceptable final residual relative to max|coeff|; NonConvergence above it.
    double accept_tolerance = 1e-8;
};

/// All roots with multiplicity (Aberth-Ehrlich iteration, then Newton polish on each root).
/// Throws Error(NonConvergence) if the iteration stalls.
RootSet all_roots(const CPoly& p, const RootOptions& options = {});

/// Sylvester determinant res(f, g), evaluated by Gaussian elimination with partial pivoting.
Complex resultant(const CPoly& f, const CPoly& g);

}  // namespace hurwitz::poly
