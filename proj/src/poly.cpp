#include "hurwitz/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "hurwitz/errors.hpp"

namespace hurwitz::poly {

CPoly::CPoly(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

CPoly::CPoly(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) { trim(); }

CPoly CPoly::constant(Complex c) { return CPoly({c}); }

CPoly CPoly::monomial(Complex c, int degree) {
    std::vector<Complex> v(static_cast<std::size_t>(degree) + 1);
    v.back() = c;
    return CPoly(std::move(v));
}

CPoly CPoly::from_roots(std::span<const Complex> roots, Complex lc) {
    std::vector<Complex> v{lc};
    for (const Complex r : roots) {
        v.push_back(0.0);
        for (std::size_t i = v.size() - 1; i > 0; --i) v[i] = v[i - 1] - r * v[i];
        v[0] *= -r;
    }
    return CPoly(std::move(v));
}

void CPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

double CPoly::max_abs_coeff() const noexcept {
    double m = 0.0;
    for (const Complex c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Complex CPoly::operator()(Complex z) const noexcept {
    Complex acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

CPoly CPoly::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<Complex> v(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) v[i - 1] = static_cast<double>(i) * coeffs_[i];
    return CPoly(std::move(v));
}

CPoly CPoly::pow(int n) const {
    CPoly result = constant(1.0);
    for (int i = 0; i < n; ++i) result = result * *this;
    return result;
}

CPoly operator+(const CPoly& a, const CPoly& b) {
    std::vector<Complex> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
    return CPoly(std::move(v));
}

CPoly operator-(const CPoly& a, const CPoly& b) { return a + Complex{-1.0} * b; }

CPoly operator*(const CPoly& a, const CPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Complex> v(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return CPoly(std::move(v));
}

CPoly operator*(Complex s, const CPoly& a) {
    std::vector<Complex> v = a.coeffs_;
    for (Complex& c : v) c *= s;
    return CPoly(std::move(v));
}

std::vector<Complex> eval_derivatives(const CPoly& p, Complex z, int n) {
    // Taylor coefficients at z by repeated synthetic division, scaled by k! at the end.
    std::vector<Complex> out(static_cast<std::size_t>(n) + 1);
    std::vector<Complex> c = p.coeffs();
    const int deg = static_cast<int>(c.size()) - 1;
    for (int k = 0; k <= n && k <= deg; ++k) {
        for (int i = deg - 1; i >= k; --i) c[i] += z * c[i + 1];
        out[k] = c[k];
    }
    double fact = 1.0;
    for (int k = 1; k <= n; ++k) {
        fact *= k;
        out[k] *= fact;
    }
    return out;
}

namespace {

// Fujiwara bound on root moduli.
double root_radius(const CPoly& p) {
    const int n = p.degree();
    const double lc = std::abs(p.leading());
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ratio = std::abs(p[i]) / lc;
        if (ratio == 0.0) continue;
        const double scale = (i == 0) ? 0.5 : 1.0;
        r = std::max(r, std::pow(ratio * scale, 1.0 / (n - i)));
    }
    return r > 0.0 ? r : 1.0;
}

}  // namespace

RootSet all_roots(const CPoly& p, const RootOptions& options) {
    const int n = p.degree();
    if (p.is_zero() || n < 1) throw Error(ErrorKind::InvalidInput, "all_roots needs degree >= 1");

    const CPoly dp = p.derivative();
    std::vector<Complex> z(n);
    {
        // Start on a circle of roughly the mean root modulus, centred on the root centroid.
        const Complex centre = -p[n - 1] / (static_cast<double>(n) * p.leading());
        const double radius = 0.5 * root_radius(p) + 0.1;
        for (int k = 0; k < n; ++k)
            z[k] = centre + std::polar(radius, 2.0 * kPi * k / n + 0.4);
    }

    bool converged = false;
    for (int it = 0; it < options.max_aberth_iterations && !converged; ++it) {
        converged = true;
        for (int k = 0; k < n; ++k) {
            const Complex pv = p(z[k]);
            if (pv == Complex{}) continue;
            const Complex ratio = pv / dp(z[k]);
            Complex repulsion{};
            for (int j = 0; j < n; ++j)
                if (j != k) repulsion += 1.0 / (z[k] - z[j]);
            const Complex step = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
            z[k] -= step;
            if (std::abs(step) > 1e-14 * (1.0 + std::abs(z[k]))) converged = false;
        }
    }

    const double scale = p.max_abs_coeff();
    RootSet out;
    out.roots.reserve(n);
    for (Complex r : z) {
        Complex best = r;
        double best_val = std::abs(p(r));
        for (int it = 0; it < options.max_newton_iterations; ++it) {
            if (best_val < options.polish_tolerance * scale) break;
            const Complex d = dp(r);
            if (d == Complex{}) break;
            r -= p(r) / d;
            const double v = std::abs(p(r));
            if (!std::isfinite(v)) break;
            if (v < best_val) {
                best = r;
                best_val = v;
            }
        }
        out.roots.push_back(best);
        out.residual = std::max(out.residual, best_val);
    }
    if (out.residual > options.accept_tolerance * scale) {
        std::ostringstream msg;
        msg << "root residual " << out.residual << " for degree " << n;
        throw Error(ErrorKind::NonConvergence, msg.str());
    }
    return out;
}

Complex resultant(const CPoly& f, const CPoly& g) {
    if (f.is_zero() || g.is_zero()) throw Error(ErrorKind::InvalidInput, "resultant of the zero polynomial");
    const int m = f.degree();
    const int n = g.degree();
    if (m == 0) return ipow(f[0], n);
    if (n == 0) return ipow(g[0], m);

    const int size = m + n;
    std::vector<Complex> a(static_cast<std::size_t>(size) * size);
    auto at = [&](int r, int c) -> Complex& { return a[static_cast<std::size_t>(r) * size + c]; };
    for (int r = 0; r < n; ++r)
        for (int i = 0; i <= m; ++i) at(r, r + i) = f[m - i];
    for (int r = 0; r < m; ++r)
        for (int i = 0; i <= n; ++i) at(n + r, r + i) = g[n - i];

    Complex det{1.0, 0.0};
    for (int col = 0; col < size; ++col) {
        int pivot = col;
        for (int r = col + 1; r < size; ++r)
            if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
        if (at(pivot, col) == Complex{}) return {};
        if (pivot != col) {
            for (int c = 0; c < size; ++c) std::swap(at(pivot, c), at(col, c));
            det = -det;
        }
        const Complex d = at(col, col);
        det *= d;
        for (int r = col + 1; r < size; ++r) {
            const Complex factor = at(r, col) / d;
            if (factor == Complex{}) continue;
            for (int c = col; c < size; ++c) at(r, c) -= factor * at(col, c);
        }
    }
    return det;
}

}  // namespace hurwitz::poly
