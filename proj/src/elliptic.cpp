#include "hurwitz/elliptic.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "hurwitz/errors.hpp"

namespace hurwitz::elliptic {

namespace {

constexpr double kSeriesTol = 1e-17;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// sum_{n>=1} n^k q^n / (1 - q^n)
Complex lambert_sum(const Modulus& m, int k) {
    const Complex q = m.q();
    Complex sum{};
    Complex qn = q;
    for (int n = 1; n <= m.series_cap(); ++n) {
        const Complex term = std::pow(static_cast<double>(n), k) * qn / (1.0 - qn);
        sum += term;
        if (std::abs(term) < kSeriesTol * std::max(1.0, std::abs(sum))) break;
        qn *= q;
    }
    return sum;
}

}  // namespace

int default_series_cap() {
    if (const char* env = std::getenv("HURWITZ_TRUNC")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(v);
    }
    return 400;
}

Modulus::Modulus(Complex sigma, int series_cap)
    : sigma_(sigma),
      q_(std::exp(2.0 * kPi * kI * sigma)),
      nome_(std::exp(kPi * kI * sigma)),
      cap_(series_cap) {
    if (!(sigma.imag() > kMinImaginaryPart)) {
        std::ostringstream msg;
        msg << "modulus needs Im sigma > " << kMinImaginaryPart << ", got " << sigma;
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
    if (cap_ < 1) throw Error(ErrorKind::InvalidInput, "series cap must be positive");
}

std::array<Complex, 4> theta1_jet(const Modulus& m, Complex z) {
    std::array<Complex, 4> sum{};
    const Complex i_pi_sigma = kI * kPi * m.sigma();
    const double growth = std::abs(z.imag());
    for (int n = 0; n < m.series_cap(); ++n) {
        const double half = n + 0.5;
        const double w = (2 * n + 1) * kPi;
        const Complex a = ((n % 2) ? -2.0 : 2.0) * std::exp(i_pi_sigma * half * half);
        const Complex s = std::sin(w * z);
        const Complex c = std::cos(w * z);
        sum[0] += a * s;
        sum[1] += a * w * c;
        sum[2] -= a * w * w * s;
        sum[3] -= a * w * w * w * c;
        const double bound = std::abs(a) * std::exp(w * growth) * std::max(1.0, w * w * w);
        double scale = 0.0;
        for (const Complex& v : sum) scale = std::max(scale, std::abs(v));
        if (n >= 1 && bound < kSeriesTol * scale) break;
    }
    return sum;
}

Complex theta1(const Modulus& m, Complex z, int n_deriv) {
    if (n_deriv < 0) throw Error(ErrorKind::InvalidInput, "negative derivative order");
    if (n_deriv <= 3) return theta1_jet(m, z)[n_deriv];
    Complex sum{};
    const Complex i_pi_sigma = kI * kPi * m.sigma();
    for (int n = 0; n < m.series_cap(); ++n) {
        const double half = n + 0.5;
        const double w = (2 * n + 1) * kPi;
        const Complex a = ((n % 2) ? -2.0 : 2.0) * std::exp(i_pi_sigma * half * half);
        const Complex term = a * std::pow(w, n_deriv) * std::sin(w * z + n_deriv * kPi / 2.0);
        sum += term;
        if (n >= 1 && std::abs(a) * std::exp(w * std::abs(z.imag())) * std::pow(w, n_deriv) <
                          kSeriesTol * std::abs(sum))
            break;
    }
    return sum;
}

Complex log_dedekind_eta(const Modulus& m) {
    Complex acc = kI * kPi * m.sigma() / 12.0;
    const Complex q = m.q();
    Complex qn = q;
    for (int n = 1; n <= m.series_cap(); ++n) {
        acc += std::log(1.0 - qn);
        if (std::abs(qn) < kSeriesTol) break;
        qn *= q;
    }
    return acc;
}

Complex dedekind_eta(const Modulus& m) {
    Complex prod{1.0, 0.0};
    const Complex q = m.q();
    Complex qn = q;
    for (int n = 1; n <= m.series_cap(); ++n) {
        prod *= 1.0 - qn;
        if (std::abs(qn) < kSeriesTol) break;
        qn *= q;
    }
    return std::exp(kI * kPi * m.sigma() / 12.0) * prod;
}

Complex eisenstein_e2(const Modulus& m) { return 1.0 - 24.0 * lambert_sum(m, 1); }
Complex eisenstein_e4(const Modulus& m) { return 1.0 + 240.0 * lambert_sum(m, 3); }
Complex eisenstein_e6(const Modulus& m) { return 1.0 - 504.0 * lambert_sum(m, 5); }

Complex eta_tilde(const Modulus& m) {
    const auto jet = theta1_jet(m, 0.0);
    return jet[3] / jet[1] / (12.0 * kPi * kI);
}

Complex eta_tilde_from_e2(const Modulus& m) { return kPi * kI / 12.0 * eisenstein_e2(m); }

WeierstrassContext::WeierstrassContext(Modulus modulus) : modulus_(modulus) {
    const auto jet0 = theta1_jet(modulus_, 0.0);
    theta1_deriv0_ = jet0[1];
    // log theta_1(z) = log(theta_1'(0) z) + (r/6) z^2 + O(z^4) with r = theta_1'''(0)/theta_1'(0);
    // the Laurent conditions wp = 1/z^2 + O(z^2), sigma = z + O(z^5) fix both constants.
    const Complex r = jet0[3] / jet0[1];
    calib_p_ = r / 3.0;
    calib_sigma_ = -r / 6.0;
    eta_tilde_ = r / (12.0 * kPi * kI);
    const double pi2 = kPi * kPi;
    g2_ = 4.0 * pi2 * pi2 / 3.0 * eisenstein_e4(modulus_);
    g3_ = 8.0 * pi2 * pi2 * pi2 / 27.0 * eisenstein_e6(modulus_);

    const Complex probe = std::polar(1e-3, 0.3);
    auto fail = [&](const char* what, double value) {
        std::ostringstream msg;
        msg << "Weierstrass invariant '" << what << "' violated (" << value << ") at sigma = " << sigma();
        throw Error(ErrorKind::NonConvergence, msg.str());
    };
    if (const double d = std::abs(wp(probe) - 1.0 / (probe * probe)); !(d < 1e-4)) fail("wp - 1/z^2", d);
    if (const double d = std::abs(sigma_fn(probe) / probe - 1.0); !(d < 1e-5)) fail("sigma/z", d);
    if (const double d = std::abs(zeta(probe) - 1.0 / probe); !(d < 1e-4)) fail("zeta - 1/z", d);
    const Complex base = 0.31 + 0.17 * sigma();
    const Complex e1 = zeta(base + 1.0) - zeta(base);
    const Complex e2 = zeta(base + sigma()) - zeta(base);
    if (const double d = std::abs(e1 * sigma() - e2 - 2.0 * kPi * kI); !(d < 1e-10 * std::max(1.0, std::abs(e1 * sigma()))))
        fail("Legendre relation", d);
}

std::array<double, 2> WeierstrassContext::lattice_coords(Complex z) const {
    const Complex s = sigma();
    const double y = z.imag() / s.imag();
    return {z.real() - y * s.real(), y};
}

Complex WeierstrassContext::reduce(Complex z) const {
    auto [x, y] = lattice_coords(z);
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    return z - fx - fy * sigma();
}

Complex WeierstrassContext::reduce_centered(Complex z) const {
    auto [x, y] = lattice_coords(z);
    const double fx = std::floor(x + 0.5);
    const double fy = std::floor(y + 0.5);
    return z - fx - fy * sigma();
}

double WeierstrassContext::lattice_distance(Complex z) const {
    const Complex r = reduce(z);
    double best = std::abs(r);
    for (int m = -1; m <= 1; ++m)
        for (int n = -1; n <= 1; ++n) best = std::min(best, std::abs(r - static_cast<double>(m) - static_cast<double>(n) * sigma()));
    return best;
}

std::vector<Complex> WeierstrassContext::wp_derivatives(Complex z, int n) const {
    if (n < 0) throw Error(ErrorKind::InvalidInput, "negative derivative order");
    if (lattice_distance(z) < kLatticeClearance) {
        std::ostringstream msg;
        msg << "wp evaluated at " << z << ", too close to a lattice point";
        throw Error(ErrorKind::LatticePoint, msg.str());
    }
    const Complex zr = reduce_centered(z);
    const auto t = theta1_jet(modulus_, zr);
    const Complex l1 = t[1] / t[0];
    const Complex t2 = t[2] / t[0];
    const Complex t3 = t[3] / t[0];
    std::vector<Complex> d(static_cast<std::size_t>(std::max(n, 1)) + 1);
    d[0] = -(t2 - l1 * l1) + calib_p_;
    d[1] = -(t3 - 3.0 * l1 * t2 + 2.0 * l1 * l1 * l1);
    if (n >= 2) d[2] = 6.0 * d[0] * d[0] - g2_ / 2.0;
    // Differentiating wp'' = 6 wp^2 - g2/2 (m times): wp^(m+2) = 6 sum_j C(m,j) wp^(j) wp^(m-j).
    for (int m = 1; m + 2 <= n; ++m) {
        Complex acc{};
        double binom = 1.0;
        for (int j = 0; j <= m; ++j) {
            acc += binom * d[j] * d[m - j];
            binom = binom * (m - j) / (j + 1);
        }
        d[m + 2] = 6.0 * acc;
    }
    d.resize(static_cast<std::size_t>(n) + 1);
    return d;
}

Complex WeierstrassContext::wp(Complex z, int n_deriv) const { return wp_derivatives(z, n_deriv)[n_deriv]; }

Complex WeierstrassContext::zeta(Complex z, int n_deriv) const {
    if (n_deriv > 0) return -wp(z, n_deriv - 1);
    if (lattice_distance(z) < kLatticeClearance) {
        std::ostringstream msg;
        msg << "zeta evaluated at " << z << ", too close to a lattice point";
        throw Error(ErrorKind::LatticePoint, msg.str());
    }
    // Not reduced: zeta is only quasi-periodic.
    const auto t = theta1_jet(modulus_, z);
    return t[1] / t[0] + 2.0 * calib_sigma_ * z;
}

Complex WeierstrassContext::sigma_fn(Complex z) const {
    return theta1(modulus_, z, 0) / theta1_deriv0_ * std::exp(calib_sigma_ * z * z);
}

Complex SigmaProduct::operator()(const WeierstrassContext& ctx, Complex z) const {
    Complex v = scale;
    for (const Complex a : zeros) v *= ctx.sigma_fn(z - a);
    return v;
}

Complex elliptic_resultant(const WeierstrassContext& ctx, const SigmaProduct& f, const SigmaProduct& g) {
    Complex v = ipow(f.scale, static_cast<long long>(g.zeros.size()));
    for (const Complex a : f.zeros) v *= g(ctx, a);
    return v;
}

// ---------------------------------------------------------------------------
// Zero localization

namespace {

struct Cell {
    double u0, u1, v0, v1;
    double size() const { return std::max(u1 - u0, v1 - v0); }
};

class ZeroSearch {
public:
    ZeroSearch(const WeierstrassContext& ctx, const std::function<Complex(Complex)>& h,
               const std::function<Complex(Complex)>& dh, std::span<const PoleDivisor> poles,
               const ZeroSearchOptions& opt, Complex origin)
        : ctx_(ctx), h_(h), dh_(dh), opt_(opt), origin_(origin) {
        for (const auto& p : poles) {
            auto [x, y] = ctx_.lattice_coords(p.position - origin_);
            pole_coords_.push_back({x - std::floor(x), y - std::floor(y), static_cast<double>(p.order)});
        }
    }

    std::vector<Complex> run(int expected) {
        const Cell top{0.0, 1.0, 0.0, 1.0};
        const int count = winding(top) + poles_in(top);
        if (count != expected) {
            std::ostringstream msg;
            msg << "argument principle gives " << count << " zeros, pole divisor has degree " << expected;
            throw Error(ErrorKind::CountMismatch, msg.str());
        }
        search(top, count, 0);
        return std::move(zeros_);
    }

private:
    Complex at(double u, double v) const { return origin_ + u + v * ctx_.sigma(); }

    Complex eval(Complex z) const {
        const Complex v = h_(z);
        if (!finite(v) || v == Complex{}) throw Error(ErrorKind::ContourClash, "zero or pole on the contour");
        return v;
    }

    int poles_in(const Cell& c) const {
        int n = 0;
        for (const auto& p : pole_coords_)
            if (p[0] >= c.u0 && p[0] < c.u1 && p[1] >= c.v0 && p[1] < c.v1) n += static_cast<int>(p[2]);
        return n;
    }

    double segment(Complex za, Complex ha, Complex zb, Complex hb, int depth) const {
        const double whole = std::arg(hb / ha);
        const Complex zm = 0.5 * (za + zb);
        const Complex hm = eval(zm);
        const double d1 = std::arg(hm / ha);
        const double d2 = std::arg(hb / hm);
        if (std::abs(d1) < 0.3 && std::abs(d2) < 0.3 && std::abs(d1 + d2 - whole) < 1e-9) return whole;
        if (depth >= opt_.max_edge_depth) throw Error(ErrorKind::ContourClash, "phase tracking did not resolve an edge");
        return segment(za, ha, zm, hm, depth + 1) + segment(zm, hm, zb, hb, depth + 1);
    }

    int winding(const Cell& c) const {
        const std::array<std::array<double, 2>, 5> corners{{{c.u0, c.v0}, {c.u1, c.v0}, {c.u1, c.v1}, {c.u0, c.v1}, {c.u0, c.v0}}};
        constexpr int kInitial = 8;
        double total = 0.0;
        for (int e = 0; e < 4; ++e) {
            const Complex za = at(corners[e][0], corners[e][1]);
            const Complex zb = at(corners[e + 1][0], corners[e + 1][1]);
            Complex prev_z = za;
            Complex prev_h = eval(za);
            for (int s = 1; s <= kInitial; ++s) {
                const Complex z = za + (zb - za) * (static_cast<double>(s) / kInitial);
                const Complex hv = eval(z);
                total += segment(prev_z, prev_h, z, hv, 0);
                prev_z = z;
                prev_h = hv;
            }
        }
        const double turns = total / (2.0 * kPi);
        const double rounded = std::round(turns);
        if (std::abs(turns - rounded) > 0.1) throw Error(ErrorKind::ContourClash, "non-integral winding number");
        return static_cast<int>(rounded);
    }

    bool pole_near(double coord, int axis, double margin) const {
        for (const auto& p : pole_coords_)
            if (std::abs(p[axis] - coord) < margin) return true;
        return false;
    }

    std::optional<Complex> newton(const Cell& c) const {
        Complex z = at(0.5 * (c.u0 + c.u1), 0.5 * (c.v0 + c.v1));
        for (int it = 0; it < opt_.max_newton_iterations; ++it) {
            const Complex d = dh_(z);
            if (!finite(d) || d == Complex{}) return std::nullopt;
            const Complex step = h_(z) / d;
            if (!finite(step)) return std::nullopt;
            z -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
        }
        auto [x, y] = ctx_.lattice_coords(z - origin_);
        // the cell holds exactly one zero, so Newton landing outside it has found a neighbour
        const double pad = 1e-6 * c.size() + 1e-12;
        if (x < c.u0 - pad || x > c.u1 + pad || y < c.v0 - pad || y > c.v1 + pad) return std::nullopt;
        if (!finite(h_(z))) return std::nullopt;
        return z;
    }

    void search(const Cell& c, int count, int depth) {
        if (count <= 0) return;
        const int poles = poles_in(c);
        const bool small = c.size() <= opt_.newton_cell;
        if (count == 1 && poles == 0 && small) {
            if (auto z = newton(c)) {
                zeros_.push_back(ctx_.reduce(*z));
                return;
            }
        }
        if (c.size() < opt_.min_cell) {
            if (poles > 0) throw Error(ErrorKind::ContourClash, "zero cluster coincides with a pole");
            const Complex z = newton(c).value_or(at(0.5 * (c.u0 + c.u1), 0.5 * (c.v0 + c.v1)));
            for (int i = 0; i < count; ++i) zeros_.push_back(ctx_.reduce(z));
            return;
        }
        static constexpr std::array<double, 6> kOffsets{0.0, 0.0731, -0.0917, 0.1633, -0.1871, 0.0373};
        const double margin = std::max(1e-3 * c.size(), opt_.contour_clearance);
        for (const double off : kOffsets) {
            const double su = c.u0 + (0.5 + off + 0.0137 * ((depth % 3) - 1)) * (c.u1 - c.u0);
            const double sv = c.v0 + (0.5 - off + 0.0113 * ((depth % 2) ? 1 : -1)) * (c.v1 - c.v0);
            if (pole_near(su, 0, margin) || pole_near(sv, 1, margin)) continue;
            const std::array<Cell, 4> kids{{{c.u0, su, c.v0, sv}, {su, c.u1, c.v0, sv}, {c.u0, su, sv, c.v1}, {su, c.u1, sv, c.v1}}};
            std::array<int, 4> counts{};
            try {
                for (int k = 0; k < 4; ++k) counts[k] = winding(kids[k]) + poles_in(kids[k]);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::ContourClash) continue;
                throw;
            }
            int sum = 0;
            for (int k = 0; k < 4; ++k) {
                if (counts[k] < 0) throw Error(ErrorKind::ContourClash, "negative zero count in a cell");
                sum += counts[k];
            }
            if (sum != count) continue;
            for (int k = 0; k < 4; ++k) search(kids[k], counts[k], depth + 1);
            return;
        }
        throw Error(ErrorKind::ContourClash, "no admissible subdivision of a cell");
    }

    const WeierstrassContext& ctx_;
    const std::function<Complex(Complex)>& h_;
    const std::function<Complex(Complex)>& dh_;
    ZeroSearchOptions opt_;
    Complex origin_;
    std::vector<std::array<double, 3>> pole_coords_;
    std::vector<Complex> zeros_;
};

}  // namespace

std::vector<Complex> elliptic_zeros(const WeierstrassContext& ctx, const std::function<Complex(Complex)>& h,
                                    const std::function<Complex(Complex)>& dh, std::span<const PoleDivisor> poles,
                                    const ZeroSearchOptions& options) {
    int expected = 0;
    for (const auto& p : poles) expected += p.order;
    static constexpr std::array<std::array<double, 2>, 6> kOrigins{
        {{-0.0123, -0.0171}, {-0.0731, -0.0517}, {-0.1333, -0.1071}, {0.0419, 0.0263}, {-0.2417, 0.0811}, {0.1129, -0.1913}}};

    auto edge_clearance = [&](Complex origin) {
        double worst = 1.0;
        for (const auto& p : poles) {
            auto [x, y] = ctx.lattice_coords(p.position - origin);
            x -= std::floor(x);
            y -= std::floor(y);
            worst = std::min({worst, x, 1.0 - x, y, 1.0 - y});
        }
        return worst;
    };

    std::vector<Complex> candidates;
    for (const auto& o : kOrigins) candidates.push_back(o[0] + o[1] * ctx.sigma());
    std::stable_sort(candidates.begin(), candidates.end(), [&](Complex a, Complex b) {
        return std::min(edge_clearance(a), 1e-2) > std::min(edge_clearance(b), 1e-2);
    });

    std::string last_error = "no origin tried";
    for (const Complex origin : candidates) {
        if (edge_clearance(origin) < options.contour_clearance) continue;
        try {
            return ZeroSearch(ctx, h, dh, poles, options, origin).run(expected);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ContourClash) throw;
            last_error = e.what();
        }
    }
    throw Error(ErrorKind::ContourClash, "no admissible contour translation: " + last_error);
}

}  // namespace hurwitz::elliptic
