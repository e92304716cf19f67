#include "hurwitz/cover1.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "hurwitz/errors.hpp"

namespace hurwitz::cover1 {

using elliptic::WeierstrassContext;

namespace {

constexpr double kNearPole = 1e-8;

double factorial(int n) {
    double f = 1.0;
    for (int j = 2; j <= n; ++j) f *= j;
    return f;
}

// leading Laurent coefficient (-1)^{k-1} (k-1)! c_{(i,k)} = h_i^{k}
Complex leading_coefficient(const Pole& p) {
    const int k = p.order();
    return ((k - 1) % 2 ? -1.0 : 1.0) * factorial(k - 1) * p.top();
}

double min_lattice_gap(const WeierstrassContext& ctx, std::span<const Complex> v) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) gap = std::min(gap, ctx.lattice_distance(v[i] - v[j]));
    return gap;
}

Complex track_critical_point(const Model& m, Complex z0) {
    Complex z = z0;
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const Complex d = m.eval(z, 1) / m.eval(z, 2);
        if (!std::isfinite(std::abs(d))) break;
        z -= d;
        last = std::abs(d);
        if (last <= 4e-16 * (1.0 + std::abs(z))) break;
    }
    if (!(last <= 1e-9 * (1.0 + std::abs(z))))
        throw Error(ErrorKind::NonConvergence, "critical point continuation did not converge");
    return z;
}

}  // namespace

std::vector<int> Covering1::profile() const {
    std::vector<int> k;
    for (const Pole& p : poles) k.push_back(p.order());
    return k;
}

int Covering1::degree() const {
    int n = 0;
    for (const Pole& p : poles) n += p.order();
    return n;
}

int Covering1::dimension() const { return static_cast<int>(poles.size()) + degree(); }

Diagnostics validate(const Covering1& c) {
    if (!(c.sigma.imag() > 0.0)) throw Error(ErrorKind::InvalidInput, "modulus must lie in the upper half plane");
    if (c.poles.empty()) throw Error(ErrorKind::InvalidInput, "an elliptic covering needs at least one pole");
    Diagnostics d;
    d.min_pole_distance = std::numeric_limits<double>::infinity();
    d.min_top_tail = std::numeric_limits<double>::infinity();
    Complex residues{};
    // lattice distances without building a full context
    const auto lattice_distance = [&](Complex z) {
        const double y = z.imag() / c.sigma.imag();
        const double x = z.real() - y * c.sigma.real();
        const Complex centred = (x - std::round(x)) + (y - std::round(y)) * c.sigma;
        double best = std::numeric_limits<double>::infinity();
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) best = std::min(best, std::abs(centred + double(i) + double(j) * c.sigma));
        return best;
    };
    for (std::size_t i = 0; i < c.poles.size(); ++i) {
        const Pole& p = c.poles[i];
        if (p.tail.empty()) throw Error(ErrorKind::InvalidInput, str("pole ", i, " has an empty tail"));
        residues += p.tail.front();
        for (std::size_t j = 0; j < i; ++j) {
            const double dist = lattice_distance(p.b - c.poles[j].b);
            d.min_pole_distance = std::min(d.min_pole_distance, dist);
            if (dist < 1e-14) throw Error(ErrorKind::OnBoundary, str("S1: poles ", j, " and ", i, " coincide mod lattice"));
        }
        d.min_top_tail = std::min(d.min_top_tail, std::abs(p.top()));
        if (p.top() == 0.0) throw Error(ErrorKind::OnBoundary, str("S2: pole ", i, " has zero top coefficient"));
    }
    d.residue_sum = std::abs(residues);
    if (!(d.residue_sum < 1e-12))
        throw Error(ErrorKind::InvalidInput, str("residues sum to ", d.residue_sum, ", p is not elliptic"));
    d.dimension = c.dimension();
    return d;
}

Model::Model(Covering1 covering)
    : Model(covering, std::make_shared<const WeierstrassContext>(covering.sigma)) {}

Model::Model(Covering1 covering, std::shared_ptr<const WeierstrassContext> ctx)
    : c_(std::move(covering)), ctx_(std::move(ctx)) {
    validate(c_);
}

std::vector<Complex> Model::jet(Complex z, int n) const {
    std::vector<Complex> out(n + 1);
    out[0] = c_.a;
    for (std::size_t i = 0; i < c_.poles.size(); ++i) {
        const Pole& p = c_.poles[i];
        const Complex w = z - p.b;
        if (ctx_->lattice_distance(w) < kNearPole)
            throw Error(ErrorKind::NearPole, str("z within ", kNearPole, " of pole ", i));
        // zeta^{(m)} = -wp^{(m-1)} for m >= 1
        const int top = p.order() - 1 + n;
        const std::vector<Complex> wp = top >= 1 ? ctx_->wp_derivatives(w, top - 1) : std::vector<Complex>{};
        for (int alpha = 1; alpha <= p.order(); ++alpha)
            for (int j = 0; j <= n; ++j) {
                const int order = alpha - 1 + j;
                out[j] += p.tail[alpha - 1] * (order == 0 ? ctx_->zeta(w) : -wp[order - 1]);
            }
    }
    return out;
}

Complex Model::eval(Complex z, int n) const { return jet(z, n)[n]; }

CriticalData1 critical_data(const Model& m) {
    const Covering1& c = m.covering();
    const WeierstrassContext& ctx = m.context();
    std::vector<elliptic::PoleDivisor> poles;
    for (const Pole& p : c.poles) poles.push_back({p.b, p.order() + 1});
    const std::vector<Complex> zeros = elliptic::elliptic_zeros(
        ctx, [&](Complex z) { return m.eval(z, 1); }, [&](Complex z) { return m.eval(z, 2); }, poles);
    if (static_cast<int>(zeros.size()) != c.dimension())
        throw Error(ErrorKind::CountMismatch, str(zeros.size(), " critical points, expected ", c.dimension()));
    CriticalData1 out;
    const Complex shift = 24.0 * kPi * kI * ctx.eta_tilde();
    for (const Complex z : zeros) {
        const std::vector<Complex> j = m.jet(z, 4);
        out.z.push_back(z);
        out.lambda.push_back(j[0]);
        out.fsq.push_back(2.0 / j[2]);
        out.sw.push_back(isomon::schwarzian_from_jet(j[2], j[3], j[4]));
        out.sb.push_back(out.sw.back() - shift * out.fsq.back());
    }
    out.min_z_gap = min_lattice_gap(ctx, out.z);
    out.caustic_warning = isomon::near_caustic(out.lambda, &out.min_lambda_gap);
    return out;
}

FlatCoords1 flat_coords(const Covering1& c) {
    FlatCoords1 out;
    out.t0 = c.sigma;
    for (const Pole& p : c.poles) {
        out.t_power.push_back(leading_coefficient(p));
        out.t.push_back(principal_root(out.t_power.back(), p.order()));
    }
    return out;
}

TauProduct tau_product(const Model& m, const CriticalData1& crit) {
    const Covering1& c = m.covering();
    const Complex log_eta = elliptic::log_dedekind_eta(m.context().modulus());
    const FlatCoords1 flat = flat_coords(c);
    Complex sum{};
    Complex m48 = std::exp(48.0 * log_eta);
    for (const Complex q : crit.fsq) {
        sum += 0.5 * std::log(q);
        m48 /= q;
    }
    for (std::size_t s = 0; s < c.poles.size(); ++s) {
        const int k = c.poles[s].order();
        sum -= static_cast<double>(k + 1) * std::log(flat.t[s]);
        m48 *= ipow(flat.t[s], 2 * (k + 1));
    }
    return {-log_eta + sum / 24.0, m48};
}

TauResultant tau_resultant(const Model& m, const CriticalData1& crit) {
    const Covering1& c = m.covering();
    const WeierstrassContext& ctx = m.context();
    const FlatCoords1 flat = flat_coords(c);

    // representatives with sum z_m = sum (k_i + 1) b_i exactly
    std::vector<Complex> z = crit.z;
    Complex target{};
    for (const Pole& p : c.poles) target += static_cast<double>(p.order() + 1) * p.b;
    const Complex defect = target - std::accumulate(z.begin(), z.end(), Complex{});
    const auto lc = ctx.lattice_coords(defect);
    if (std::abs(lc[0] - std::round(lc[0])) > 1e-6 || std::abs(lc[1] - std::round(lc[1])) > 1e-6)
        throw Error(ErrorKind::NonConvergence, "critical points violate Abel's condition");
    z.front() += defect;

    // A from p' = A prod sigma(x - z_m) / prod sigma(x - b_i)^{k_i+1}, at the candidate point farthest
    // from all zeros and poles
    Complex probe{};
    double clearance = -1.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const Complex x = (0.1 + 0.2 * i) + (0.1 + 0.2 * j) * c.sigma;
            double d = std::numeric_limits<double>::infinity();
            for (const Complex zm : z) d = std::min(d, ctx.lattice_distance(x - zm));
            for (const Pole& p : c.poles) d = std::min(d, ctx.lattice_distance(x - p.b));
            if (d > clearance) {
                clearance = d;
                probe = x;
            }
        }
    Complex a = m.eval(probe, 1);
    for (const Pole& p : c.poles) a *= ipow(ctx.sigma_fn(probe - p.b), p.order() + 1);
    for (const Complex zm : z) a /= ctx.sigma_fn(probe - zm);

    Complex kappa{1.0, 0.0};
    for (std::size_t r = 0; r < z.size(); ++r)
        for (std::size_t s = 0; s < z.size(); ++s)
            if (r != s) kappa *= ctx.sigma_fn(z[r] - z[s]);

    Complex denom{1.0, 0.0};
    for (std::size_t i = 0; i < c.poles.size(); ++i) {
        const int ki = c.poles[i].order();
        for (std::size_t j = 0; j < c.poles.size(); ++j)
            if (i != j) denom *= ipow(ctx.sigma_fn(c.poles[i].b - c.poles[j].b), (ki + 1) * (c.poles[j].order() + 1));
        denom *= ipow(flat.t[i], static_cast<long long>(ki + 1) * (ki - 2));
    }
    const Complex eta48 = std::exp(48.0 * elliptic::log_dedekind_eta(ctx.modulus()));
    TauResultant out;
    out.kappa = kappa;
    out.scale = a;
    out.literal = eta48 * kappa / denom;
    out.value = out.literal * ipow(a, 2 * static_cast<long long>(z.size()));
    return out;
}

GFunction g_function(const Model& m, const CriticalData1& crit) {
    const Covering1& c = m.covering();
    const Complex log_eta = elliptic::log_dedekind_eta(m.context().modulus());
    const FlatCoords1 flat = flat_coords(c);
    GFunction out;
    out.g = -log_eta;
    out.g_literal = -log_eta;
    for (std::size_t s = 0; s < c.poles.size(); ++s) {
        const Complex term = static_cast<double>(c.poles[s].order() + 1) * std::log(flat.t[s]) / 24.0;
        out.g -= term;
        if (s > 0) out.g_literal -= term;
    }
    Complex log_j{};
    for (const Complex q : crit.fsq) log_j += 0.5 * std::log(q);
    out.g_from_tau = tau_product(m, crit).log_tau - log_j / 24.0;
    const std::vector<int> profile = c.profile();
    out.gamma = gamma_closed_form(profile);
    double inv = 0.0;
    for (int k : profile) inv += 1.0 / k;
    out.gamma_literal = -(static_cast<double>(profile.size()) + inv +
                          static_cast<double>(c.dimension()) / profile.front()) / 24.0;
    return out;
}

double gamma_closed_form(const std::vector<int>& profile) {
    double sum = 0.0;
    for (int k : profile) sum += (k + 1.0) / k;
    return -sum / 24.0;
}

double euler_log_tau(const std::vector<int>& profile) {
    const int n = std::accumulate(profile.begin(), profile.end(), 0);
    const double m = static_cast<double>(profile.size()) + n;
    return (-0.5 * m + 24.0 * gamma_closed_form(profile)) / 24.0;
}

// ---------------------------------------------------------------------------

isomon::CollisionPath collision_path(const Covering1& c, int param) {
    const Family1 fam(c);
    const Eigen::VectorXcd theta0 = fam.parameters();
    if (param < 0 || param >= theta0.size()) throw Error(ErrorKind::InvalidInput, str("no parameter ", param));
    const auto at = [&](Complex s) {
        Eigen::VectorXcd theta = theta0;
        theta[param] = s;
        return fam.covering(theta);
    };
    const isomon::CriticalJet jet = [&](Complex z, Complex s) {
        const auto j = Model(at(s)).jet(z, 3);
        return std::array<Complex, 3>{j[1], j[2], j[3]};
    };
    const Model base(c);
    const CriticalData1 crit = critical_data(base);
    const auto& ctx = base.context();
    std::vector<std::pair<double, Complex>> starts;
    for (std::size_t m = 0; m < crit.z.size(); ++m)
        for (std::size_t n = m + 1; n < crit.z.size(); ++n) {
            // midpoint of the nearest representatives
            const Complex d = crit.z[n] - crit.z[m];
            Complex best = d;
            for (int i = -1; i <= 1; ++i)
                for (int j = -1; j <= 1; ++j) {
                    const Complex e = d + double(i) + double(j) * c.sigma;
                    if (std::abs(e) < std::abs(best)) best = e;
                }
            starts.push_back({ctx.lattice_distance(d), crit.z[m] + 0.5 * best});
        }
    std::sort(starts.begin(), starts.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (const auto& [gap, z0] : starts) {
        isomon::Collision hit;
        try {
            hit = isomon::find_collision(jet, z0, theta0[param]);
            // a collision bought by degenerating the covering does not count
            const Diagnostics diag = validate(at(hit.s));
            if (diag.min_top_tail < 1e-6 || diag.min_pole_distance < 1e-6) continue;
        } catch (const Error&) {
            continue;
        }
        isomon::CollisionPath path;
        path.parameter = fam.parameter_names()[param];
        path.at = hit;
        const Complex toward = theta0[param] - hit.s;
        const Complex unit = std::abs(toward) > 0.0 ? toward / std::abs(toward) : Complex(1.0);
        std::vector<Complex> prev;
        try {
            for (int d = 0; d <= 8; ++d) {
                const double eps = std::pow(10.0, -2.0 - 0.5 * d);
                const Model m(at(hit.s + eps * unit));
                // representatives continued along the path, so that no difference jumps by a period
                const auto nearest = [&](Complex w, Complex to) {
                    const auto lc = m.context().lattice_coords(w - to);
                    return w - std::round(lc[0]) - std::round(lc[1]) * m.covering().sigma;
                };
                std::vector<Complex> found = critical_data(m).z;
                std::vector<Complex> z;
                if (prev.empty()) {
                    for (const Complex w : found) z.push_back(nearest(w, hit.z));
                } else {
                    for (const Complex p : prev) {
                        auto it = std::min_element(found.begin(), found.end(), [&](Complex u, Complex v) {
                            return std::abs(nearest(u, p) - p) < std::abs(nearest(v, p) - p);
                        });
                        z.push_back(nearest(*it, p));
                        found.erase(it);
                    }
                }
                prev = z;
                Complex kappa{1.0, 0.0};
                for (std::size_t r = 0; r < z.size(); ++r)
                    for (std::size_t q = 0; q < z.size(); ++q)
                        if (r != q) kappa *= m.context().sigma_fn(z[r] - z[q]);
                path.eps.push_back(eps);
                path.magnitude.push_back(std::abs(kappa));
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CountMismatch) throw;
            continue;
        }
        if (std::getenv("HURWITZ_DEBUG_RAYS"))
            for (std::size_t i = 0; i < path.eps.size(); ++i)
                std::fprintf(stderr, "%s %g %g\n", path.parameter.c_str(), path.eps[i], path.magnitude[i]);
        const isomon::VanishingFit f = isomon::fit_vanishing_order(path.eps, path.magnitude, path.parameter);
        path.order = f.order;
        path.fit_residual = f.residual;
        return path;
    }
    throw Error(ErrorKind::NonConvergence, str("no critical-point collision reached along ", fam.parameter_names()[param]));
}

isomon::CanonicalData canonical_data(const Model& m, const isomon::CanonicalData* reference) {
    const Covering1& c = m.covering();
    const WeierstrassContext& ctx = m.context();
    isomon::CanonicalData d;
    d.genus = 1;
    if (reference == nullptr) {
        d.points = critical_data(m).z;
    } else {
        for (const Complex z0 : reference->points) d.points.push_back(track_critical_point(m, z0));
        if (!(min_lattice_gap(ctx, d.points) > 0.25 * reference->min_point_gap))
            throw Error(ErrorKind::NonConvergence, "critical points merged during continuation");
    }
    const Complex shift = 24.0 * kPi * kI * ctx.eta_tilde();
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        const std::vector<Complex> j = m.jet(d.points[i], 4);
        d.lambda.push_back(j[0]);
        d.fsq.push_back(2.0 / j[2]);
        d.f.push_back(reference ? sqrt_near(d.fsq.back(), reference->f[i]) : std::sqrt(d.fsq.back()));
        d.sw.push_back(isomon::schwarzian_from_jet(j[2], j[3], j[4]));
        d.sb.push_back(d.sw.back() - shift * d.fsq.back());
    }
    const FlatCoords1 flat = flat_coords(c);
    for (std::size_t s = 0; s < c.poles.size(); ++s) {
        const int k = c.poles[s].order();
        Complex h = flat.t[s];
        if (reference) {
            const Complex root = std::polar(1.0, 2.0 * kPi / k);
            Complex best = h;
            for (int j = 0; j < k; ++j, h *= root)
                if (std::abs(h - reference->h[s]) < std::abs(best - reference->h[s])) best = h;
            h = best;
        }
        d.infinity_points.push_back(c.poles[s].b);
        d.infinity_orders.push_back(k);
        d.h.push_back(h);
        d.h_power.push_back(flat.t_power[s]);
    }
    d.weierstrass = ctx;
    d.modulus = c.sigma;
    d.eta = elliptic::dedekind_eta(ctx.modulus());
    d.eta_tilde = ctx.eta_tilde();
    d.min_point_gap = min_lattice_gap(ctx, d.points);
    d.caustic_warning = isomon::near_caustic(d.lambda, &d.min_lambda_gap);
    return d;
}

Family1::Family1(Covering1 base) : base_(std::move(base)) { validate(base_); }

Eigen::VectorXcd Family1::parameters() const {
    std::vector<Complex> theta{base_.sigma, base_.a};
    for (const Pole& p : base_.poles) theta.push_back(p.b);
    for (std::size_t i = 0; i < base_.poles.size(); ++i)
        for (int a = (i == 0 ? 1 : 0); a < base_.poles[i].order(); ++a) theta.push_back(base_.poles[i].tail[a]);
    return Eigen::Map<Eigen::VectorXcd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
}

std::vector<std::string> Family1::parameter_names() const {
    std::vector<std::string> names{"modulus", "a"};
    for (std::size_t i = 0; i < base_.poles.size(); ++i) names.push_back(str("poles.", i, ".b"));
    for (std::size_t i = 0; i < base_.poles.size(); ++i)
        for (int a = (i == 0 ? 1 : 0); a < base_.poles[i].order(); ++a) names.push_back(str("poles.", i, ".tail.", a));
    return names;
}

Covering1 Family1::covering(const Eigen::VectorXcd& theta) const {
    Covering1 c = base_;
    Eigen::Index at = 0;
    c.sigma = theta[at++];
    c.a = theta[at++];
    for (Pole& p : c.poles) p.b = theta[at++];
    Complex residues{};
    for (std::size_t i = 0; i < c.poles.size(); ++i)
        for (int a = (i == 0 ? 1 : 0); a < c.poles[i].order(); ++a) {
            c.poles[i].tail[a] = theta[at++];
            if (a == 0) residues += c.poles[i].tail[a];
        }
    c.poles.front().tail.front() = -residues;
    return c;
}

isomon::CanonicalData Family1::base() const { return canonical_data(Model(base_)); }

isomon::CanonicalData Family1::at(const Eigen::VectorXcd& theta, const isomon::CanonicalData& reference) const {
    return canonical_data(Model(covering(theta)), &reference);
}

}  // namespace hurwitz::cover1
