#include "hurwitz/cover0.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "hurwitz/errors.hpp"

namespace hurwitz::cover0 {

using namespace poly;

namespace {

// d^n/dz^n of c / (z - b)^alpha
Complex pole_term(Complex c, Complex w, int alpha, int n) {
    double rising = 1.0;
    for (int j = 0; j < n; ++j) rising *= alpha + j;
    return c * ((n % 2) ? -rising : rising) * ipow(w, -(alpha + n));
}

CPoly polynomial_part(const Covering0& c) {
    std::vector<Complex> coeffs(c.k1 + 1);
    for (std::size_t r = 0; r < c.poly_coeffs.size(); ++r) coeffs[r] = c.poly_coeffs[r];
    coeffs[c.k1] = 1.0;
    return CPoly(std::move(coeffs));
}

CPoly linear_power(Complex b, int n) { return CPoly{-b, 1.0}.pow(n); }

double min_gap(std::span<const Complex> v) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) gap = std::min(gap, std::abs(v[i] - v[j]));
    return gap;
}

// prod_{i != j} (b_i - b_j)^{(k_i+1)(k_j+1)}
Complex pole_difference_product(const Covering0& c) {
    Complex prod{1.0, 0.0};
    for (std::size_t i = 0; i < c.poles.size(); ++i)
        for (std::size_t j = 0; j < c.poles.size(); ++j)
            if (i != j)
                prod *= ipow(c.poles[i].b - c.poles[j].b, (c.poles[i].order() + 1) * (c.poles[j].order() + 1));
    return prod;
}

// min over the roots b_i of g of |f(b_i)| / sum_j |f_j| |b_i|^j; zero when f and g share a root.
double shared_root_measure(const Covering0& c, const CPoly& f) {
    double worst = std::numeric_limits<double>::infinity();
    for (const Pole& p : c.poles) {
        double bound = 0.0, power = 1.0;
        for (const Complex a : f.coeffs()) {
            bound += std::abs(a) * power;
            power *= std::max(1.0, std::abs(p.b));
        }
        worst = std::min(worst, std::abs(f(p.b)) / bound);
    }
    return worst;
}

// Newton on the rational p' itself (no cancellation from expanding f), kept while |p'| decreases.
Complex polish_on_p_prime(const Covering0& c, Complex z) {
    double residual = std::abs(c.eval(z, 1));
    for (int it = 0; it < 20 && residual > 0.0; ++it) {
        const Complex next = z - c.eval(z, 1) / c.eval(z, 2);
        const double r = std::abs(c.eval(next, 1));
        if (!(r < residual)) break;
        const bool done = std::abs(next - z) <= 1e-15 * std::abs(z);
        z = next;
        residual = r;
        if (done) break;
    }
    return z;
}

// Newton on p' from z0.
Complex track_critical_point(const Covering0& c, Complex z0) {
    Complex z = z0;
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const Complex d = c.eval(z, 1) / c.eval(z, 2);
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

std::vector<int> Covering0::profile() const {
    std::vector<int> k{k1};
    for (const Pole& p : poles) k.push_back(p.order());
    return k;
}

int Covering0::degree() const {
    int n = k1;
    for (const Pole& p : poles) n += p.order();
    return n;
}

int Covering0::dimension() const { return static_cast<int>(poles.size()) + 1 + degree() - 2; }

Complex Covering0::eval(Complex z, int n) const {
    Complex value{};
    // polynomial part, Horner on the n-th derivative
    for (int r = k1; r >= n; --r) {
        const Complex a = r == k1 ? Complex{1.0} : (r < static_cast<int>(poly_coeffs.size()) ? poly_coeffs[r] : 0.0);
        double falling = 1.0;
        for (int j = 0; j < n; ++j) falling *= r - j;
        value = value * z + a * falling;
    }
    for (const Pole& p : poles) {
        const Complex w = z - p.b;
        for (int alpha = 1; alpha <= p.order(); ++alpha) value += pole_term(p.tail[alpha - 1], w, alpha, n);
    }
    return value;
}

std::vector<Complex> Covering0::jet(Complex z, int n) const {
    std::vector<Complex> out(n + 1);
    for (int j = 0; j <= n; ++j) out[j] = eval(z, j);
    return out;
}

Covering0 Covering0::polynomial(std::vector<Complex> coeffs) {
    Covering0 c;
    c.k1 = static_cast<int>(coeffs.size()) + 1;
    c.poly_coeffs = std::move(coeffs);
    return c;
}

Diagnostics validate(const Covering0& c) {
    if (c.k1 < 1) throw Error(ErrorKind::InvalidInput, "k1 must be at least 1");
    if (static_cast<int>(c.poly_coeffs.size()) != c.k1 - 1)
        throw Error(ErrorKind::InvalidInput,
                    str("expected ", c.k1 - 1, " polynomial coefficients, got ", c.poly_coeffs.size()));
    Diagnostics d;
    d.min_pole_distance = std::numeric_limits<double>::infinity();
    d.min_top_tail = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.poles.size(); ++i) {
        const Pole& p = c.poles[i];
        if (p.tail.empty()) throw Error(ErrorKind::InvalidInput, str("pole ", i, " has an empty tail"));
        for (std::size_t j = 0; j < i; ++j) {
            const double dist = std::abs(p.b - c.poles[j].b);
            d.min_pole_distance = std::min(d.min_pole_distance, dist);
            if (dist == 0.0) throw Error(ErrorKind::OnBoundary, str("S1: poles ", j, " and ", i, " coincide"));
        }
        d.min_top_tail = std::min(d.min_top_tail, std::abs(p.top()));
        if (p.top() == 0.0) throw Error(ErrorKind::OnBoundary, str("S2: pole ", i, " has zero top coefficient"));
    }
    d.dimension = c.dimension();
    return d;
}

namespace {

// f, g of p' = f/g in the variable w = z - shift.
std::pair<CPoly, CPoly> shifted_ratio(const Covering0& c, Complex shift) {
    CPoly g = CPoly::constant(1.0);
    for (const Pole& p : c.poles) g = g * linear_power(p.b - shift, p.order() + 1);
    const CPoly dp = polynomial_part(c).derivative();
    std::vector<Complex> taylor = eval_derivatives(dp, shift, dp.degree());
    double factorial = 1.0;
    for (std::size_t j = 1; j < taylor.size(); ++j) taylor[j] /= (factorial *= static_cast<double>(j));
    CPoly f = CPoly(std::move(taylor)) * g;
    for (std::size_t i = 0; i < c.poles.size(); ++i) {
        const Pole& p = c.poles[i];
        CPoly others = CPoly::constant(1.0);
        for (std::size_t j = 0; j < c.poles.size(); ++j)
            if (j != i) others = others * linear_power(c.poles[j].b - shift, c.poles[j].order() + 1);
        for (int alpha = 1; alpha <= p.order(); ++alpha)
            f = f + (-static_cast<double>(alpha) * p.tail[alpha - 1]) *
                        (linear_power(p.b - shift, p.order() - alpha) * others);
    }
    return {f, g};
}

}  // namespace

std::pair<CPoly, CPoly> p_prime_as_ratio(const Covering0& c) { return shifted_ratio(c, 0.0); }

CriticalData0 critical_data(const Covering0& c) {
    validate(c);
    const auto [f, g] = p_prime_as_ratio(c);
    if (const double rel = shared_root_measure(c, f); rel < 1e-12)
        throw Error(ErrorKind::CommonRoot, str("f and g share a root (relative |f(b_i)| = ", rel, ")"));
    if (f.degree() != c.dimension())
        throw Error(ErrorKind::InvalidInput, str("deg f = ", f.degree(), " but M = ", c.dimension()));

    CriticalData0 out;
    if (f.degree() == 0) return out;
    const RootSet roots = all_roots(f);
    out.root_residual = roots.residual;
    for (Complex z : roots.roots) {
        z = polish_on_p_prime(c, z);
        const std::vector<Complex> j = c.jet(z, 4);
        out.alpha.push_back(z);
        out.lambda.push_back(j[0]);
        out.fsq.push_back(2.0 / j[2]);
        out.sb.push_back(isomon::schwarzian_from_jet(j[2], j[3], j[4]));
    }
    out.min_alpha_gap = min_gap(out.alpha);
    out.caustic_warning = isomon::near_caustic(out.lambda, &out.min_lambda_gap);
    return out;
}

FlatCoords0 flat_coords(const Covering0& c) {
    FlatCoords0 out;
    for (const Pole& p : c.poles) {
        const int k = p.order();
        out.p.push_back(p.b);
        out.t.push_back(static_cast<double>(k) * principal_root(p.top(), k));
        out.t_power.push_back(std::pow(static_cast<double>(k), k) * p.top());
    }
    return out;
}

TauProduct tau_product(const Covering0& c, const CriticalData0& crit) {
    TauProduct out;
    Complex sum{}, m48{1.0, 0.0};
    for (const Complex q : crit.fsq) {
        sum += 0.5 * std::log(q);
        m48 /= q;
    }
    for (const Pole& p : c.poles) {
        const int k = p.order();
        const Complex h = principal_root(p.top(), k);
        sum -= static_cast<double>(k + 1) * std::log(h);
        m48 *= ipow(h, 2 * (k + 1));
    }
    out.log_tau = sum / 24.0;
    out.tau_m48 = m48;
    return out;
}

Complex tau_resultant(const Covering0& c) {
    validate(c);
    const CPoly f = p_prime_as_ratio(c).first;
    Complex denom = pole_difference_product(c);
    const FlatCoords0 flat = flat_coords(c);
    for (std::size_t i = 0; i < c.poles.size(); ++i) {
        const int k = c.poles[i].order();
        denom *= ipow(flat.t[i], static_cast<long long>(k + 1) * (k - 2));
    }
    if (f.degree() == 0) return 1.0 / denom;
    return resultant(f, f.derivative()) / denom;
}

Complex fg_resultant_ratio(const Covering0& c) {
    validate(c);
    const auto [f, g] = p_prime_as_ratio(c);
    Complex denom = pole_difference_product(c);
    const FlatCoords0 flat = flat_coords(c);
    for (std::size_t i = 0; i < c.poles.size(); ++i) denom *= ipow(flat.t_power[i], c.poles[i].order() + 1);
    return resultant(f, g) / denom;
}

GFunction g_function(const Covering0& c, const CriticalData0& crit) {
    GFunction out;
    const FlatCoords0 flat = flat_coords(c);
    for (std::size_t i = 0; i < c.poles.size(); ++i)
        out.g -= static_cast<double>(c.poles[i].order() + 1) * std::log(flat.t[i]) / 24.0;
    Complex log_j{};
    for (const Complex q : crit.fsq) log_j += 0.5 * std::log(q);
    out.g_from_tau = tau_product(c, crit).log_tau - log_j / 24.0;
    out.gamma = gamma_closed_form(c.profile());
    return out;
}

double gamma_closed_form(const std::vector<int>& profile) {
    const int l = static_cast<int>(profile.size());
    const int n = std::accumulate(profile.begin(), profile.end(), 0);
    const int m = l + n - 2;
    double inv = 0.0;
    for (int k : profile) inv += 1.0 / k;
    return -(l - 2 + inv + static_cast<double>(m) / profile.front()) / 24.0;
}

double euler_log_tau(const std::vector<int>& profile) {
    const int l = static_cast<int>(profile.size());
    const int n = std::accumulate(profile.begin(), profile.end(), 0);
    const double m = l + n - 2;
    const double k1 = profile.front();
    double sum = -0.5 * m * (1.0 - 2.0 / k1);
    for (int i = 1; i < l; ++i) sum -= (profile[i] + 1) * (1.0 / profile[i] + 1.0 / k1);
    return sum / 24.0;
}

namespace {

// |R(f, f')| = |lc|^{2M-1} prod_{m != n} |alpha_m - alpha_n|, with the critical points found from f expanded
// about `anchor`; near a collision this keeps full relative accuracy where the Sylvester determinant has
// already reached its roundoff floor
double resultant_magnitude(const Covering0& x, Complex anchor) {
    const CPoly f = shifted_ratio(x, anchor).first;
    std::vector<Complex> alpha = all_roots(f).roots;
    for (Complex& w : alpha) w = polish_on_p_prime(x, w + anchor) - anchor;
    double log_r = (2.0 * f.degree() - 1.0) * std::log(std::abs(f.leading()));
    for (std::size_t m = 0; m < alpha.size(); ++m)
        for (std::size_t n = 0; n < alpha.size(); ++n)
            if (m != n) log_r += std::log(std::abs(alpha[m] - alpha[n]));
    return std::exp(log_r);
}

}  // namespace

std::vector<CausticRay> caustic_orders(const Covering0& c) {
    validate(c);
    const auto fit = [](CausticRay& ray) {
        if (std::getenv("HURWITZ_DEBUG_RAYS"))
            for (std::size_t i = 0; i < ray.eps.size(); ++i)
                std::fprintf(stderr, "%s %g %g\n", ray.label.c_str(), ray.eps[i], ray.abs_r[i]);
        const isomon::VanishingFit f = isomon::fit_vanishing_order(ray.eps, ray.abs_r, ray.label);
        ray.order = f.order;
        ray.fit_residual = f.residual;
    };

    std::vector<CausticRay> rays;
    for (std::size_t i = 0; i < c.poles.size(); ++i) {
        const int k = c.poles[i].order();
        CausticRay ray;
        ray.label = str("t", i + 2);
        ray.expected_lower_bound = k == 1 ? 1 : 0;
        // ray t_i = eps * unit(t_i); for k_i >= 2 it leaves the Hurwitz space, so stop at |t_i| = 1e-4
        const Complex unit = flat_coords(c).t[i] / std::abs(flat_coords(c).t[i]);
        for (int d = 0; d <= 4; ++d) {
            const double eps = k == 1 ? std::pow(10.0, -2.0 - d) : std::pow(10.0, -2.0 - 0.5 * d);
            Covering0 x = c;
            x.poles[i].tail.back() = ipow(eps * unit / static_cast<double>(k), k);
            ray.eps.push_back(eps);
            ray.abs_r.push_back(resultant_magnitude(x, c.poles[i].b));
        }
        fit(ray);
        rays.push_back(std::move(ray));
    }
    for (std::size_t r = 0; r < c.poles.size(); ++r)
        for (std::size_t s = r + 1; s < c.poles.size(); ++s) {
            CausticRay ray;
            ray.label = str("b", r + 2, "-b", s + 2);
            ray.expected_lower_bound = c.poles[r].order() + c.poles[s].order();
            const Complex dir = c.poles[r].b - c.poles[s].b;
            for (int d = 0; d <= 4; ++d) {
                const double eps = std::pow(10.0, -3.0 - d);
                Covering0 x = c;
                x.poles[r].b = c.poles[s].b + eps * dir;
                ray.eps.push_back(eps);
                ray.abs_r.push_back(resultant_magnitude(x, c.poles[s].b));
            }
            fit(ray);
            rays.push_back(std::move(ray));
        }
    return rays;
}

isomon::CollisionPath collision_path(const Covering0& c, int param) {
    const Family0 fam(c);
    const Eigen::VectorXcd theta0 = fam.parameters();
    if (param < 0 || param >= theta0.size()) throw Error(ErrorKind::InvalidInput, str("no parameter ", param));
    const auto at = [&](Complex s) {
        Eigen::VectorXcd theta = theta0;
        theta[param] = s;
        return fam.covering(theta);
    };
    const isomon::CriticalJet jet = [&](Complex z, Complex s) {
        const Covering0 x = at(s);
        return std::array<Complex, 3>{x.eval(z, 1), x.eval(z, 2), x.eval(z, 3)};
    };
    const CriticalData0 crit = critical_data(c);
    // start from the midpoint of every pair of critical points, closest pairs first
    std::vector<std::pair<double, Complex>> starts;
    for (std::size_t m = 0; m < crit.alpha.size(); ++m)
        for (std::size_t n = m + 1; n < crit.alpha.size(); ++n)
            starts.push_back({std::abs(crit.alpha[m] - crit.alpha[n]), 0.5 * (crit.alpha[m] + crit.alpha[n])});
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
        for (int d = 0; d <= 8; ++d) {
            const double eps = std::pow(10.0, -2.0 - 0.5 * d);
            path.eps.push_back(eps);
            path.magnitude.push_back(resultant_magnitude(at(hit.s + eps * unit), hit.z));
        }
        const isomon::VanishingFit f = isomon::fit_vanishing_order(path.eps, path.magnitude, path.parameter);
        path.order = f.order;
        path.fit_residual = f.residual;
        return path;
    }
    throw Error(ErrorKind::NonConvergence, str("no critical-point collision reached along ", fam.parameter_names()[param]));
}

// ---------------------------------------------------------------------------

isomon::CanonicalData canonical_data(const Covering0& c, const isomon::CanonicalData* reference) {
    isomon::CanonicalData d;
    d.genus = 0;
    if (reference == nullptr) {
        const CriticalData0 crit = critical_data(c);
        d.points = crit.alpha;
    } else {
        validate(c);
        for (const Complex z0 : reference->points) d.points.push_back(track_critical_point(c, z0));
        const double gap = min_gap(d.points);
        if (!(gap > 0.25 * reference->min_point_gap))
            throw Error(ErrorKind::NonConvergence, "critical points merged during continuation");
    }
    for (std::size_t m = 0; m < d.points.size(); ++m) {
        const std::vector<Complex> j = c.jet(d.points[m], 4);
        d.lambda.push_back(j[0]);
        d.fsq.push_back(2.0 / j[2]);
        d.f.push_back(reference ? sqrt_near(d.fsq.back(), reference->f[m]) : std::sqrt(d.fsq.back()));
        d.sw.push_back(isomon::schwarzian_from_jet(j[2], j[3], j[4]));
        d.sb.push_back(d.sw.back());
    }
    for (std::size_t i = 0; i < c.poles.size(); ++i) {
        const Pole& p = c.poles[i];
        const int k = p.order();
        Complex h = principal_root(p.top(), k);
        if (reference) {
            // the k-th root nearest the previous value
            const Complex root = std::polar(1.0, 2.0 * kPi / k);
            Complex best = h;
            for (int j = 0; j < k; ++j, h *= root)
                if (std::abs(h - reference->h[i]) < std::abs(best - reference->h[i])) best = h;
            h = best;
        }
        d.infinity_points.push_back(p.b);
        d.infinity_orders.push_back(k);
        d.h.push_back(h);
        d.h_power.push_back(p.top());
    }
    d.min_point_gap = min_gap(d.points);
    d.caustic_warning = isomon::near_caustic(d.lambda, &d.min_lambda_gap);
    return d;
}

Family0::Family0(Covering0 base) : base_(std::move(base)) { validate(base_); }

Eigen::VectorXcd Family0::parameters() const {
    std::vector<Complex> theta(base_.poly_coeffs);
    for (const Pole& p : base_.poles) {
        theta.push_back(p.b);
        theta.insert(theta.end(), p.tail.begin(), p.tail.end());
    }
    return Eigen::Map<Eigen::VectorXcd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
}

std::vector<std::string> Family0::parameter_names() const {
    std::vector<std::string> names;
    for (std::size_t r = 0; r < base_.poly_coeffs.size(); ++r) names.push_back(str("poly_coeffs.", r));
    for (std::size_t i = 0; i < base_.poles.size(); ++i) {
        names.push_back(str("poles.", i, ".b"));
        for (int a = 0; a < base_.poles[i].order(); ++a) names.push_back(str("poles.", i, ".tail.", a));
    }
    return names;
}

Covering0 Family0::covering(const Eigen::VectorXcd& theta) const {
    Covering0 c = base_;
    Eigen::Index at = 0;
    for (Complex& a : c.poly_coeffs) a = theta[at++];
    for (Pole& p : c.poles) {
        p.b = theta[at++];
        for (Complex& t : p.tail) t = theta[at++];
    }
    return c;
}

isomon::CanonicalData Family0::base() const { return canonical_data(base_); }

isomon::CanonicalData Family0::at(const Eigen::VectorXcd& theta, const isomon::CanonicalData& reference) const {
    return canonical_data(covering(theta), &reference);
}

}  // namespace hurwitz::cover0
