#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "hurwitz/errors.hpp"
#include "hurwitz/isomon.hpp"

namespace hurwitz::cli {

namespace {

Json leaf(Json value, const char* status) { return Json{{"value", std::move(value)}, {"status", status}}; }

Json vec_json(const Eigen::VectorXcd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
    return out;
}

double max_abs(const std::vector<Complex>& v) {
    double m = 0.0;
    for (const Complex z : v) m = std::max(m, std::abs(z));
    return m;
}

// Tolerances of the two-route Hamiltonian identity per genus.
double route_tolerance(int genus) { return genus == 0 ? 1e-8 : 1e-6; }

struct Evaluated {
    isomon::CanonicalData data;
    double residual = 0.0;  // max |p'(z_m)| / (1 + |p''(z_m)|)
    Complex log_tau, tau_m48, route_b;
    std::optional<Complex> fg_ratio;
    Complex g, g_from_tau, g_offset, gamma;
    std::optional<Complex> g_literal, gamma_literal;
    Complex indicator;  // tau_resultant (genus 0) or kappa (genus 1)
    Json flat;
};

Evaluated evaluate(const CoveringSpec& s) {
    Evaluated e;
    if (s.genus == 0) {
        const cover0::Covering0& c = s.g0;
        const cover0::CriticalData0 crit = cover0::critical_data(c);
        e.data = cover0::canonical_data(c);
        for (const Complex z : e.data.points)
            e.residual = std::max(e.residual, std::abs(c.eval(z, 1)) / (1.0 + std::abs(c.eval(z, 2))));
        const cover0::TauProduct tp = cover0::tau_product(c, crit);
        e.log_tau = tp.log_tau;
        e.tau_m48 = tp.tau_m48;
        e.route_b = cover0::tau_resultant(c);
        e.indicator = e.route_b;
        if (!c.poles.empty()) e.fg_ratio = cover0::fg_resultant_ratio(c);
        const cover0::GFunction g = cover0::g_function(c, crit);
        e.g = g.g;
        e.g_from_tau = g.g_from_tau;
        e.gamma = g.gamma;
        for (const cover0::Pole& p : c.poles) e.g_offset -= (p.order() + 1) * std::log(double(p.order())) / 24.0;
        const cover0::FlatCoords0 flat = cover0::flat_coords(c);
        e.flat = Json{{"p", leaf(complex_json(flat.p), "unchecked")}, {"t", leaf(complex_json(flat.t), "unchecked")}};
    } else {
        const cover1::Model m(s.g1);
        const cover1::CriticalData1 crit = cover1::critical_data(m);
        e.data = cover1::canonical_data(m);
        for (const Complex z : e.data.points)
            e.residual = std::max(e.residual, std::abs(m.eval(z, 1)) / (1.0 + std::abs(m.eval(z, 2))));
        const cover1::TauProduct tp = cover1::tau_product(m, crit);
        e.log_tau = tp.log_tau;
        e.tau_m48 = tp.tau_m48;
        const cover1::TauResultant tr = cover1::tau_resultant(m, crit);
        e.route_b = tr.value;
        e.indicator = tr.kappa;
        const cover1::GFunction g = cover1::g_function(m, crit);
        e.g = g.g;
        e.g_from_tau = g.g_from_tau;
        e.gamma = g.gamma;
        e.g_literal = g.g_literal;
        e.gamma_literal = g.gamma_literal;
        const cover1::FlatCoords1 flat = cover1::flat_coords(s.g1);
        e.flat = Json{{"t0", leaf(complex_json(flat.t0), "unchecked")}, {"t", leaf(complex_json(flat.t), "unchecked")}};
    }
    return e;
}

std::unique_ptr<isomon::DeformationFamily> family(const CoveringSpec& s) {
    if (s.genus == 0) return std::make_unique<cover0::Family0>(s.g0);
    return std::make_unique<cover1::Family1>(s.g1);
}

double euler_closed_form(const CoveringSpec& s) {
    return s.genus == 0 ? cover0::euler_log_tau(s.profile) : cover1::euler_log_tau(s.profile);
}

double gamma_closed_form(const CoveringSpec& s) {
    return s.genus == 0 ? cover0::gamma_closed_form(s.profile) : cover1::gamma_closed_form(s.profile);
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double segment_distance(Complex p, Complex a, Complex b) {
    const Complex d = b - a;
    const double len2 = std::norm(d);
    const double t = len2 > 0.0 ? std::clamp(std::real(std::conj(d) * (p - a)) / len2, 0.0, 1.0) : 0.0;
    return std::abs(p - (a + t * d));
}

}  // namespace

Json analyze(const CoveringSpec& s) {
    const Evaluated e = evaluate(s);
    const isomon::CanonicalData& d = e.data;
    const isomon::IsomonodromyData iso = isomon::build_isomonodromy(d);

    const bool caustic = d.caustic_warning;
    const double discrepancy = iso.max_route_discrepancy();
    const bool routes_ok = discrepancy < route_tolerance(s.genus) && !caustic;
    const char* located = e.residual < 1e-9 && !caustic ? "checked" : "warned";
    const char* routes = routes_ok ? "checked" : "warned";

    Complex sum_h{}, euler{};
    for (Eigen::Index m = 0; m < iso.lambda.size(); ++m) {
        sum_h += iso.h_projective[m];
        euler += iso.lambda[m] * iso.h_projective[m];
    }
    const double h_scale = iso.h_projective.cwiseAbs().maxCoeff();
    const double euler_want = euler_closed_form(s);

    Json out;
    out["genus"] = s.genus;
    out["profile"] = s.profile;
    out["dimension"] = d.dimension();
    out["critical_points"] = leaf(complex_json(d.points), located);
    out["lambda"] = leaf(complex_json(d.lambda), located);
    out["fsq"] = leaf(complex_json(d.fsq), located);
    out["flat"] = e.flat;
    out["s_b"] = leaf(complex_json(d.sb), routes);
    out["s_w"] = leaf(complex_json(d.sw), routes);
    out["hamiltonians"] = Json{
        {"hamiltonian", leaf(vec_json(iso.h_hamiltonian), routes)},
        {"projective", leaf(vec_json(iso.h_projective), routes)},
        {"max_discrepancy", leaf(discrepancy, routes)},
        {"sum", leaf(complex_json(sum_h), std::abs(sum_h) < 1e-9 * h_scale ? "checked" : "warned")},
        {"euler", leaf(complex_json(euler),
                       std::abs(euler - euler_want) < 1e-8 * std::max(1.0, std::abs(euler_want)) ? "checked" : "warned")},
    };
    Json tau{{"route_a_log", leaf(complex_json(e.log_tau), "unchecked")},
             {"route_a_m48", leaf(complex_json(e.tau_m48), "unchecked")},
             {"route_b", leaf(complex_json(e.route_b), "unchecked")},
             {"ratio", leaf(complex_json(e.tau_m48 / e.route_b), "unchecked")}};
    if (s.genus == 0) tau["fg_ratio"] = leaf(e.fg_ratio ? complex_json(*e.fg_ratio) : Json(nullptr), "unchecked");
    out["log_tau"] = tau;

    // G from its closed form against log tau - (1/24) sum log f, compared modulo the branch of log tau
    const bool g_ok = std::abs(std::exp(24.0 * (e.g - e.g_from_tau - e.g_offset)) - 1.0) < 1e-9;
    Json g{{"g", leaf(complex_json(e.g), g_ok ? "checked" : "warned")},
           {"g_from_tau", leaf(complex_json(e.g_from_tau), g_ok ? "checked" : "warned")},
           {"gamma", leaf(complex_json(e.gamma), "unchecked")}};
    if (s.genus == 1) {
        g["g_literal"] = leaf(complex_json(*e.g_literal), "unchecked");
        g["gamma_literal"] = leaf(complex_json(*e.gamma_literal), "unchecked");
    }
    out["g_function"] = g;
    out["caustic"] = Json{
        {"warning", caustic},
        {"min_lambda_gap", leaf(d.min_lambda_gap, caustic ? "warned" : "checked")},
        {"min_point_gap", leaf(d.min_point_gap, caustic ? "warned" : "checked")},
        {"indicator", leaf(complex_json(e.indicator), "unchecked")},
    };
    return out;
}

std::vector<CheckLine> check(const CoveringSpec& s, const CheckOptions& opt) {
    const auto fam = family(s);
    isomon::FiniteDifferenceOptions fd;
    fd.relative_step = opt.fd_step;
    const isomon::LambdaDifferentiator diff(*fam, fd);
    const isomon::CanonicalData& d = diff.base();
    const isomon::IsomonodromyData iso = isomon::build_isomonodromy(d);
    const isomon::BergmannValues b = isomon::bergmann_values(d);
    const int m = d.dimension();

    std::vector<CheckLine> lines;
    const auto add = [&](std::string name, double error, std::string note = {}) {
        lines.push_back({std::move(name), error, opt.tol, error <= opt.tol, std::move(note)});
    };

    add("H: Hamiltonian sum = S_B/24", iso.max_route_discrepancy());
    const double h_scale = iso.h_projective.cwiseAbs().maxCoeff();
    add("sum of H_m = 0", std::abs(iso.h_projective.sum()) / h_scale);

    double tau_err = 0.0, t_err = 0.0, sigma_err = 0.0;
    double f_err = 0.0, f_scale = 0.0, h_err = 0.0, h_scale_r = 0.0;
    const double sw_scale = max_abs(d.sw);
    for (int k = 0; k < m; ++k) {
        tau_err = std::max(tau_err, std::abs(diff.log_derivative(isomon::tau_log_factors, k) - iso.h_projective[k]) / h_scale);
        t_err = std::max(t_err, std::abs(diff.log_derivative(isomon::wirtinger_log_factors, k) - d.sw[k]) / sw_scale);
        const auto df = diff.derivative([](const isomon::CanonicalData& x) { return x.f; }, k);
        for (int n = 0; n < m; ++n)
            if (n != k) {
                const Complex want = 0.5 * b.points(k, n) * d.f[k];
                f_err = std::max(f_err, std::abs(df[n] - want));
                f_scale = std::max(f_scale, std::abs(want));
            }
        if (!d.h.empty()) {
            const auto dh = diff.derivative([](const isomon::CanonicalData& x) { return x.h; }, k);
            for (std::size_t j = 0; j < d.h.size(); ++j) {
                const Complex want = 0.5 * b.infinity(k, j) * d.f[k];
                h_err = std::max(h_err, std::abs(dh[j] - want));
                h_scale_r = std::max(h_scale_r, std::abs(want));
            }
        }
        if (s.genus == 1) {
            const auto ds = diff.derivative([](const isomon::CanonicalData& x) { return std::vector{x.modulus}; }, k);
            sigma_err = std::max(sigma_err, rel(ds[0], kPi * kI * d.fsq[k]));
        }
    }
    add("tau system: d log tau / d lambda_k = H_k", tau_err);
    add(s.genus == 0 ? "T0: d T / d lambda_k = S_B" : "T1: d T / d lambda_k = S_W", t_err);
    if (m > 1)
        add("Rauch: d f_n / d lambda_m = b(P_m, P_n) f_m / 2", f_err / std::max(f_scale, 1e-300));
    else
        add("Rauch: d f_n / d lambda_m = b(P_m, P_n) f_m / 2", 0.0, "n/a");
    if (!d.h.empty())
        add("Rauch: d h_s / d lambda_m = b(P_m, inf_s) f_m / 2", h_err / std::max(h_scale_r, 1e-300));
    else
        add("Rauch: d h_s / d lambda_m = b(P_m, inf_s) f_m / 2", 0.0, "n/a");
    if (s.genus == 1) add("modulus: d sigma / d lambda_k = pi i f_k^2", sigma_err);
    add("E(G) = gamma", std::abs(diff.log_directional(isomon::g_log_factors, diff.euler_direction()) - gamma_closed_form(s)));

    // constancy along a seeded random segment in the family parameters
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::VectorXcd theta0 = fam->parameters();
    Eigen::VectorXcd dir(theta0.size());
    for (Eigen::Index j = 0; j < dir.size(); ++j) dir[j] = Complex(normal(rng), normal(rng));
    dir *= 0.02 * std::max(1.0, theta0.cwiseAbs().maxCoeff()) / dir.cwiseAbs().maxCoeff();
    double tau_drift = 0.0, l3_drift = 0.0;
    Complex tau0{}, fg0{};
    std::string note;
    try {
        for (int step = 0; step <= 20; ++step) {
            const Eigen::VectorXcd theta = theta0 + (step / 20.0) * dir;
            Complex ratio, fg{};
            if (s.genus == 0) {
                const cover0::Covering0 c = static_cast<const cover0::Family0&>(*fam).covering(theta);
                ratio = cover0::tau_product(c, cover0::critical_data(c)).tau_m48 / cover0::tau_resultant(c);
                if (!c.poles.empty()) fg = cover0::fg_resultant_ratio(c);
            } else {
                const cover1::Model mm(static_cast<const cover1::Family1&>(*fam).covering(theta));
                const cover1::CriticalData1 crit = cover1::critical_data(mm);
                ratio = cover1::tau_product(mm, crit).tau_m48 / cover1::tau_resultant(mm, crit).value;
            }
            if (step == 0) {
                tau0 = ratio;
                fg0 = fg;
            }
            tau_drift = std::max(tau_drift, rel(ratio, tau0));
            if (s.genus == 0 && !s.g0.poles.empty()) l3_drift = std::max(l3_drift, rel(fg, fg0));
        }
    } catch (const Error& e) {
        tau_drift = l3_drift = INFINITY;
        note = e.what();
    }
    if (s.genus == 0) {
        if (s.g0.poles.empty())
            add("R(f,g) ratio drift", 0.0, "n/a");
        else
            add("R(f,g) ratio drift", l3_drift, note);
    }
    add(s.genus == 0 ? "route A / route B (resultant) drift" : "route A / route B (elliptic resultant) drift", tau_drift,
        note);
    return lines;
}

SweepResult sweep(const CoveringSpec& spec, const SweepOptions& opt) {
    if (opt.steps < 1) throw SpecError("--steps must be positive");
    const Complex start = spec.get(opt.param);
    SweepResult out;
    CoveringSpec s = spec;

    // what the swept parameter can run into between two steps
    const auto parts = [&] {
        std::vector<std::string> p;
        std::stringstream ss(opt.param);
        for (std::string x; std::getline(ss, x, '.');) p.push_back(x);
        return p;
    }();
    const bool is_b = parts.size() == 3 && parts[0] == "poles" && parts[2] == "b";
    const bool is_tail = parts.size() == 4 && parts[0] == "poles" && parts[2] == "c";
    const std::size_t pole = parts.size() >= 2 && parts[0] == "poles" ? std::stoul(parts[1]) : 0;
    const auto crossing = [&](Complex a, Complex b) -> std::string {
        const double guard = 1e-8 * std::max({1.0, std::abs(a), std::abs(b)});
        if (is_b) {
            const std::size_t n = s.genus == 0 ? s.g0.poles.size() : s.g1.poles.size();
            for (std::size_t j = 0; j < n; ++j) {
                if (j == pole) continue;
                const Complex other = s.genus == 0 ? s.g0.poles[j].b : s.g1.poles[j].b;
                const int span = s.genus == 0 ? 0 : 2;
                for (int u = -span; u <= span; ++u)
                    for (int v = -span; v <= span; ++v)
                        if (segment_distance(other + double(u) + double(v) * s.g1.sigma, a, b) < guard)
                            return str("S1: pole ", pole, " meets pole ", j);
            }
        }
        if (is_tail) {
            const std::size_t k = s.genus == 0 ? s.g0.poles[pole].tail.size() : s.g1.poles[pole].tail.size();
            if (std::stoul(parts[3]) + 1 == k && segment_distance(0.0, a, b) < guard)
                return str("S2: top coefficient of pole ", pole, " vanishes");
        }
        return {};
    };

    Complex tau0{}, fg0{};
    for (int step = 0; step <= opt.steps; ++step) {
        const Complex value = start + (opt.to - start) * (static_cast<double>(step) / opt.steps);
        if (step > 0) {
            const Complex prev = start + (opt.to - start) * (static_cast<double>(step - 1) / opt.steps);
            if (const std::string why = crossing(prev, value); !why.empty()) {
                out.left_space = true;
                out.offending_step = step;
                out.reason = why;
                return out;
            }
        }
        s.set(opt.param, value);
        SweepStep row;
        row.step = step;
        row.value = value;
        try {
            if (s.genus == 0) {
                cover0::validate(s.g0);
                const cover0::CriticalData0 crit = cover0::critical_data(s.g0);
                if (crit.caustic_warning) throw Error(ErrorKind::Coincident, "caustic: critical values collide");
                row.tau_ratio = cover0::tau_product(s.g0, crit).tau_m48 / cover0::tau_resultant(s.g0);
                if (!s.g0.poles.empty()) row.fg_ratio = cover0::fg_resultant_ratio(s.g0);
            } else {
                cover1::validate(s.g1);
                const cover1::Model m(s.g1);
                const cover1::CriticalData1 crit = cover1::critical_data(m);
                if (crit.caustic_warning) throw Error(ErrorKind::Coincident, "caustic: critical values collide");
                row.tau_ratio = cover1::tau_product(m, crit).tau_m48 / cover1::tau_resultant(m, crit).value;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OnBoundary && e.kind() != ErrorKind::InvalidInput &&
                e.kind() != ErrorKind::Coincident && e.kind() != ErrorKind::CommonRoot)
                throw;
            out.left_space = true;
            out.offending_step = step;
            out.reason = e.what();
            return out;
        }
        if (step == 0) {
            tau0 = row.tau_ratio;
            if (row.fg_ratio) fg0 = *row.fg_ratio;
        }
        out.tau_drift = std::max(out.tau_drift, rel(row.tau_ratio, tau0));
        if (row.fg_ratio) out.fg_drift = std::max(out.fg_drift, rel(*row.fg_ratio, fg0));
        out.steps.push_back(row);
    }
    return out;
}

}  // namespace hurwitz::cli
