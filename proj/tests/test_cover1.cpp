#include <doctest.h>

#include <cmath>
#include <random>

#include "hurwitz/cover1.hpp"
#include "hurwitz/errors.hpp"
#include "instances.hpp"
#include "support.hpp"

using namespace hurwitz;
using namespace hurwitz::cover1;
using testing::rel_err;

namespace {

const std::vector<std::vector<int>> kProfiles = {{2}, {1, 1}, {2, 1}};

Covering1 weierstrass_covering(Complex sigma, Complex a, Complex c, Complex b) {
    // p = a + c zeta'(z - b) = a - c wp(z - b)
    Covering1 cov;
    cov.sigma = sigma;
    cov.a = a;
    cov.poles = {{b, {0.0, c}}};
    return cov;
}

double critical_radius(const Model& m, const CriticalData1& crit, std::size_t i) {
    const auto& ctx = m.context();
    double d = 0.5;
    for (std::size_t n = 0; n < crit.z.size(); ++n)
        if (n != i) d = std::min(d, ctx.lattice_distance(crit.z[n] - crit.z[i]));
    for (const Pole& p : m.covering().poles) d = std::min(d, ctx.lattice_distance(p.b - crit.z[i]));
    return 0.3 * d;
}

}  // namespace

TEST_CASE("validate") {
    Covering1 c = weierstrass_covering({0.0, 1.1}, 0.0, 1.0, 0.3);
    CHECK(validate(c).dimension == 3);
    c.poles.push_back({c.poles[0].b + 1.0, {0.5}});
    c.poles.push_back({0.7, {-0.5}});
    try {
        validate(c);
        FAIL("expected S1");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OnBoundary);
    }
    c.poles.pop_back();
    c.poles[1].b = 0.9;
    CHECK_THROWS_AS(validate(c), Error);  // residues do not cancel
    c.poles[0].tail = {0.0, 0.0};
    c.poles.pop_back();
    try {
        validate(c);
        FAIL("expected S2");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OnBoundary);
    }
}

TEST_CASE("evaluation") {
    std::mt19937_64 rng(2);
    for (const auto& profile : kProfiles) {
        const Model m(testing::random_covering1(rng, profile));
        const Complex sigma = m.covering().sigma;
        const auto pole_distance = [&](Complex z) {
            double d = 1e300;
            for (const Pole& p : m.covering().poles) d = std::min(d, m.context().lattice_distance(z - p.b));
            return d;
        };
        for (int s = 0; s < 10; ++s) {
            Complex z = testing::random_complex(rng, 0.6);
            while (pole_distance(z) < 0.2) z = testing::random_complex(rng, 0.6);
            for (int n = 0; n <= 2; ++n) {
                CHECK(rel_err(m.eval(z + 1.0, n), m.eval(z, n)) < 1e-10);
                CHECK(rel_err(m.eval(z + sigma, n), m.eval(z, n)) < 1e-10);
            }
            const double h = 1e-5;
            CHECK(rel_err((m.eval(z + h) - m.eval(z - h)) / (2 * h), m.eval(z, 1)) < 1e-7);
            // higher orders against Cauchy integrals of the order below
            const double r = 0.3 * pole_distance(z);
            for (int n = 1; n <= 3; ++n) {
                Complex cauchy{};
                for (int j = 0; j < 64; ++j) {
                    const Complex u = std::polar(1.0, 2.0 * kPi * j / 64);
                    cauchy += m.eval(z + r * u, n) / (64.0 * r * u);
                }
                CHECK(rel_err(cauchy, m.eval(z, n + 1)) < 1e-9);
            }
        }
        for (const Pole& p : m.covering().poles) {
            const int k = p.order();
            const double sign = (k - 1) % 2 ? -1.0 : 1.0;
            const Complex want = sign * std::tgamma(k) * p.top();
            // Laurent limit, extrapolated from two radii
            const Complex u = std::polar(1.0, 0.4);
            const Complex l1 = ipow(1e-4 * u, k) * m.eval(p.b + 1e-4 * u);
            const Complex l2 = ipow(5e-5 * u, k) * m.eval(p.b + 5e-5 * u);
            CHECK(rel_err(2.0 * l2 - l1, want) < 1e-6);
        }
        CHECK_THROWS_AS(m.eval(m.covering().poles[0].b + 1e-10), Error);
    }
}

TEST_CASE("critical points of the Weierstrass covering") {
    const Complex sigma{0.1, 1.05}, a{0.3, -0.2}, c{0.8, 0.3}, b{0.25, 0.4};
    const Model m(weierstrass_covering(sigma, a, c, b));
    const CriticalData1 crit = critical_data(m);
    REQUIRE(crit.z.size() == 3);
    const auto& ctx = m.context();
    const std::vector<Complex> half = {0.5, sigma / 2.0, (1.0 + sigma) / 2.0};
    for (const Complex w : half) {
        CHECK(std::abs(ctx.wp(w, 1)) < 1e-9);
        double best = 1.0;
        std::size_t at = 0;
        for (std::size_t i = 0; i < 3; ++i)
            if (ctx.lattice_distance(crit.z[i] - b - w) < best) {
                best = ctx.lattice_distance(crit.z[i] - b - w);
                at = i;
            }
        CHECK(best < 1e-10);
        CHECK(rel_err(crit.lambda[at], a - c * ctx.wp(w)) < 1e-10);
    }
    // shifting a moves no critical point and shifts every lambda
    Covering1 shifted = m.covering();
    shifted.a += Complex(0.5, 0.5);
    const CriticalData1 moved = critical_data(Model(shifted));
    for (std::size_t i = 0; i < 3; ++i) {
        double best = 1.0;
        for (std::size_t j = 0; j < 3; ++j) best = std::min(best, ctx.lattice_distance(moved.z[j] - crit.z[i]));
        CHECK(best < 1e-10);
    }
}

TEST_CASE("critical data on random coverings") {
    std::mt19937_64 rng(4);
    for (const auto& profile : kProfiles)
        for (int rep = 0; rep < 3; ++rep) {
            const Model m(testing::separated_covering1(rng, profile));
            const CriticalData1 crit = critical_data(m);
            REQUIRE(int(crit.z.size()) == m.covering().dimension());
            const Complex shift = 24.0 * kPi * kI * m.context().eta_tilde();
            for (std::size_t i = 0; i < crit.z.size(); ++i) {
                CHECK(std::abs(m.eval(crit.z[i], 1)) < 1e-9 * (1.0 + std::abs(m.eval(crit.z[i], 2))));
                CHECK(std::abs(crit.sw[i] - crit.sb[i] - shift * crit.fsq[i]) < 1e-10 * std::abs(crit.sw[i]));
                const auto inv =
                    testing::local_inverse([&](Complex z) { return m.eval(z); },
                                           [&](Complex z) { return m.eval(z, 1); }, crit.z[i],
                                           critical_radius(m, crit, i));
                CHECK(rel_err(inv.schwarzian, crit.sw[i]) < 1e-5);
                CHECK(rel_err(inv.a1 * inv.a1, crit.fsq[i]) < 1e-8);
            }
        }
}

TEST_CASE("Bergman connection from the kernel") {
    // S_B / 6 is the constant term of H(x, -x) = B(x, -x)/(dx dx) - 1/(2x)^2 at the critical point, taken as
    // the mean over a circle |x| = rho, with z(x) continued along the circle
    std::mt19937_64 rng(6);
    for (const auto& profile : kProfiles) {
        const Model m(testing::separated_covering1(rng, profile));
        const CriticalData1 crit = critical_data(m);
        const auto d = canonical_data(m);
        for (std::size_t i = 0; i < crit.z.size(); ++i) {
            double gap = 1e300;
            for (std::size_t n = 0; n < crit.z.size(); ++n)
                if (n != i) gap = std::min(gap, std::abs(crit.lambda[n] - crit.lambda[i]));
            const double rho = 0.5 * std::sqrt(gap);
            const auto newton = [&](Complex z, Complex x) {
                for (int it = 0; it < 30; ++it) z -= (m.eval(z) - crit.lambda[i] - x * x) / m.eval(z, 1);
                return z;
            };
            const Complex f = std::sqrt(crit.fsq[i]);
            Complex zp = crit.z[i], zm = crit.z[i];
            for (int t = 1; t <= 40; ++t) {
                const double x = rho * t / 40.0;
                zp = newton(zp + f * (rho / 40.0), x);
                zm = newton(zm - f * (rho / 40.0), -x);
            }
            const int samples = 128;
            Complex mean{};
            for (int j = 0; j < samples; ++j) {
                const Complex x = rho * std::polar(1.0, 2.0 * kPi * j / samples);
                zp = newton(zp, x);
                zm = newton(zm, -x);
                const Complex dp = 2.0 * x / m.eval(zp, 1), dm = -2.0 * x / m.eval(zm, 1);
                mean += (d.kernel(zp, zm) * dp * dm - 1.0 / (4.0 * x * x)) / double(samples);
            }
            CHECK(rel_err(6.0 * mean, crit.sb[i]) < 1e-6);
        }
    }
}

TEST_CASE("flat coordinates") {
    Covering1 c = weierstrass_covering({0.0, 1.2}, 0.0, {4.0, 0.0}, 0.2);
    CHECK(std::abs(flat_coords(c).t[0] - Complex(0.0, 2.0)) < 1e-14);
    c.poles = {{0.2, {3.0}}, {0.6, {-3.0}}};
    const FlatCoords1 flat = flat_coords(c);
    CHECK(std::abs(flat.t[0] - 3.0) < 1e-15);
    CHECK(flat.t0 == Complex(0.0, 1.2));

    // h_s against the numerical derivative of the local inverse z(zeta), lambda = zeta^{-k}
    std::mt19937_64 rng(8);
    for (const auto& profile : kProfiles) {
        const Model m(testing::random_covering1(rng, profile));
        const FlatCoords1 fl = flat_coords(m.covering());
        for (std::size_t s = 0; s < fl.t.size(); ++s) {
            const Pole& p = m.covering().poles[s];
            const int k = p.order();
            const auto z_of = [&](double zeta) {
                Complex z = p.b + fl.t[s] * zeta;
                for (int it = 0; it < 60; ++it) {
                    const Complex step = (m.eval(z) - std::pow(zeta, -k)) / m.eval(z, 1);
                    z -= step;
                    if (std::abs(step) < 1e-17) break;
                }
                return z;
            };
            const double zeta = 1e-3;
            const Complex d1 = (z_of(zeta) - z_of(-zeta)) / (2 * zeta);
            const Complex d2 = (z_of(zeta / 2) - z_of(-zeta / 2)) / zeta;
            CHECK(rel_err((4.0 * d2 - d1) / 3.0, fl.t[s]) < 1e-6);
        }
    }
}

TEST_CASE("Hamiltonians and the Euler field") {
    std::mt19937_64 rng(10);
    for (const auto& profile : kProfiles)
        for (int rep = 0; rep < 3; ++rep) {
            const Model m(testing::separated_covering1(rng, profile));
            const auto data = isomon::build_isomonodromy(canonical_data(m));
            CHECK(data.max_route_discrepancy() < 1e-6);
            CHECK(std::abs(data.h_projective.sum()) / data.h_projective.cwiseAbs().maxCoeff() < 1e-9);
            Complex euler{};
            for (Eigen::Index i = 0; i < data.lambda.size(); ++i) euler += data.lambda[i] * data.h_projective[i];
            CHECK(std::abs(euler - euler_log_tau(profile)) < 1e-8);
        }
}

TEST_CASE("tau routes along sweeps") {
    std::mt19937_64 rng(12);
    for (const auto& profile : kProfiles) {
        const Covering1 base = testing::separated_covering1(rng, profile);
        const Family1 fam(base);
        const Eigen::VectorXcd theta0 = fam.parameters();
        Eigen::VectorXcd dir(theta0.size());
        for (Eigen::Index j = 0; j < dir.size(); ++j) dir[j] = testing::random_complex(rng, 0.02);
        Complex ratio0{};
        double drift = 0.0;
        for (int step = 0; step <= 20; ++step) {
            const Model m(fam.covering(theta0 + (step / 20.0) * dir));
            const CriticalData1 crit = critical_data(m);
            const Complex ratio = tau_product(m, crit).tau_m48 / tau_resultant(m, crit).value;
            if (step == 0) ratio0 = ratio;
            drift = std::max(drift, rel_err(ratio, ratio0));
        }
        CHECK(drift < 1e-7);
    }
}

TEST_CASE("route B under change of representatives") {
    std::mt19937_64 rng(14);
    const Covering1 c = testing::separated_covering1(rng, {2, 1});
    Covering1 moved = c;
    moved.poles[1].b += 1.0 + c.sigma;
    const Model m0(c), m1(moved);
    const CriticalData1 a = critical_data(m0), b = critical_data(m1);
    CHECK(rel_err(tau_resultant(m1, b).value, tau_resultant(m0, a).value) < 1e-9);
    CHECK(rel_err(tau_product(m1, b).tau_m48, tau_product(m0, a).tau_m48) < 1e-9);
}

TEST_CASE("tau differential system, modulus flow and Rauch") {
    std::mt19937_64 rng(16);
    for (const auto& profile : kProfiles) {
        const Covering1 c = testing::separated_covering1(rng, profile);
        const Family1 fam(c);
        const isomon::LambdaDifferentiator diff(fam);
        const isomon::CanonicalData& d = diff.base();
        const isomon::BergmannValues b = isomon::bergmann_values(d);
        for (int k = 0; k < d.dimension(); ++k) {
            INFO("profile size " << profile.size() << " k " << k);
            CHECK(rel_err(24.0 * diff.log_derivative(isomon::tau_log_factors, k), d.sb[k]) < 1e-5);
            CHECK(rel_err(diff.log_derivative(isomon::wirtinger_log_factors, k), d.sw[k]) < 1e-5);
            const auto ds = diff.derivative([](const isomon::CanonicalData& x) { return std::vector{x.modulus}; }, k);
            CHECK(rel_err(ds[0], kPi * kI * d.fsq[k]) < 1e-5);
            const auto df = diff.derivative([](const isomon::CanonicalData& x) { return x.f; }, k);
            for (int n = 0; n < d.dimension(); ++n)
                if (n != k) CHECK(rel_err(df[n], 0.5 * b.points(k, n) * d.f[k]) < 1e-5);
            const auto dh = diff.derivative([](const isomon::CanonicalData& x) { return x.h; }, k);
            for (std::size_t s = 0; s < d.h.size(); ++s)
                CHECK(rel_err(dh[s], 0.5 * b.infinity(k, s) * d.f[k]) < 1e-5);
        }
        const Complex eg = diff.log_directional(isomon::g_log_factors, diff.euler_direction());
        CHECK(std::abs(eg - gamma_closed_form(profile)) < 1e-5);
        CHECK(std::abs(diff.log_directional(isomon::tau_log_factors, diff.unit_direction())) < 1e-6);
    }
}

TEST_CASE("G in the modulus") {
    std::mt19937_64 rng(18);
    const Covering1 c = testing::separated_covering1(rng, {2, 1});
    const auto g_at = [&](Complex sigma) {
        Covering1 x = c;
        x.sigma = sigma;
        const Model m(x);
        return g_function(m, critical_data(m)).g;
    };
    const double h = 1e-4;
    const Complex dg = (8.0 * (g_at(c.sigma + h) - g_at(c.sigma - h)) - (g_at(c.sigma + 2 * h) - g_at(c.sigma - 2 * h))) /
                       (12.0 * h);
    CHECK(rel_err(dg, -Model(c).context().eta_tilde()) < 1e-6);

    // h = 1 on H_{1,N}(N): G = -log eta
    for (int n = 2; n <= 3; ++n) {
        Covering1 x;
        x.sigma = Complex(0.05, 1.1);
        std::vector<Complex> tail(n, 0.1);
        tail[0] = 0.0;
        tail.back() = ((n - 1) % 2 ? -1.0 : 1.0) / std::tgamma(n);
        x.poles = {{0.3, tail}};
        const Model m(x);
        CHECK(std::abs(flat_coords(x).t[0] - 1.0) < 1e-15);
        CHECK(std::abs(g_function(m, critical_data(m)).g + elliptic::log_dedekind_eta(m.context().modulus())) < 1e-12);
    }
}

TEST_CASE("H_{1,2}(2) invariant") {
    const auto invariant = [](Complex sigma, Complex c) {
        const Model m(weierstrass_covering(sigma, {0.2, 0.1}, c, {0.3, 0.2}));
        const CriticalData1 crit = critical_data(m);
        const Complex t1 = flat_coords(m.covering()).t[0];
        const Complex eta = elliptic::dedekind_eta(m.context().modulus());
        return tau_product(m, crit).tau_m48 / (ipow(t1, 12) * ipow(eta, 72));
    };
    const Complex ref = invariant({0.05, 1.1}, {0.7, 0.2});
    double drift = 0.0;
    for (int step = 0; step <= 20; ++step) {
        const double s = step / 20.0;
        drift = std::max(drift, rel_err(invariant({0.05, 1.1}, Complex(0.7, 0.2) + s * Complex(0.4, -0.6)), ref));
        drift = std::max(drift, rel_err(invariant(Complex(0.05, 1.1) + s * Complex(0.3, 0.25), {0.7, 0.2}), ref));
    }
    CHECK(drift < 1e-6);
}

TEST_CASE("kappa along a collision path") {
    std::mt19937_64 rng(20);
    // on (2) and (1,1) the critical points sit at half-period translates and never meet
    for (const std::vector<int> profile : {std::vector{2, 1}, std::vector{3}, std::vector{2, 2}}) {
        const Covering1 c = testing::separated_covering1(rng, profile);
        int found = 0;
        for (int param = 0; param < Family1(c).parameters().size(); ++param) {
            try {
                const isomon::CollisionPath path = collision_path(c, param);
                INFO(path.parameter << " order " << path.order << " residual " << path.fit_residual);
                CHECK(path.order > path.expected_lower_bound - 0.05);
                CHECK(std::abs(path.order - 1.0) < 0.05);
                ++found;
            } catch (const Error& e) {
                MESSAGE(std::string(e.what()));
            }
        }
        CHECK(found > 0);
    }
}

TEST_CASE("route B under relabelling") {
    std::mt19937_64 rng(22);
    const Model m(testing::separated_covering1(rng, {2, 1}));
    CriticalData1 crit = critical_data(m);
    const Complex v0 = tau_resultant(m, crit).value;
    std::reverse(crit.z.begin(), crit.z.end());
    CHECK(rel_err(tau_resultant(m, crit).value, v0) < 1e-10);
    std::rotate(crit.z.begin(), crit.z.begin() + 1, crit.z.end());
    CHECK(rel_err(tau_resultant(m, crit).value, v0) < 1e-10);
}
