#include <doctest.h>

#include <cmath>
#include <random>

#include "hurwitz/cover0.hpp"
#include "hurwitz/errors.hpp"
#include "instances.hpp"
#include "support.hpp"

using namespace hurwitz;
using namespace hurwitz::cover0;
using testing::match_sets;
using testing::rel_err;

namespace {

const std::vector<std::vector<int>> kProfiles = {{3}, {2, 1}, {2, 2}, {3, 2}, {2, 1, 1}};

Covering0 a2() { return Covering0::polynomial({0.0, -3.0}); }

// Instances whose critical values and points are comfortably apart.
double critical_radius(const Covering0& c, const CriticalData0& crit, std::size_t m) {
    double d = 1.0;
    for (std::size_t n = 0; n < crit.alpha.size(); ++n)
        if (n != m) d = std::min(d, std::abs(crit.alpha[n] - crit.alpha[m]));
    for (const Pole& p : c.poles) d = std::min(d, std::abs(p.b - crit.alpha[m]));
    return 0.3 * d;
}

}  // namespace

TEST_CASE("validate") {
    const Diagnostics d = validate(a2());
    CHECK(d.dimension == 2);

    Covering0 c;
    c.k1 = 1;
    c.poles = {{0.5, {1.0}}, {0.5, {2.0}}};
    CHECK_THROWS_AS(validate(c), Error);
    try {
        validate(c);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OnBoundary);
        CHECK(std::string(e.what()).find("S1") != std::string::npos);
    }
    c.poles = {{0.5, {1.0, 0.0}}};
    try {
        validate(c);
        FAIL("expected S2");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OnBoundary);
        CHECK(std::string(e.what()).find("S2") != std::string::npos);
    }
    c.poly_coeffs = {1.0};
    CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("p' as a ratio") {
    auto [f, g] = p_prime_as_ratio(a2());
    CHECK(f.degree() == 2);
    CHECK(std::abs(f[0] + 3.0) < 1e-15);
    CHECK(std::abs(f[2] - 3.0) < 1e-15);
    CHECK(g.degree() == 0);

    const Complex b{0.3, -0.2}, cc{1.5, 0.5};
    Covering0 one;
    one.k1 = 1;
    one.poles = {{b, {cc}}};
    std::tie(f, g) = p_prime_as_ratio(one);
    const poly::CPoly want_f = poly::CPoly{-b, 1.0}.pow(2) - poly::CPoly::constant(cc);
    for (int i = 0; i <= 2; ++i) CHECK(std::abs(f[i] - want_f[i]) < 1e-14);
    CHECK(std::abs(g[0] - b * b) < 1e-14);

    std::mt19937_64 rng(7);
    for (const auto& profile : kProfiles) {
        const Covering0 c = testing::random_covering0(rng, profile);
        std::tie(f, g) = p_prime_as_ratio(c);
        CHECK(f.degree() == c.dimension());
        CHECK(std::abs(f.leading() - double(c.k1)) < 1e-12);
        for (int s = 0; s < 20; ++s) {
            const Complex z = testing::random_complex(rng, 1.5);
            const double h = 1e-5;
            const Complex fd = (c.eval(z + h) - c.eval(z - h)) / (2 * h);
            CHECK(rel_err(f(z) / g(z), fd) < 1e-7);
        }
    }
}

TEST_CASE("A2 critical data") {
    const CriticalData0 crit = critical_data(a2());
    CHECK(match_sets(crit.alpha, {1.0, -1.0}) < 1e-14);
    for (std::size_t m = 0; m < 2; ++m) {
        const double s = crit.alpha[m].real() > 0 ? 1.0 : -1.0;
        CHECK(std::abs(crit.lambda[m] + 2.0 * s) < 1e-13);
        CHECK(std::abs(crit.fsq[m] - s / 3.0) < 1e-14);
        CHECK(std::abs(crit.sb[m] - s / 12.0) < 1e-14);
    }
    // independent expansion of the local inverse
    const Covering0 c = a2();
    for (std::size_t m = 0; m < 2; ++m) {
        const auto inv = testing::local_inverse([&](Complex z) { return c.eval(z); },
                                                [&](Complex z) { return c.eval(z, 1); }, crit.alpha[m], 0.5);
        CHECK(rel_err(inv.a1 * inv.a1, crit.fsq[m]) < 1e-12);
        CHECK(rel_err(inv.schwarzian, crit.sb[m]) < 1e-10);
    }
}

TEST_CASE("critical data on random coverings") {
    std::mt19937_64 rng(11);
    for (const auto& profile : kProfiles)
        for (int rep = 0; rep < 4; ++rep) {
            const Covering0 c = testing::separated_covering0(rng, profile);
            const CriticalData0 crit = critical_data(c);
            REQUIRE(int(crit.alpha.size()) == c.dimension());
            for (std::size_t m = 0; m < crit.alpha.size(); ++m) {
                CHECK(std::abs(c.eval(crit.alpha[m], 1)) < 1e-10 * (1 + std::abs(c.eval(crit.alpha[m], 2))));
                CHECK(std::abs(crit.fsq[m] * c.eval(crit.alpha[m], 2) - 2.0) < 1e-12);
                const auto inv =
                    testing::local_inverse([&](Complex z) { return c.eval(z); },
                                           [&](Complex z) { return c.eval(z, 1); }, crit.alpha[m],
                                           critical_radius(c, crit, m));
                CHECK(rel_err(inv.schwarzian, crit.sb[m]) < 1e-5);
            }
        }
}

TEST_CASE("common root and caustic") {
    Covering0 c;
    c.k1 = 1;
    c.poles = {{0.0, {1.0, 0.0, 1e-300}}};
    // f and g share the root at b when the tail top underflows
    CHECK_THROWS_AS(critical_data(c), Error);

    const Covering0 cube = Covering0::polynomial({0.0, 0.0});
    const CriticalData0 crit = critical_data(cube);
    CHECK(crit.caustic_warning);
    CHECK(tau_resultant(cube) == 0.0);
}

TEST_CASE("Schwarzian scales with lambda") {
    std::mt19937_64 rng(3);
    for (const auto& profile : kProfiles) {
        const Covering0 c = testing::separated_covering0(rng, profile);
        const Complex s{0.7, 0.4};
        const int k1 = c.k1;
        Covering0 scaled = c;
        for (std::size_t r = 0; r < c.poly_coeffs.size(); ++r) scaled.poly_coeffs[r] *= ipow(s, k1 - int(r));
        for (Pole& p : scaled.poles) {
            p.b *= s;
            for (int a = 1; a <= p.order(); ++a) p.tail[a - 1] *= ipow(s, k1 + a);
        }
        const CriticalData0 c0 = critical_data(c), c1 = critical_data(scaled);
        for (std::size_t m = 0; m < c0.alpha.size(); ++m) {
            std::size_t n = 0;
            for (std::size_t j = 1; j < c1.alpha.size(); ++j)
                if (std::abs(c1.alpha[j] - s * c0.alpha[m]) < std::abs(c1.alpha[n] - s * c0.alpha[m])) n = j;
            CHECK(rel_err(c1.sb[n] * ipow(s, k1), c0.sb[m]) < 1e-9);
            CHECK(rel_err(c1.lambda[n], ipow(s, k1) * c0.lambda[m]) < 1e-9);
        }
    }
}

TEST_CASE("flat coordinates") {
    Covering0 c;
    c.k1 = 2;
    c.poly_coeffs = {0.0};
    c.poles = {{1.0, {5.0}}, {-1.0, {0.0, 4.0}}, {3.0, {0.0, 0.0, -8.0}}};
    const FlatCoords0 flat = flat_coords(c);
    CHECK(std::abs(flat.t[0] - 5.0) < 1e-15);
    CHECK(std::abs(flat.t[1] - 4.0) < 1e-15);
    CHECK(std::abs(flat.t[2] - 6.0 * std::polar(1.0, kPi / 3)) < 1e-14);
    CHECK(std::abs(flat.t_power[2] - ipow(flat.t[2], 3)) < 1e-12);
    CHECK(flat.p[1] == Complex(-1.0));
}

TEST_CASE("tau routes") {
    const Covering0 c = a2();
    const CriticalData0 crit = critical_data(c);
    CHECK(std::abs(std::abs(tau_product(c, crit).tau_m48) - 9.0) < 1e-12);

    std::mt19937_64 rng(5);
    for (const auto& profile : kProfiles) {
        const Covering0 base = testing::separated_covering0(rng, profile);
        // sweep every parameter along a short random segment
        Family0 fam(base);
        const Eigen::VectorXcd theta0 = fam.parameters();
        Eigen::VectorXcd dir(theta0.size());
        for (Eigen::Index j = 0; j < dir.size(); ++j) dir[j] = testing::random_complex(rng, 0.02);
        Complex ratio0{}, fg0{};
        double drift = 0.0, fg_drift = 0.0;
        for (int step = 0; step <= 20; ++step) {
            const Covering0 x = fam.covering(theta0 + (step / 20.0) * dir);
            const Complex a = tau_product(x, critical_data(x)).tau_m48;
            const Complex ratio = a / tau_resultant(x);
            const Complex fg = fg_resultant_ratio(x);
            if (step == 0) {
                ratio0 = ratio;
                fg0 = fg;
            }
            drift = std::max(drift, rel_err(ratio, ratio0));
            fg_drift = std::max(fg_drift, rel_err(fg, fg0));
        }
        INFO("profile size " << profile.size() << " k1 " << profile[0]);
        CHECK(drift < 1e-8);
        CHECK(fg_drift < 1e-8);
    }
}

TEST_CASE("translation") {
    std::mt19937_64 rng(9);
    const Covering0 c = testing::separated_covering0(rng, {1, 2, 1});
    Covering0 shifted = c;
    for (Pole& p : shifted.poles) p.b += 1.0;
    const CriticalData0 a = critical_data(c), b = critical_data(shifted);
    for (std::size_t m = 0; m < a.alpha.size(); ++m) {
        std::size_t n = 0;
        for (std::size_t j = 1; j < b.alpha.size(); ++j)
            if (std::abs(b.alpha[j] - a.alpha[m] - 1.0) < std::abs(b.alpha[n] - a.alpha[m] - 1.0)) n = j;
        CHECK(std::abs(b.lambda[n] - a.lambda[m] - 1.0) < 1e-10);
        CHECK(rel_err(b.sb[n], a.sb[m]) < 1e-10);
        CHECK(rel_err(b.fsq[n], a.fsq[m]) < 1e-10);
    }
    CHECK(rel_err(tau_product(shifted, b).tau_m48, tau_product(c, a).tau_m48) < 1e-9);
    CHECK(rel_err(tau_resultant(shifted), tau_resultant(c)) < 1e-9);
}

TEST_CASE("Hamiltonians") {
    const isomon::IsomonodromyData a = isomon::build_isomonodromy(canonical_data(a2()));
    for (int m = 0; m < 2; ++m) {
        const double s = a.lambda[m].real() < 0 ? 1.0 : -1.0;
        CHECK(std::abs(a.h_projective[m] - s / 288.0) < 1e-15);
        CHECK(std::abs(a.h_hamiltonian[m] - s / 288.0) < 1e-15);
    }

    std::mt19937_64 rng(21);
    for (const auto& profile : kProfiles)
        for (int rep = 0; rep < 4; ++rep) {
            const Covering0 c = testing::separated_covering0(rng, profile);
            const isomon::IsomonodromyData d = isomon::build_isomonodromy(canonical_data(c));
            CHECK(d.max_route_discrepancy() < 1e-8);
            CHECK(std::abs(d.h_projective.sum()) / d.h_projective.cwiseAbs().maxCoeff() < 1e-9);
            Complex euler{};
            for (Eigen::Index m = 0; m < d.lambda.size(); ++m) euler += d.lambda[m] * d.h_projective[m];
            CHECK(std::abs(euler - euler_log_tau(profile)) < 1e-9);
        }
}

TEST_CASE("tau differential system and G") {
    std::mt19937_64 rng(33);
    for (const auto& profile : kProfiles) {
        const Covering0 c = testing::separated_covering0(rng, profile);
        const Family0 fam(c);
        const isomon::LambdaDifferentiator diff(fam);
        const isomon::CanonicalData& d = diff.base();
        for (int k = 0; k < d.dimension(); ++k) {
            const Complex dlog = diff.log_derivative(isomon::tau_log_factors, k);
            CHECK(rel_err(24.0 * dlog, d.sb[k]) < 1e-6);
            const auto dl = diff.derivative([](const isomon::CanonicalData& x) { return x.lambda; }, k);
            for (int j = 0; j < d.dimension(); ++j) CHECK(std::abs(dl[j] - (j == k ? 1.0 : 0.0)) < 1e-7);
        }
        const Complex eg = diff.log_directional(isomon::g_log_factors, diff.euler_direction());
        CHECK(std::abs(eg - gamma_closed_form(profile)) < 1e-6);
        const Complex unit = diff.log_directional(isomon::tau_log_factors, diff.unit_direction());
        CHECK(std::abs(unit) < 1e-7);

        const GFunction g = g_function(c, critical_data(c));
        Complex offset{};
        for (const Pole& p : c.poles) offset -= (p.order() + 1) * std::log(double(p.order())) / 24.0;
        CHECK(std::abs(g.g - g.g_from_tau - offset) < 1e-12);
    }
}

TEST_CASE("polynomial coverings have trivial G") {
    for (int n = 3; n <= 5; ++n) {
        std::vector<Complex> coeffs(n - 1);
        coeffs[0] = 0.3;
        coeffs[1] = -1.0;
        const Covering0 c = Covering0::polynomial(coeffs);
        const GFunction g = g_function(c, critical_data(c));
        CHECK(g.g == 0.0);
        CHECK(std::abs(g.gamma) < 1e-15);
    }
}

TEST_CASE("caustic orders") {
    Covering0 c;
    c.k1 = 2;
    c.poly_coeffs = {0.2};
    c.poles = {{{1.0, 0.3}, {0.7}}, {{-0.8, 0.5}, {0.2, 0.6}}, {{0.1, -1.1}, {0.4}}};
    for (const CausticRay& ray : caustic_orders(c)) {
        INFO(ray.label << " order " << ray.order << " residual " << ray.fit_residual);
        CHECK(ray.order > ray.expected_lower_bound - 0.05);
        if (ray.label == "t3") CHECK(std::abs(ray.order) < 0.05);
    }
    c.poles[0].tail = {0.3, -0.5};
    c.poles[2].tail = {0.1, 0.2, 0.7};
    for (const CausticRay& ray : caustic_orders(c)) {
        INFO(ray.label << " order " << ray.order << " residual " << ray.fit_residual);
        CHECK(ray.order > ray.expected_lower_bound - 0.05);
    }
}

TEST_CASE("resultant along a collision path") {
    std::mt19937_64 rng(44);
    for (const auto& profile : kProfiles) {
        const Covering0 c = testing::separated_covering0(rng, profile);
        int found = 0;
        for (int param = 0; param < Family0(c).parameters().size(); ++param) {
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
