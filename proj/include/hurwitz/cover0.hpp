#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hurwitz/complex.hpp"
#include "hurwitz/isomon.hpp"
#include "hurwitz/poly.hpp"

// Genus-0 coverings
//   p(z) = z^{k1} + sum_{r <= k1-2} a_r z^r + sum_{i>=2} sum_alpha c_{(i,alpha)} / (z - b_i)^alpha

namespace hurwitz::cover0 {

using poly::CPoly;

struct Pole {
    Complex b;
    std::vector<Complex> tail;  // tail[alpha-1] = c_{(i,alpha)}, alpha = 1..k_i

    int order() const noexcept { return static_cast<int>(tail.size()); }
    Complex top() const { return tail.back(); }
};

struct Covering0 {
    int k1 = 1;
    std::vector<Complex> poly_coeffs;  // a_0 .. a_{k1-2}
    std::vector<Pole> poles;           // i = 2..l

    std::vector<int> profile() const;
    int degree() const;     // N
    int dimension() const;  // M = l + N - 2

    /// n-th derivative of p at z (no pole check).
    Complex eval(Complex z, int n = 0) const;
    /// p, p', ..., p^{(n)} at z.
    std::vector<Complex> jet(Complex z, int n) const;

    /// p = z^N + sum a_r z^r
    static Covering0 polynomial(std::vector<Complex> coeffs);
};

struct Diagnostics {
    int dimension = 0;
    double min_pole_distance = 0.0;  // distance to S1 (infinity without poles pairs)
    double min_top_tail = 0.0;       // distance to S2
};

/// Throws Error(InvalidInput) on malformed data and Error(OnBoundary) on S1 / S2.
Diagnostics validate(const Covering0& c);

/// p' = f / g with g = prod (z - b_i)^{k_i + 1}.
std::pair<CPoly, CPoly> p_prime_as_ratio(const Covering0& c);

struct CriticalData0 {
    std::vector<Complex> alpha;
    std::vector<Complex> lambda;
    std::vector<Complex> fsq;
    std::vector<Complex> sb;
    double min_lambda_gap = 0.0;
    double min_alpha_gap = 0.0;
    double root_residual = 0.0;
    bool caustic_warning = false;
};

/// Throws Error(CommonRoot) when f and g share a root.
CriticalData0 critical_data(const Covering0& c);

struct FlatCoords0 {
    std::vector<Complex> p;        // b_i
    std::vector<Complex> t;        // k_i c^{1/k_i}, principal root
    std::vector<Complex> t_power;  // t_i^{k_i} = k_i^{k_i} c_{(i,k_i)}
};

FlatCoords0 flat_coords(const Covering0& c);

struct TauProduct {
    Complex log_tau;    // (1/24)[sum log f_m - sum (k_s+1) log h_s], principal branches
    Complex tau_m48;    // prod h_s^{2(k_s+1)} / prod fsq_m
};

TauProduct tau_product(const Covering0& c, const CriticalData0& crit);

/// R(f, f') / [prod_{i!=j} (b_i - b_j)^{(k_i+1)(k_j+1)} prod t_i^{(k_i+1)(k_i-2)}]; zero on the caustic.
Complex tau_resultant(const Covering0& c);

/// R(f, g) / [prod_{i!=j} (b_i - b_j)^{(k_i+1)(k_j+1)} prod t_i^{k_i(k_i+1)}]
Complex fg_resultant_ratio(const Covering0& c);

struct GFunction {
    Complex g;          // -(1/24) sum (k_i+1) log t_i
    Complex g_from_tau; // log tau - (1/24) sum log f_m
    Complex gamma;
};

GFunction g_function(const Covering0& c, const CriticalData0& crit);

/// Closed-form scaling anomaly -(1/24)(l - 2 + sum 1/k_i + M/k1).
double gamma_closed_form(const std::vector<int>& profile);

/// Euler derivative of log tau: sum lambda_m H_m, fixed by quasi-homogeneity.
double euler_log_tau(const std::vector<int>& profile);

struct CausticRay {
    std::string label;           // "t2", "b2-b3", ...
    int expected_lower_bound = 0;
    double order = 0.0;
    double fit_residual = 0.0;
    std::vector<double> eps;
    std::vector<double> abs_r;   // |R(f, f')|
};

/// Log-log slope of |R(f,f')| along rays t_i -> 0 and b_r -> b_s. Throws Error(SlopeUnstable).
std::vector<CausticRay> caustic_orders(const Covering0& c);

/// Solves for a double critical point by moving parameter `param` of Family0 alone, then fits the order of
/// |R(f, f')| along the straight path back toward the base value. Throws Error(NonConvergence) if no
/// collision is reached.
isomon::CollisionPath collision_path(const Covering0& c, int param);

// ---------------------------------------------------------------------------

/// Canonical data for the isomonodromy layer (critical points tracked from `reference` if given).
isomon::CanonicalData canonical_data(const Covering0& c, const isomon::CanonicalData* reference = nullptr);

/// Parameters a_r, then for each pole b_i, c_{(i,1)}, ..., c_{(i,k_i)}.
class Family0 final : public isomon::DeformationFamily {
public:
    explicit Family0(Covering0 base);

    Eigen::VectorXcd parameters() const override;
    std::vector<std::string> parameter_names() const override;
    isomon::CanonicalData base() const override;
    isomon::CanonicalData at(const Eigen::VectorXcd& theta, const isomon::CanonicalData& reference) const override;

    Covering0 covering(const Eigen::VectorXcd& theta) const;

private:
    Covering0 base_;
};

}  // namespace hurwitz::cover0
