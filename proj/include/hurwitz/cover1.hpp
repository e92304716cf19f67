#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hurwitz/complex.hpp"
#include "hurwitz/elliptic.hpp"
#include "hurwitz/isomon.hpp"

// Genus-1 coverings on C / (Z + sigma Z)
//   p(z) = a + sum_i sum_alpha c_{(i,alpha)} zeta^{(alpha-1)}(z - b_i),   sum_i c_{(i,1)} = 0

namespace hurwitz::cover1 {

struct Pole {
    Complex b;
    std::vector<Complex> tail;  // tail[alpha-1] = c_{(i,alpha)}

    int order() const noexcept { return static_cast<int>(tail.size()); }
    Complex top() const { return tail.back(); }
};

struct Covering1 {
    Complex sigma{0.0, 1.0};
    Complex a{};
    std::vector<Pole> poles;

    std::vector<int> profile() const;
    int degree() const;     // N
    int dimension() const;  // M = l + N
};

struct Diagnostics {
    int dimension = 0;
    double min_pole_distance = 0.0;  // mod the lattice
    double min_top_tail = 0.0;
    double residue_sum = 0.0;
};

/// Throws Error(InvalidInput) on malformed data or a residue sum above 1e-12,
/// Error(OnBoundary) on S1 / S2.
Diagnostics validate(const Covering1& c);

/// A validated covering bound to its Weierstrass context.
class Model {
public:
    explicit Model(Covering1 covering);
    Model(Covering1 covering, std::shared_ptr<const elliptic::WeierstrassContext> ctx);

    const Covering1& covering() const noexcept { return c_; }
    const elliptic::WeierstrassContext& context() const noexcept { return *ctx_; }
    std::shared_ptr<const elliptic::WeierstrassContext> shared_context() const noexcept { return ctx_; }

    /// n-th derivative of p, 0 <= n <= 4. Throws Error(NearPole) within 1e-8 of a pole (mod lattice).
    Complex eval(Complex z, int n = 0) const;
    /// p, ..., p^{(n)}
    std::vector<Complex> jet(Complex z, int n) const;

private:
    Covering1 c_;
    std::shared_ptr<const elliptic::WeierstrassContext> ctx_;
};

struct CriticalData1 {
    std::vector<Complex> z;  // reduced to the fundamental parallelogram
    std::vector<Complex> lambda;
    std::vector<Complex> fsq;
    std::vector<Complex> sw;
    std::vector<Complex> sb;  // sw - 24 pi i eta~ fsq
    double min_lambda_gap = 0.0;
    double min_z_gap = 0.0;  // mod the lattice
    bool caustic_warning = false;
};

/// Throws Error(CountMismatch) if the zeros of p' do not number M.
CriticalData1 critical_data(const Model& m);

struct FlatCoords1 {
    Complex t0;                    // sigma
    std::vector<Complex> t;        // h_i, principal root
    std::vector<Complex> t_power;  // h_i^{k_i} = (-1)^{k_i-1} (k_i-1)! c_{(i,k_i)}
};

FlatCoords1 flat_coords(const Covering1& c);

struct TauProduct {
    Complex log_tau;  // -log eta + (1/24)[sum log f_m - sum_{s>=1} (k_s+1) log h_s]
    Complex tau_m48;  // eta^48 prod h_s^{2(k_s+1)} / prod fsq_m
};

TauProduct tau_product(const Model& m, const CriticalData1& crit);

struct TauResultant {
    Complex value;     // eta^48 A^{2M} kappa / [prod sigma(b_i-b_j)^{(k_i+1)(k_j+1)} prod h_i^{(k_i+1)(k_i-2)}]
    Complex kappa;     // prod_{r != s} sigma(z_r - z_s)
    Complex scale;     // A in p' = A prod sigma(z - z_m) / prod sigma(z - b_i)^{k_i+1}
    Complex literal;   // eta^48 kappa / [same denominator], the form without A^{2M}
};

/// Route B. The critical-point representatives are shifted so that sum z_m = sum (k_i+1) b_i exactly.
TauResultant tau_resultant(const Model& m, const CriticalData1& crit);

struct GFunction {
    Complex g;           // -log eta - (1/24) sum_{s>=1} (k_s+1) log h_s
    Complex g_from_tau;  // log tau - (1/24) sum log f_m
    Complex gamma;       // -(1/24) sum (k_s+1)/k_s
    Complex g_literal;   // -log eta - (1/24) sum_{s>=2} (k_s+1) log h_s
    Complex gamma_literal;  // -(1/24)(l + sum 1/k_s + M/k_1)
};

GFunction g_function(const Model& m, const CriticalData1& crit);

double gamma_closed_form(const std::vector<int>& profile);
/// sum lambda_m H_m from quasi-homogeneity: (1/24)[-M/2 - sum (k+1)/k]
double euler_log_tau(const std::vector<int>& profile);

/// Double critical point reached by moving parameter `param` of Family1 alone; the order of |kappa| along the
/// straight path back toward the base value. Throws Error(NonConvergence) if no collision is reached.
isomon::CollisionPath collision_path(const Covering1& c, int param);

// ---------------------------------------------------------------------------

isomon::CanonicalData canonical_data(const Model& m, const isomon::CanonicalData* reference = nullptr);

/// Parameters sigma, a, b_1..b_l, then every tail coefficient except c_{(1,1)} = -sum_{i>=2} c_{(i,1)}.
/// One more parameter than lambdas: the simultaneous translation of all b_i is a gauge direction.
class Family1 final : public isomon::DeformationFamily {
public:
    explicit Family1(Covering1 base);

    Eigen::VectorXcd parameters() const override;
    std::vector<std::string> parameter_names() const override;
    isomon::CanonicalData base() const override;
    isomon::CanonicalData at(const Eigen::VectorXcd& theta, const isomon::CanonicalData& reference) const override;

    Covering1 covering(const Eigen::VectorXcd& theta) const;

private:
    Covering1 base_;
};

}  // namespace hurwitz::cover1
