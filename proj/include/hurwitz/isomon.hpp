#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hurwitz/complex.hpp"
#include "hurwitz/elliptic.hpp"

// Isomonodromy layer shared by both genera: rotation coefficients, the V matrix, the quadratic
// Hamiltonians (two routes), Schlesinger residues, and the engine that turns derivatives in
// covering parameters into derivatives in the critical values lambda_m.

namespace hurwitz::isomon {

/// Everything the isomonodromy layer needs to know about one covering, in the uniformizing
/// coordinate z (U = z in genus 0, the a-normalized coordinate in genus 1).
struct CanonicalData {
    int genus = 0;
    std::vector<Complex> points;  // z_m, critical points
    std::vector<Complex> lambda;  // critical values
    std::vector<Complex> fsq;     // f_m^2 = 2 / p''(z_m)
    std::vector<Complex> f;       // square roots of fsq, sign continued along deformations
    std::vector<Complex> sb;      // Bergman projective connection at x_m = 0
    std::vector<Complex> sw;      // Wirtinger connection {z, x_m} at x_m = 0 (== sb in genus 0)

    // Points at infinity carrying an h_s (s >= 2 in genus 0, all s in genus 1).
    std::vector<Complex> infinity_points;  // y_s = z(infinity_s)
    std::vector<int> infinity_orders;      // k_s
    std::vector<Complex> h;                // h_s = dz/dzeta_s at zeta_s = 0, branch continued
    std::vector<Complex> h_power;          // h_s^{k_s}, branch free

    // Genus one only.
    std::optional<elliptic::WeierstrassContext> weierstrass;
    Complex modulus{};             // sigma
    Complex eta{1.0, 0.0};         // Dedekind eta(sigma)
    Complex eta_tilde{};           // d/dsigma log eta

    bool caustic_warning = false;
    double min_lambda_gap = 0.0;
    double min_point_gap = 0.0;

    int dimension() const noexcept { return static_cast<int>(points.size()); }

    /// Bergman kernel B(z1, z2) / (dz1 dz2): 1/(z1-z2)^2 in genus 0, wp(z1-z2) - 4 pi i eta~ in genus 1.
    Complex kernel(Complex z1, Complex z2) const;
};

/// {z, x} at a critical point from p'', p''', p'''' there: (2 beta^2 - 3 alpha gamma) / alpha^3 with
/// alpha = p'', beta = p'''/2, gamma = p''''/6.
Complex schwarzian_from_jet(Complex d2, Complex d3, Complex d4);

/// True when min |lambda_m - lambda_n| < 1e-6 (max|lambda| + 1).
bool near_caustic(std::span<const Complex> lambda, double* min_gap = nullptr);

struct BergmannValues {
    Eigen::MatrixXcd points;    // b(P_m, P_n), zero diagonal
    Eigen::MatrixXcd infinity;  // b(P_m, infinity_s)
};

/// Throws Error(Coincident) if two arguments collide (mod the lattice in genus 1).
BergmannValues bergmann_values(const CanonicalData& data);

struct IsomonodromyData {
    Eigen::MatrixXcd gamma;            // rotation coefficients gamma_mn = b(P_m, P_n) / 2
    Eigen::MatrixXcd v;                // V = [Gamma, U]
    Eigen::VectorXcd h_hamiltonian;    // H_m = 1/2 sum_n V_nm^2 / (lambda_m - lambda_n)
    Eigen::VectorXcd h_projective;     // H_m = S_B(x_m) / 24
    std::vector<Eigen::MatrixXcd> residues;  // Schlesinger A_k: row k of A_k is row k of V
    Eigen::VectorXcd lambda;
    bool caustic_warning = false;

    double max_route_discrepancy() const;
    /// sum_k A_k / (mu - lambda_k)
    Eigen::MatrixXcd schlesinger_coefficient(Complex mu) const;
};

/// Instances inside the off-caustic guard are still evaluated but come back with caustic_warning set;
/// exactly coincident points throw Error(Coincident).
IsomonodromyData build_isomonodromy(const CanonicalData& data);

// ---------------------------------------------------------------------------
// Deformations

/// A covering family with complex parameters theta; implemented per genus.
class DeformationFamily {
public:
    virtual ~DeformationFamily() = default;
    virtual Eigen::VectorXcd parameters() const = 0;
    virtual std::vector<std::string> parameter_names() const = 0;
    virtual CanonicalData base() const = 0;
    /// Canonical data at theta, critical points and branches continued from `reference`.
    virtual CanonicalData at(const Eigen::VectorXcd& theta, const CanonicalData& reference) const = 0;
};

struct FiniteDifferenceOptions {
    double relative_step = 1e-5;
    bool richardson = true;
    double max_condition = 1e8;
};

struct DeformationJacobian {
    std::vector<std::string> params;
    Eigen::MatrixXcd dlambda_dparams;  // M x P
    Eigen::MatrixXcd tangents;         // P x M, minimal-norm solutions of J t_k = e_k
    double condition = 0.0;
    int rank = 0;
};

/// log q = sum_j weight_j log value_j (up to an additive constant).
struct LogFactor {
    double weight;
    Complex value;
};

using Functional = std::function<std::vector<Complex>(const CanonicalData&)>;
using LogFunctional = std::function<std::vector<LogFactor>(const CanonicalData&)>;

class LambdaDifferentiator {
public:
    /// Builds the Jacobian d lambda / d theta by central differences. Throws IllConditioned.
    explicit LambdaDifferentiator(const DeformationFamily& family, FiniteDifferenceOptions options = {});

    const DeformationJacobian& jacobian() const noexcept { return jacobian_; }
    const CanonicalData& base() const noexcept { return base_; }

    /// d F / d lambda_k
    std::vector<Complex> derivative(const Functional& f, int k) const;
    /// sum_k w_k d F / d lambda_k
    std::vector<Complex> directional(const Functional& f, const Eigen::VectorXcd& w) const;
    /// d/d lambda_k of a log-type functional, as sum_j weight_j (d value_j) / value_j.
    Complex log_derivative(const LogFunctional& f, int k) const;
    Complex log_directional(const LogFunctional& f, const Eigen::VectorXcd& w) const;

    /// (D(h) - D(h/2)) / (D(h/2) - D(h/4)) for component `index` of d F / d lambda_k at relative step `step`;
    /// close to 4 when central differences converge smoothly.
    double richardson_ratio(const Functional& f, int k, int index, double step) const;

    /// Unit field e = sum d/d lambda_m and Euler field E = sum lambda_m d/d lambda_m as directions.
    Eigen::VectorXcd unit_direction() const;
    Eigen::VectorXcd euler_direction() const;

private:
    std::vector<Complex> central(const Functional& f, const Eigen::VectorXcd& dtheta, double h) const;
    std::vector<Complex> differentiate(const Functional& f, const Eigen::VectorXcd& dtheta) const;
    double step_for(const Eigen::VectorXcd& dtheta) const;

    const DeformationFamily& family_;
    FiniteDifferenceOptions options_;
    Eigen::VectorXcd theta0_;
    CanonicalData base_;
    DeformationJacobian jacobian_;
};

/// log tau (route A): fsq_m with weight 1/48, h_s^{k_s} with weight -(k_s+1)/(24 k_s), and eta(sigma) with
/// weight -1 in genus one.
std::vector<LogFactor> tau_log_factors(const CanonicalData& d);
/// T = 24 log tau + 24 log eta, whose lambda-gradient is the Wirtinger connection S_W (== S_B in genus zero).
std::vector<LogFactor> wirtinger_log_factors(const CanonicalData& d);
/// G = log(tau / J^{1/24}) with J = prod f_m: the h_s and eta factors of tau.
std::vector<LogFactor> g_log_factors(const CanonicalData& d);

// ---------------------------------------------------------------------------
// Caustic

struct VanishingFit {
    double order = 0.0;
    double residual = 0.0;  // rms deviation from the fitted line, in decades
};

/// Least-squares slope of log|value| against log eps. Throws Error(SlopeUnstable) when the residual
/// exceeds max_residual.
VanishingFit fit_vanishing_order(std::span<const double> eps, std::span<const double> value,
                                 const std::string& label, double max_residual = 0.05);

/// (p', p'', p''') at z for parameter value s.
using CriticalJet = std::function<std::array<Complex, 3>(Complex z, Complex s)>;

struct Collision {
    Complex z;  // double critical point
    Complex s;  // parameter value
};

/// Newton on p'(z) = p''(z) = 0 in (z, s), the s-derivatives by central differences. Throws
/// Error(NonConvergence) if no solution is reached from (z0, s0).
Collision find_collision(const CriticalJet& jet, Complex z0, Complex s0);

struct CollisionPath {
    std::string parameter;
    Collision at;
    std::vector<double> eps;        // distance |s - s*| along the path
    std::vector<double> magnitude;  // |R(f, f')| (genus 0) or |kappa| (genus 1)
    double order = 0.0;
    double fit_residual = 0.0;
    int expected_lower_bound = 1;
};

}  // namespace hurwitz::isomon
