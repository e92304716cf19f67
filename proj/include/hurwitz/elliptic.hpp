#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hurwitz/complex.hpp"

// Genus-one special functions on the lattice Z + sigma Z (periods 1 and sigma, Im sigma > 0).

namespace hurwitz::elliptic {

/// Hard cap on series terms; the HURWITZ_TRUNC environment variable overrides it.
int default_series_cap();

class Modulus {
public:
    /// Throws Error(InvalidInput) unless Im sigma > 0.1.
    explicit Modulus(Complex sigma, int series_cap = default_series_cap());

    Complex sigma() const noexcept { return sigma_; }
    /// e^{2 pi i sigma}
    Complex q() const noexcept { return q_; }
    /// Jacobi nome e^{i pi sigma} used by the theta series.
    Complex jacobi_nome() const noexcept { return nome_; }
    int series_cap() const noexcept { return cap_; }

    static constexpr double kMinImaginaryPart = 0.1;

private:
    Complex sigma_;
    Complex q_;
    Complex nome_;
    int cap_;
};

/// n-th z-derivative of the odd theta function theta_1(z|sigma) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z).
Complex theta1(const Modulus& m, Complex z, int n_deriv);
/// theta_1 and its first three derivatives at z in one series pass.
std::array<Complex, 4> theta1_jet(const Modulus& m, Complex z);

Complex dedekind_eta(const Modulus& m);
/// log eta = pi i sigma / 12 + sum log(1 - q^n); continuous in sigma on the upper half plane.
Complex log_dedekind_eta(const Modulus& m);
/// d/dsigma log eta from the theta heat-equation ratio theta1'''(0) / (12 pi i theta1'(0)).
Complex eta_tilde(const Modulus& m);
/// d/dsigma log eta from the Eisenstein series, (pi i / 12) E_2(sigma).
Complex eta_tilde_from_e2(const Modulus& m);

Complex eisenstein_e2(const Modulus& m);
Complex eisenstein_e4(const Modulus& m);
Complex eisenstein_e6(const Modulus& m);

/// Weierstrass functions for the lattice, built on theta_1 with self-calibrated constants.
class WeierstrassContext {
public:
    /// Computes the calibration constants and checks the Laurent and Legendre invariants;
    /// throws Error(NonConvergence) if any invariant fails (series truncated too early).
    explicit WeierstrassContext(Modulus modulus);
    explicit WeierstrassContext(Complex sigma) : WeierstrassContext(Modulus(sigma)) {}

    const Modulus& modulus() const noexcept { return modulus_; }
    Complex sigma() const noexcept { return modulus_.sigma(); }
    Complex theta1_deriv0() const noexcept { return theta1_deriv0_; }
    Complex calib_p() const noexcept { return calib_p_; }
    Complex calib_sigma() const noexcept { return calib_sigma_; }
    Complex eta_tilde() const noexcept { return eta_tilde_; }
    Complex g2() const noexcept { return g2_; }
    Complex g3() const noexcept { return g3_; }
    /// zeta_W(z + 1) - zeta_W(z)
    Complex eta1() const noexcept { return -calib_p_; }

    /// n-th derivative of the Weierstrass p-function (any n >= 0).
    /// Throws Error(LatticePoint) within kLatticeClearance of a lattice point.
    Complex wp(Complex z, int n_deriv = 0) const;
    /// wp, wp', ..., wp^(n) at z.
    std::vector<Complex> wp_derivatives(Complex z, int n) const;
    /// n-th derivative of the Weierstrass zeta function; zeta' = -wp.
    Complex zeta(Complex z, int n_deriv = 0) const;
    /// Weierstrass sigma function, sigma(z) = z + O(z^5).
    Complex sigma_fn(Complex z) const;

    /// Lattice coordinates (x, y) with z = x + y sigma.
    std::array<double, 2> lattice_coords(Complex z) const;
    /// Representative in {x + y sigma : x, y in [0, 1)}.
    Complex reduce(Complex z) const;
    /// Representative in {x + y sigma : x, y in [-1/2, 1/2)}.
    Complex reduce_centered(Complex z) const;
    /// Distance from z to the nearest lattice point (nine nearest translates of the reduced point).
    double lattice_distance(Complex z) const;

    static constexpr double kLatticeClearance = 1e-8;

private:
    Modulus modulus_;
    Complex theta1_deriv0_;
    Complex calib_p_;
    Complex calib_sigma_;
    Complex eta_tilde_;
    Complex g2_;
    Complex g3_;
};

/// scale * prod_i sigma_W(z - zeros_i)
struct SigmaProduct {
    Complex scale{1.0, 0.0};
    std::vector<Complex> zeros;

    Complex operator()(const WeierstrassContext& ctx, Complex z) const;
};

/// R(F, G) = a_0^N prod_i G(a_i) for F = a_0 prod sigma(z - a_i) (M zeros), G with N zeros.
Complex elliptic_resultant(const WeierstrassContext& ctx, const SigmaProduct& f, const SigmaProduct& g);

struct PoleDivisor {
    Complex position;
    int order = 1;
};

struct ZeroSearchOptions {
    /// No zero or pole may lie closer than this to a cell edge.
    double contour_clearance = 1e-8;
    /// Cells below this size (lattice units) holding several zeros are reported as a cluster.
    double min_cell = 1e-7;
    /// A cell holding one zero is handed to Newton once smaller than this.
    double newton_cell = 0.25;
    int max_edge_depth = 48;
    int max_newton_iterations = 60;
};

/// All zeros of an elliptic function h in one fundamental parallelogram, reduced to [0,1)x[0,1)
/// lattice coordinates. The zero count is the total pole order (argument principle).
/// dh is used for Newton polishing. Throws ContourClash or CountMismatch.
std::vector<Complex> elliptic_zeros(const WeierstrassContext& ctx, const std::function<Complex(Complex)>& h,
                                    const std::function<Complex(Complex)>& dh, std::span<const PoleDivisor> poles,
                                    const ZeroSearchOptions& options = {});

}  // namespace hurwitz::elliptic
