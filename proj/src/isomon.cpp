#include "hurwitz/isomon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hurwitz/errors.hpp"

namespace hurwitz::isomon {

namespace {

constexpr double kCoincident = 1e-10;

double inf_norm(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Complex CanonicalData::kernel(Complex z1, Complex z2) const {
    if (genus == 0) {
        const Complex d = z1 - z2;
        return 1.0 / (d * d);
    }
    const auto& ctx = *weierstrass;
    return ctx.wp(z1 - z2) - 4.0 * kPi * kI * ctx.eta_tilde();
}

Complex schwarzian_from_jet(Complex d2, Complex d3, Complex d4) {
    const Complex a = d2, b = d3 / 2.0, g = d4 / 6.0;
    return (2.0 * b * b - 3.0 * a * g) / (a * a * a);
}

bool near_caustic(std::span<const Complex> lambda, double* min_gap) {
    double gap = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t m = 0; m < lambda.size(); ++m) {
        scale = std::max(scale, std::abs(lambda[m]));
        for (std::size_t n = m + 1; n < lambda.size(); ++n) gap = std::min(gap, std::abs(lambda[m] - lambda[n]));
    }
    if (min_gap) *min_gap = gap;
    return gap < 1e-6 * (scale + 1.0);
}

BergmannValues bergmann_values(const CanonicalData& d) {
    const int m = d.dimension();
    const auto separation = [&](Complex a, Complex b) {
        return d.genus == 0 ? std::abs(a - b) : d.weierstrass->lattice_distance(a - b);
    };
    BergmannValues out;
    out.points = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            if (separation(d.points[i], d.points[j]) < kCoincident)
                throw Error(ErrorKind::Coincident, str("critical points ", i, " and ", j, " coincide"));
            out.points(i, j) = out.points(j, i) = d.kernel(d.points[i], d.points[j]) * d.f[i] * d.f[j];
        }
    const int s_count = static_cast<int>(d.infinity_points.size());
    out.infinity = Eigen::MatrixXcd::Zero(m, s_count);
    for (int i = 0; i < m; ++i)
        for (int s = 0; s < s_count; ++s) {
            if (separation(d.points[i], d.infinity_points[s]) < kCoincident)
                throw Error(ErrorKind::Coincident, str("critical point ", i, " sits on pole ", s));
            out.infinity(i, s) = d.kernel(d.points[i], d.infinity_points[s]) * d.f[i] * d.h[s];
        }
    return out;
}

double IsomonodromyData::max_route_discrepancy() const {
    const double scale = h_projective.cwiseAbs().maxCoeff();
    return (h_hamiltonian - h_projective).cwiseAbs().maxCoeff() / scale;
}

Eigen::MatrixXcd IsomonodromyData::schlesinger_coefficient(Complex mu) const {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(v.rows(), v.cols());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) sum += residues[k] / (mu - lambda[k]);
    return sum;
}

IsomonodromyData build_isomonodromy(const CanonicalData& d) {
    const int m = d.dimension();
    const BergmannValues b = bergmann_values(d);
    IsomonodromyData out;
    out.lambda = Eigen::Map<const Eigen::VectorXcd>(d.lambda.data(), m);
    out.gamma = 0.5 * b.points;
    out.v = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.v(i, j) = out.gamma(i, j) * (out.lambda[j] - out.lambda[i]);
    out.h_hamiltonian = Eigen::VectorXcd::Zero(m);
    out.h_projective = Eigen::VectorXcd::Zero(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j)
            if (j != i) out.h_hamiltonian[i] += 0.5 * out.v(j, i) * out.v(j, i) / (out.lambda[i] - out.lambda[j]);
        out.h_projective[i] = d.sb[i] / 24.0;
    }
    for (int k = 0; k < m; ++k) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
        a.row(k) = out.v.row(k);
        out.residues.push_back(std::move(a));
    }
    out.caustic_warning = d.caustic_warning || near_caustic(d.lambda);
    return out;
}

// ---------------------------------------------------------------------------

LambdaDifferentiator::LambdaDifferentiator(const DeformationFamily& family, FiniteDifferenceOptions options)
    : family_(family), options_(options), theta0_(family.parameters()), base_(family.base()) {
    const Eigen::Index p = theta0_.size();
    const Eigen::Index m = base_.dimension();
    jacobian_.params = family.parameter_names();
    jacobian_.dlambda_dparams.resize(m, p);
    const Functional lambda = [](const CanonicalData& d) { return d.lambda; };
    for (Eigen::Index j = 0; j < p; ++j) {
        const std::vector<Complex> col = differentiate(lambda, Eigen::VectorXcd::Unit(p, j));
        for (Eigen::Index i = 0; i < m; ++i) jacobian_.dlambda_dparams(i, j) = col[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jacobian_.dlambda_dparams, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    jacobian_.condition = s.size() ? s[0] / s[s.size() - 1] : 0.0;
    jacobian_.rank = static_cast<int>((s.array() > s[0] * 1e-12).count());
    if (!(jacobian_.condition < options_.max_condition) || jacobian_.rank < m)
        throw Error(ErrorKind::IllConditioned, str("d lambda / d theta condition ", jacobian_.condition, ", rank ",
                                                   jacobian_.rank, " of ", m));
    jacobian_.tangents = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
}

double LambdaDifferentiator::step_for(const Eigen::VectorXcd& dtheta) const {
    const double norm = inf_norm(dtheta);
    const double scale = std::max(1.0, inf_norm(theta0_));
    if (!(norm > 0.0)) throw Error(ErrorKind::StepUnderflow, "zero deformation direction");
    const double h = options_.relative_step * scale / norm;
    if (!(h * norm > 1e-13 * scale)) throw Error(ErrorKind::StepUnderflow, str("step ", h, " too small"));
    return h;
}

std::vector<Complex> LambdaDifferentiator::central(const Functional& f, const Eigen::VectorXcd& dtheta,
                                                   double h) const {
    const std::vector<Complex> plus = f(family_.at(theta0_ + h * dtheta, base_));
    const std::vector<Complex> minus = f(family_.at(theta0_ - h * dtheta, base_));
    std::vector<Complex> out(plus.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (plus[i] - minus[i]) / (2.0 * h);
    return out;
}

std::vector<Complex> LambdaDifferentiator::differentiate(const Functional& f, const Eigen::VectorXcd& dtheta) const {
    const double h = step_for(dtheta);
    std::vector<Complex> d1 = central(f, dtheta, h);
    if (!options_.richardson) return d1;
    const std::vector<Complex> d2 = central(f, dtheta, h / 2);
    for (std::size_t i = 0; i < d1.size(); ++i) d1[i] = (4.0 * d2[i] - d1[i]) / 3.0;
    return d1;
}

std::vector<Complex> LambdaDifferentiator::derivative(const Functional& f, int k) const {
    return differentiate(f, jacobian_.tangents.col(k));
}

std::vector<Complex> LambdaDifferentiator::directional(const Functional& f, const Eigen::VectorXcd& w) const {
    return differentiate(f, jacobian_.tangents * w);
}

namespace {

Complex combine_logs(const std::vector<LogFactor>& base, const std::vector<Complex>& d) {
    Complex sum{};
    for (std::size_t j = 0; j < base.size(); ++j) sum += base[j].weight * d[j] / base[j].value;
    return sum;
}

Functional log_values(const LogFunctional& f) {
    return [f](const CanonicalData& d) {
        std::vector<Complex> v;
        for (const LogFactor& x : f(d)) v.push_back(x.value);
        return v;
    };
}

}  // namespace

Complex LambdaDifferentiator::log_derivative(const LogFunctional& f, int k) const {
    return combine_logs(f(base_), derivative(log_values(f), k));
}

Complex LambdaDifferentiator::log_directional(const LogFunctional& f, const Eigen::VectorXcd& w) const {
    return combine_logs(f(base_), directional(log_values(f), w));
}

double LambdaDifferentiator::richardson_ratio(const Functional& f, int k, int index, double step) const {
    const Eigen::VectorXcd dtheta = jacobian_.tangents.col(k);
    const double h = step * std::max(1.0, inf_norm(theta0_)) / inf_norm(dtheta);
    const Complex d1 = central(f, dtheta, h)[index];
    const Complex d2 = central(f, dtheta, h / 2)[index];
    const Complex d4 = central(f, dtheta, h / 4)[index];
    return std::abs((d1 - d2) / (d2 - d4));
}

Eigen::VectorXcd LambdaDifferentiator::unit_direction() const { return Eigen::VectorXcd::Ones(base_.dimension()); }

Eigen::VectorXcd LambdaDifferentiator::euler_direction() const {
    return Eigen::Map<const Eigen::VectorXcd>(base_.lambda.data(), base_.dimension());
}

std::vector<LogFactor> g_log_factors(const CanonicalData& d) {
    std::vector<LogFactor> out;
    const auto& orders = d.infinity_orders;
    for (std::size_t s = 0; s < orders.size(); ++s)
        out.push_back({-(orders[s] + 1.0) / (24.0 * orders[s]), d.h_power[s]});
    if (d.genus == 1) out.push_back({-1.0, d.eta});
    return out;
}

std::vector<LogFactor> tau_log_factors(const CanonicalData& d) {
    std::vector<LogFactor> out = g_log_factors(d);
    for (const Complex q : d.fsq) out.push_back({1.0 / 48.0, q});
    return out;
}

std::vector<LogFactor> wirtinger_log_factors(const CanonicalData& d) {
    std::vector<LogFactor> out;
    const auto& orders = d.infinity_orders;
    for (std::size_t s = 0; s < orders.size(); ++s)
        out.push_back({-(orders[s] + 1.0) / orders[s], d.h_power[s]});
    for (const Complex q : d.fsq) out.push_back({0.5, q});
    return out;
}

VanishingFit fit_vanishing_order(std::span<const double> eps, std::span<const double> value,
                                 const std::string& label, double max_residual) {
    const std::size_t n = eps.size();
    if (n < 2 || value.size() != n) throw Error(ErrorKind::InvalidInput, str(label, ": need matching samples"));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log10(eps[i]);
        y[i] = std::log10(value[i]);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    VanishingFit fit;
    fit.order = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - my - fit.order * (x[i] - mx), 2) / n;
    fit.residual = std::sqrt(ss);
    if (!(fit.residual <= max_residual))
        throw Error(ErrorKind::SlopeUnstable,
                    str(label, ": log-log residual ", fit.residual, " (slope ", fit.order, ")"));
    return fit;
}

Collision find_collision(const CriticalJet& jet, Complex z0, Complex s0) {
    Complex z = z0, s = s0;
    for (int it = 0; it < 60; ++it) {
        const auto j = jet(z, s);
        const double hs = 1e-6 * std::max(1.0, std::abs(s));
        const auto jp = jet(z, s + hs), jm = jet(z, s - hs);
        const Complex d1s = (jp[0] - jm[0]) / (2.0 * hs), d2s = (jp[1] - jm[1]) / (2.0 * hs);
        // [p'' d1s; p''' d2s] (dz, ds) = -(p', p'')
        const Complex det = j[1] * d2s - d1s * j[2];
        if (std::abs(det) == 0.0) break;
        Complex dz = -(d2s * j[0] - d1s * j[1]) / det;
        Complex ds = -(j[1] * j[1] - j[2] * j[0]) / det;
        const double len = std::max(std::abs(dz), std::abs(ds));
        if (len > 0.25) {
            dz *= 0.25 / len;
            ds *= 0.25 / len;
        }
        z += dz;
        s += ds;
        if (len < 1e-14 * std::max(1.0, std::abs(z) + std::abs(s))) return {z, s};
    }
    const auto j = jet(z, s);
    if (std::abs(j[0]) + std::abs(j[1]) < 1e-11 * (1.0 + std::abs(j[2]))) return {z, s};
    throw Error(ErrorKind::NonConvergence, "collision search did not converge");
}

}  // namespace hurwitz::isomon
