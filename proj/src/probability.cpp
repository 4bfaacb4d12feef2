#include "retrobell/probability.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "retrobell/errors.hpp"

namespace retrobell {

double local_anticoincidence(double angle_deg) {
    if (!(angle_deg >= 0.0 && angle_deg <= 180.0)) {
        std::ostringstream msg;
        msg << "angle " << angle_deg << " outside [0, 180] degrees";
        throw OutOfRange(msg.str());
    }
    return 1.0 - 2.0 * angle_deg / 360.0;
}

double qm_anticoincidence(const UnitVec3& a, const UnitVec3& b) {
    return 0.5 + 0.5 * dot(a, b);
}

double cap_overlap_fraction(double c, double dot_ab) {
    if (!(c >= 0.0)) throw DomainError("cap overlap needs C >= 0");
    if (!(dot_ab > -1.0 && dot_ab < 0.0)) throw DomainError("cap overlap needs <a,b> in (-1, 0)");

    const double d = std::sqrt(0.5 * (1.0 + dot_ab));
    if (c >= d) return 0.0;

    // z^2 = C^2 + (D^2 - C^2) sin^2 t maps [0, pi/2] onto [C, D] and absorbs the
    // square-root endpoint behaviour at z = C, leaving a smooth integrand:
    //   Delta^{3/2} cos t * sin^2 t / (z^2 sqrt(1 - z^2)).
    const double c2 = c * c;
    const double delta = d * d - c2;
    const double delta32 = delta * std::sqrt(delta);
    auto integrand = [&](double t) {
        const double s = std::sin(t);
        const double s2 = s * s;
        const double z2 = c2 + delta * s2;
        const double ratio = c2 == 0.0 ? 1.0 / delta : s2 / z2;
        return delta32 * std::cos(t) * ratio / std::sqrt(1.0 - z2);
    };
    // For small C the factor s^2/z^2 rises from 0 to 1/Delta over sin t ~ C/sqrt(Delta)
    // and then approaches 1/Delta like 1/s^2. Geometric break points keep every piece
    // smooth on its own scale.
    std::vector<double> breaks{0.0};
    for (double s = c / std::sqrt(delta); s > 0.0 && s < 0.5; s *= 8.0) breaks.push_back(std::asin(s));
    breaks.push_back(kPi / 2.0);
    using boost::math::quadrature::gauss_kronrod;
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        double error = 0.0;
        integral += gauss_kronrod<double, 31>::integrate(integrand, breaks[i], breaks[i + 1], 15,
                                                         1e-12, &error);
    }
    return integral / kPi;
}

ProbabilityBounds probability_bounds(double dot_ab, const ModelParams& p) {
    if (!in_case_regime(dot_ab, p)) {
        std::ostringstream msg;
        msg << "bounds need <a,b> < 0 and beta|<a,b>| >= gamma (got <a,b> = " << dot_ab
            << ", beta = " << p.beta() << ", gamma = " << p.gamma() << ")";
        throw RegimeViolation(msg.str());
    }
    const double feed = p.beta() * std::abs(dot_ab);
    // Factor 2 covers <a,S0>, <b,S0> < 0 by the S0 -> -S0 symmetry.
    ProbabilityBounds out;
    // Inside the regime slack the threshold may round to a tiny negative number.
    out.p_max = 2.0 * cap_overlap_fraction(std::max(0.0, (feed - p.gamma()) / p.alpha()), dot_ab);
    out.p_min = 2.0 * cap_overlap_fraction((feed + p.gamma()) / p.alpha(), dot_ab);
    out.median = 0.5 * (out.p_min + out.p_max);
    return out;
}

ProbabilityBounds probability_bounds(const UnitVec3& a, const UnitVec3& b, const ModelParams& p) {
    return probability_bounds(dot(a, b), p);
}

ModelParams nu_params(double nu) {
    if (!(nu >= 0.0 && nu < 1.0)) throw OutOfRange("nu must lie in [0, 1)");
    return ModelParams::checked(1.0 - nu - nu * nu, nu, nu * nu);
}

ModelParams nu_params_unchecked(double nu) {
    if (!(nu >= 0.0 && nu < 1.0)) throw OutOfRange("nu must lie in [0, 1)");
    return ModelParams::unchecked(1.0 - nu - nu * nu, nu, nu * nu);
}

double bell_sum(const BellTriple& t, const ProbabilityOracle& prob) {
    const auto a = UnitVec3::in_plane(t.a_deg);
    const auto b = UnitVec3::in_plane(t.b_deg);
    const auto c = UnitVec3::in_plane(t.c_deg);
    return prob(a, b) + prob(b, c) + prob(a, c);
}

double chsh_value(const UnitVec3& a, const UnitVec3& a_prime, const UnitVec3& b,
                  const UnitVec3& b_prime, const ProbabilityOracle& prob) {
    auto corr = [&](const UnitVec3& x, const UnitVec3& y) { return 1.0 - 2.0 * prob(x, y); };
    return corr(a, b) + corr(a, b_prime) + corr(a_prime, b) - corr(a_prime, b_prime);
}

ProbabilityOracle local_oracle() {
    return [](const UnitVec3& a, const UnitVec3& b) {
        return local_anticoincidence(angle_between_deg(a, b));
    };
}

ProbabilityOracle qm_oracle() { return qm_anticoincidence; }

ProbabilityOracle bounds_oracle(const ModelParams& p, SfpPolicy policy) {
    return [p, policy](const UnitVec3& a, const UnitVec3& b) {
        const auto bounds = probability_bounds(a, b, p);
        switch (policy) {
            case SfpPolicy::FavorEqual: return bounds.p_min;
            case SfpPolicy::FavorUnequal: return bounds.p_max;
            default: return bounds.median;
        }
    };
}

std::string to_string(Method m) {
    return m == Method::Quadrature ? "quadrature" : "monte-carlo";
}

std::pair<UnitVec3, UnitVec3> coplanar_pair(double angle_deg) {
    return {UnitVec3::in_plane(0.0), UnitVec3::in_plane(angle_deg)};
}

namespace {

SweepRow bounds_row(std::optional<double> nu, double beta, double gamma, double angle_deg) {
    SweepRow row;
    row.nu = nu;
    row.beta = beta;
    row.gamma = gamma;
    row.angle_deg = angle_deg;
    const auto [a, b] = coplanar_pair(angle_deg);
    const auto params = ModelParams::from_beta_gamma(beta, gamma);
    if (in_case_regime(dot(a, b), params)) row.bounds = probability_bounds(a, b, params);
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_nu(const std::vector<double>& nu_grid, double angle_deg) {
    for (double nu : nu_grid) nu_params_unchecked(nu);  // validate before going parallel
    std::vector<SweepRow> rows(nu_grid.size());
    const auto n = static_cast<std::int64_t>(nu_grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const double nu = nu_grid[i];
        rows[i] = bounds_row(nu, nu, nu * nu, angle_deg);
    }
    return rows;
}

std::vector<SweepRow> sweep_beta_gamma(const std::vector<double>& beta_grid,
                                       const std::vector<double>& gamma_grid, double angle_deg) {
    for (double beta : beta_grid) {
        for (double gamma : gamma_grid) ModelParams::from_beta_gamma(beta, gamma);
    }
    const auto ng = static_cast<std::int64_t>(gamma_grid.size());
    const auto n = static_cast<std::int64_t>(beta_grid.size()) * ng;
    std::vector<SweepRow> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        rows[i] = bounds_row(std::nullopt, beta_grid[i / ng], gamma_grid[i % ng], angle_deg);
    }
    return rows;
}

}  // namespace retrobell
