#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "retrobell/outcome.hpp"
#include "retrobell/sphere.hpp"

namespace retrobell {

struct ProbabilityBounds {
    double p_min = 0.0;
    double p_max = 0.0;
    double median = 0.0;
};

// P(A != B | a, b) as a function of the two settings.
using ProbabilityOracle = std::function<double(const UnitVec3&, const UnitVec3&)>;

// Local (retarded-only) model: 1 - 2 angle/360 for angle in [0, 180] degrees.
double local_anticoincidence(double angle_deg);

// Singlet prediction 1/2 + 1/2 <a,b>.
double qm_anticoincidence(const UnitVec3& a, const UnitVec3& b);

// Normalized measure of {S : <a,S> > C and <b,S> > C}, evaluated as
//   (1/pi) int_C^D sqrt((z^2 - C^2) / (z^2 - z^4)) dz,   D = sqrt((1 + <a,b>)/2).
// Requires C >= 0 and <a,b> in (-1, 0); returns 0 when C >= D.
// Absolute error <= 1e-9 (adaptive Gauss-Kronrod on a smoothed variable).
double cap_overlap_fraction(double c, double dot_ab);

// Upper/lower anti-coincidence bounds obtained by resolving every self-fulfilling
// prophecy toward A != B (p_max) or A = B (p_min). Throws RegimeViolation unless
// <a,b> < 0 and beta |<a,b>| >= gamma.
ProbabilityBounds probability_bounds(double dot_ab, const ModelParams& p);
ProbabilityBounds probability_bounds(const UnitVec3& a, const UnitVec3& b, const ModelParams& p);

// (1 - nu - nu^2, nu, nu^2). The checked form enforces alpha > beta > gamma > 0,
// so nu = 0 (local limit) is only reachable through nu_params_unchecked.
ModelParams nu_params(double nu);
ModelParams nu_params_unchecked(double nu);

struct BellTriple {
    double a_deg = 0.0;
    double b_deg = 120.0;
    double c_deg = 240.0;
};

// P(a,b) + P(b,c) + P(a,c) over coplanar settings. Local models give >= 1.
double bell_sum(const BellTriple& triple, const ProbabilityOracle& prob);

// E(a,b) + E(a,b') + E(a',b) - E(a',b') with E = 1 - 2 P(A != B).
double chsh_value(const UnitVec3& a, const UnitVec3& a_prime, const UnitVec3& b,
                  const UnitVec3& b_prime, const ProbabilityOracle& prob);

ProbabilityOracle local_oracle();
ProbabilityOracle qm_oracle();
// Picks p_min, p_max or median from probability_bounds according to the policy
// (FavorEqual -> p_min, FavorUnequal -> p_max, Unbiased -> median).
ProbabilityOracle bounds_oracle(const ModelParams& p, SfpPolicy policy);

enum class Method { Quadrature, MonteCarlo };
std::string to_string(Method m);

struct SweepRow {
    std::optional<double> nu;  // empty for (beta, gamma) sweeps
    double beta = 0.0;
    double gamma = 0.0;
    double angle_deg = 0.0;
    // Empty when the row violates beta |<a,b>| >= gamma.
    std::optional<ProbabilityBounds> bounds;
    Method method = Method::Quadrature;
    std::uint64_t n_samples = 0;
    double std_error = 0.0;
    bool regime_ok() const { return bounds.has_value(); }
};

// One quadrature row per grid point, ordered by grid index. Grid points are
// independent and evaluated in parallel.
std::vector<SweepRow> sweep_nu(const std::vector<double>& nu_grid, double angle_deg);
// Row-major over beta (outer) then gamma (inner).
std::vector<SweepRow> sweep_beta_gamma(const std::vector<double>& beta_grid,
                                       const std::vector<double>& gamma_grid, double angle_deg);

// Settings at angle 0 and angle_deg in the x-y plane.
std::pair<UnitVec3, UnitVec3> coplanar_pair(double angle_deg);

}  // namespace retrobell
