#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retrobell/outcome.hpp"
#include "retrobell/sphere.hpp"

namespace retrobell {

// ---------------------------------------------------------------------------
// Kinematics: piecewise-linear worldlines in one spatial dimension, c = 1.
// ---------------------------------------------------------------------------

struct WorldlineSegment {
    double t_begin = 0.0;
    double t_end = 0.0;
    double x_begin = 0.0;  // position at t_begin
    double velocity = 0.0;

    double position(double t) const { return x_begin + velocity * (t - t_begin); }
};

// Strictly increasing time, |dx/dt| < 1 on every segment, continuous in x.
class Worldline {
public:
    explicit Worldline(std::vector<WorldlineSegment> segments);

    static Worldline inertial(double t_begin, double t_end, double x_begin, double velocity);
    static Worldline stationary(double t_begin, double t_end, double x);

    double t_begin() const { return segments_.front().t_begin; }
    double t_end() const { return segments_.back().t_end; }
    bool contains(double t) const { return t >= t_begin() && t <= t_end(); }
    double position(double t) const;
    const std::vector<WorldlineSegment>& segments() const { return segments_; }

private:
    std::vector<WorldlineSegment> segments_;
};

struct LightConeTimes {
    std::optional<double> retarded;
    std::optional<double> advanced;
};

// Intersections of the past/future light cone of i(t) with worldline j, solved
// in closed form segment by segment. A time is absent when the cone misses j's
// domain (before creation or after absorption).
LightConeTimes light_cone_times(const Worldline& i, double t, const Worldline& j);

// ---------------------------------------------------------------------------
// Experiment configuration and trajectories
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    double L = 1.0;        // detector distance, light units
    double v = 0.5;        // particle speed, fraction of c
    double delta = 0.1;    // flight time between measurement and absorption
    double kappa = 1.0;    // coupling constant of the interaction law
    double h = 2e-4;       // integration step
    UnitVec3 a = UnitVec3::in_plane(0.0);
    UnitVec3 b = UnitVec3::in_plane(120.0);
    UnitVec3 s0 = UnitVec3::normalize(0.3, 0.2, 0.9);
    OutcomePair seed_outcome{};
    int max_picard_iters = 200;
    double picard_tol = 1e-10;

    double measurement_time() const { return L / v; }
    double end_time() const { return measurement_time() + delta; }
    std::size_t steps() const;             // grid intervals on [0, T + delta]
    std::size_t measurement_index() const;  // grid index of t = T

    // h < delta/10, kappa >= 0, 0 < v < 1, and T, T + delta on the grid.
    // Throws InvalidConfig.
    void validate() const;

    Worldline worldline_a() const;  // x = -v t on [0, T + delta]
    Worldline worldline_b() const;  // x = +v t on [0, T + delta]
};

// Flat `key = value` text: L, v, delta, kappa, h, a, b, s0 (vectors as
// "x,y,z", normalized on read, or "angle:<deg>" for in-plane settings),
// max_picard_iters, picard_tol, seed_outcome ("+1,-1"). `#` starts a comment.
ExperimentConfig parse_experiment_config(const std::string& text);
std::map<std::string, std::string> describe(const ExperimentConfig& config);

// Spin on the uniform grid t_k = k h. Index m = measurement_index holds the
// post-projection value; the value just before projection is kept separately.
struct SpinTrajectory {
    double h = 0.0;
    std::size_t measurement_index = 0;
    std::vector<UnitVec3> samples;
    UnitVec3 pre_measurement;

    double measurement_time() const { return h * static_cast<double>(measurement_index); }
    double end_time() const { return h * static_cast<double>(samples.size() - 1); }

    // Linear interpolation followed by renormalization. Times before T use the
    // pre-measurement branch, times at or after T the post-measurement branch;
    // times past the last computed sample clamp to it.
    UnitVec3 at(double t) const;
};

struct IntegrationStats {
    // Largest | ||S + h f|| - 1 | seen before renormalization.
    double max_norm_drift = 0.0;
};

struct TrajectoryPair {
    SpinTrajectory a;
    SpinTrajectory b;
    IntegrationStats stats;
};

// Retarded-only law dS_i/dt = kappa D(S_i, -S_j(tau_ret)), integrated with the
// explicit midpoint rule plus renormalization. Measurement at t = T projects
// onto sgn<a,S> a, or onto the forced outcome when one is given. B starts at
// -S0 unless `initial_b` overrides it (non-singlet data).
TrajectoryPair integrate_retarded_only(const ExperimentConfig& config,
                                       std::optional<OutcomePair> forced = std::nullopt,
                                       std::optional<UnitVec3> initial_b = std::nullopt);

// One Picard sweep: both particles re-integrated with retarded and advanced
// sources taken from `previous`; projections forced to config.seed_outcome.
TrajectoryPair picard_step(const ExperimentConfig& config, const TrajectoryPair& previous);

// sup over the grid (and the pre-measurement values) of |S - S'|, both particles.
double trajectory_distance(const TrajectoryPair& x, const TrajectoryPair& y);

enum class SolveStatus { Converged, NoConvergence, SeedInconsistent };
std::string to_string(SolveStatus s);

struct TimeSymmetricSolution {
    TrajectoryPair trajectories;
    OutcomePair seed;
    OutcomePair realized;
    SolveStatus status = SolveStatus::NoConvergence;
    bool converged = false;  // status == Converged
    double residual = 0.0;
    int picard_iters = 0;
    std::vector<double> residual_history;
};

// Picard iteration seeded by config.seed_outcome; never throws on solver failure.
TimeSymmetricSolution solve_time_symmetric_report(const ExperimentConfig& config);

// As above but throws NoConvergence or SeedInconsistent.
TimeSymmetricSolution solve_time_symmetric(const ExperimentConfig& config);

struct FittedParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double residual = 0.0;  // || sum c_i v_i - S_A(T-) ||
    Vec3 raw;               // unnormalized coefficients on {S0, -B b, A a}
};

// Decomposes S_A(T-) over {S0, -B b, A a} and scales the weights to sum 1.
// Throws DegenerateBasis when the triple is (nearly) linearly dependent.
FittedParams extract_alpha_beta_gamma(const TimeSymmetricSolution& sol,
                                      const ExperimentConfig& config);

struct TriangleReport {
    double max_violation = 0.0;       // radians outside the spherical triangle
    std::size_t violations = 0;       // samples above tolerance
    std::size_t samples_checked = 0;
    char worst_particle = '-';
    double worst_time = 0.0;
};

// Every S_A sample must lie in the spherical triangle {S0, -B b, A a} and
// every S_B sample in {-S0, B b, -A a}, up to `tolerance` radians.
TriangleReport check_invariant_triangle(const TrajectoryPair& trajectories, const UnitVec3& s0,
                                        const UnitVec3& a, const UnitVec3& b,
                                        const OutcomePair& outcome, double tolerance = 1e-6);
TriangleReport check_invariant_triangle(const TimeSymmetricSolution& sol,
                                        const ExperimentConfig& config, double tolerance = 1e-6);

// Signed angular distance of p outside the spherical triangle (v1, v2, v3);
// <= 0 inside. Throws DegenerateBasis for a degenerate triangle.
double triangle_violation(const Vec3& p, const Vec3& v1, const Vec3& v2, const Vec3& v3);

}  // namespace retrobell
