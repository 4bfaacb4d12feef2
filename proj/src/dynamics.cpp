#include "retrobell/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "retrobell/errors.hpp"

namespace retrobell {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

constexpr double kGridSlack = 1e-9;

bool on_grid(double t, double h) {
    const double u = t / h;
    return std::abs(u - std::round(u)) < kGridSlack * std::max(1.0, u);
}

}  // namespace

std::size_t ExperimentConfig::steps() const {
    return static_cast<std::size_t>(std::llround(end_time() / h));
}

std::size_t ExperimentConfig::measurement_index() const {
    return static_cast<std::size_t>(std::llround(measurement_time() / h));
}

void ExperimentConfig::validate() const {
    std::ostringstream msg;
    if (!(v > 0.0 && v < 1.0)) msg << "need 0 < v < 1; ";
    if (!(L > 0.0)) msg << "need L > 0; ";
    if (!(delta > 0.0)) msg << "need delta > 0; ";
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) msg << "need kappa >= 0; ";
    if (!(h > 0.0 && h < delta / 10.0)) msg << "need 0 < h < delta/10; ";
    if (!(max_picard_iters >= 1)) msg << "need max_picard_iters >= 1; ";
    if (!(picard_tol > 0.0)) msg << "need picard_tol > 0; ";
    if (msg.str().empty() && (!on_grid(measurement_time(), h) || !on_grid(end_time(), h))) {
        msg << "T = L/v and T + delta must be integer multiples of h; ";
    }
    if (!msg.str().empty()) throw InvalidConfig(msg.str());
}

Worldline ExperimentConfig::worldline_a() const { return Worldline::inertial(0.0, end_time(), 0.0, -v); }
Worldline ExperimentConfig::worldline_b() const { return Worldline::inertial(0.0, end_time(), 0.0, v); }

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw InvalidConfig("key '" + key + "': not a number: '" + text + "'");
    }
}

UnitVec3 parse_direction(const std::string& key, const std::string& text) {
    if (text.rfind("angle:", 0) == 0) return UnitVec3::in_plane(parse_double(key, trim(text.substr(6))));
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(parse_double(key, trim(item)));
    if (parts.size() != 3) throw InvalidConfig("key '" + key + "': expected x,y,z");
    try {
        return UnitVec3::normalize(parts[0], parts[1], parts[2]);
    } catch (const ZeroVector&) {
        throw InvalidConfig("key '" + key + "': zero vector");
    }
}

Outcome parse_outcome(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "+1" || t == "1" || t == "+") return Outcome::Up;
    if (t == "-1" || t == "-") return Outcome::Down;
    throw InvalidConfig("key '" + key + "': outcome must be +1 or -1");
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_vec(const UnitVec3& u) {
    return format_double(u.x()) + "," + format_double(u.y()) + "," + format_double(u.z());
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig c;
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfig("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "L") c.L = parse_double(key, value);
        else if (key == "v") c.v = parse_double(key, value);
        else if (key == "delta") c.delta = parse_double(key, value);
        else if (key == "kappa") c.kappa = parse_double(key, value);
        else if (key == "h") c.h = parse_double(key, value);
        else if (key == "a") c.a = parse_direction(key, value);
        else if (key == "b") c.b = parse_direction(key, value);
        else if (key == "s0") c.s0 = parse_direction(key, value);
        else if (key == "picard_tol") c.picard_tol = parse_double(key, value);
        else if (key == "max_picard_iters") {
            const double n = parse_double(key, value);
            if (n != std::floor(n) || n < 1 || n > 1e7) throw InvalidConfig("max_picard_iters must be a positive integer");
            c.max_picard_iters = static_cast<int>(n);
        } else if (key == "seed_outcome") {
            const auto comma = value.find(',');
            if (comma == std::string::npos) throw InvalidConfig("seed_outcome expects A,B");
            c.seed_outcome = {parse_outcome(key, value.substr(0, comma)),
                              parse_outcome(key, value.substr(comma + 1))};
        } else {
            throw InvalidConfig("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

std::map<std::string, std::string> describe(const ExperimentConfig& c) {
    return {
        {"L", format_double(c.L)},
        {"v", format_double(c.v)},
        {"delta", format_double(c.delta)},
        {"kappa", format_double(c.kappa)},
        {"h", format_double(c.h)},
        {"a", format_vec(c.a)},
        {"b", format_vec(c.b)},
        {"s0", format_vec(c.s0)},
        {"max_picard_iters", std::to_string(c.max_picard_iters)},
        {"picard_tol", format_double(c.picard_tol)},
    };
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

namespace {

UnitVec3 lerp_unit(const UnitVec3& left, const UnitVec3& right, double w) {
    return UnitVec3::normalize((1.0 - w) * left.vec() + w * right.vec());
}

}  // namespace

UnitVec3 SpinTrajectory::at(double t) const {
    const std::size_t last = samples.size() - 1;
    const std::size_t m = measurement_index;
    const double u = std::max(0.0, t / h);
    const auto k = static_cast<std::size_t>(std::floor(u));
    const double w = u - static_cast<double>(k);

    if (u < static_cast<double>(m)) {
        if (k >= last) return samples[last];
        if (k + 1 == m) {
            // Right endpoint of the last pre-measurement interval is S(T-).
            if (last < m) return samples[k];
            return lerp_unit(samples[k], pre_measurement, w);
        }
        return lerp_unit(samples[k], samples[k + 1], w);
    }
    if (k >= last) return samples[last];
    return lerp_unit(samples[k], samples[k + 1], w);
}

namespace {

// D(S, target), with the antipodal case resolved by a 1e-8 rad tilt of S along
// a fixed orthogonal direction.
Vec3 interaction(const UnitVec3& s, const UnitVec3& target) {
    const double c = dot(s, target);
    if (c >= -1.0 + kAntipodalThreshold) return sphere_distance_vector(s, target).components;
    const Vec3 chord = target.vec() - c * s.vec();
    const double theta = std::atan2(norm(cross(s, target)), c);
    const double len = norm(chord);
    if (len > 1e-12) return chord * (theta / len);
    const Vec3 e1 = orthonormal_complement(s)[0];
    const UnitVec3 tilted = UnitVec3::normalize(std::cos(1e-8) * s.vec() + std::sin(1e-8) * e1);
    const Vec3 tilted_chord = target.vec() - dot(tilted, target) * tilted.vec();
    return UnitVec3::normalize(tilted_chord).vec() * theta;
}

// Light-cone times of one particle against its partner on the half-step grid
// s_j = j h/2, j = 0 .. 2N.
struct ConeTable {
    std::vector<std::optional<double>> retarded;
    std::vector<std::optional<double>> advanced;
};

ConeTable cone_table(const Worldline& self, const Worldline& other, double h, std::size_t steps) {
    ConeTable table;
    const std::size_t n = 2 * steps + 1;
    table.retarded.resize(n);
    table.advanced.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto times = light_cone_times(self, 0.5 * h * static_cast<double>(j), other);
        table.retarded[j] = times.retarded;
        table.advanced[j] = times.advanced;
    }
    return table;
}

struct Integrator {
    const ExperimentConfig& config;
    IntegrationStats stats;

    SpinTrajectory start(const UnitVec3& initial) const {
        SpinTrajectory traj;
        traj.h = config.h;
        traj.measurement_index = config.measurement_index();
        traj.samples.reserve(config.steps() + 1);
        traj.samples.push_back(initial);
        return traj;
    }

    // One explicit-midpoint step from sample k. `rate(j, S)` evaluates dS/dt at
    // half-grid index j. The caller appends the result.
    template <class Rate>
    UnitVec3 step(const SpinTrajectory& traj, std::size_t k, const Rate& rate) {
        const double h = config.h;
        const UnitVec3& s = traj.samples[k];
        const UnitVec3 mid = UnitVec3::normalize(s.vec() + 0.5 * h * rate(2 * k, s));
        const Vec3 raw = s.vec() + h * rate(2 * k + 1, mid);
        stats.max_norm_drift = std::max(stats.max_norm_drift, std::abs(norm(raw) - 1.0));
        return UnitVec3::normalize(raw);
    }

    // Stores S(T-) and replaces sample m with the projected spin.
    static void measure(SpinTrajectory& traj, const UnitVec3& setting, std::optional<Outcome> forced) {
        const std::size_t m = traj.measurement_index;
        traj.pre_measurement = traj.samples[m];
        const Outcome o = forced ? *forced : measure_spin(setting, traj.pre_measurement);
        traj.samples[m] = o == Outcome::Up ? setting : -setting;
    }
};

}  // namespace

TrajectoryPair integrate_retarded_only(const ExperimentConfig& config,
                                       std::optional<OutcomePair> forced,
                                       std::optional<UnitVec3> initial_b) {
    config.validate();
    const std::size_t n = config.steps();
    const std::size_t m = config.measurement_index();
    const auto wa = config.worldline_a();
    const auto wb = config.worldline_b();
    const ConeTable cone_a = cone_table(wa, wb, config.h, n);
    const ConeTable cone_b = cone_table(wb, wa, config.h, n);

    Integrator integ{config, {}};
    TrajectoryPair out;
    out.a = integ.start(config.s0);
    out.b = integ.start(initial_b ? *initial_b : -config.s0);

    const double kappa = config.kappa;
    auto rate_from = [kappa](const ConeTable& cone, const SpinTrajectory& partner) {
        return [&cone, &partner, kappa](std::size_t j, const UnitVec3& s) {
            Vec3 f;
            if (cone.retarded[j]) f += interaction(s, -partner.at(*cone.retarded[j]));
            return kappa * f;
        };
    };

    for (std::size_t k = 0; k < n; ++k) {
        // Both particles advance from the same time level.
        const UnitVec3 next_a = integ.step(out.a, k, rate_from(cone_a, out.b));
        const UnitVec3 next_b = integ.step(out.b, k, rate_from(cone_b, out.a));
        out.a.samples.push_back(next_a);
        out.b.samples.push_back(next_b);
        if (k + 1 == m) {
            Integrator::measure(out.a, config.a, forced ? std::optional(forced->a) : std::nullopt);
            Integrator::measure(out.b, config.b, forced ? std::optional(forced->b) : std::nullopt);
        }
    }
    out.stats = integ.stats;
    return out;
}

TrajectoryPair picard_step(const ExperimentConfig& config, const TrajectoryPair& previous) {
    const std::size_t n = config.steps();
    const std::size_t m = config.measurement_index();
    const auto wa = config.worldline_a();
    const auto wb = config.worldline_b();
    const ConeTable cone_a = cone_table(wa, wb, config.h, n);
    const ConeTable cone_b = cone_table(wb, wa, config.h, n);

    Integrator integ{config, {}};
    TrajectoryPair out;
    out.a = integ.start(config.s0);
    out.b = integ.start(-config.s0);

    const double kappa = config.kappa;
    auto rate_from = [kappa](const ConeTable& cone, const SpinTrajectory& partner) {
        return [&cone, &partner, kappa](std::size_t j, const UnitVec3& s) {
            Vec3 f;
            if (cone.retarded[j]) f += interaction(s, -partner.at(*cone.retarded[j]));
            if (cone.advanced[j]) f += interaction(s, -partner.at(*cone.advanced[j]));
            return kappa * f;
        };
    };
    const auto rate_a = rate_from(cone_a, previous.b);
    const auto rate_b = rate_from(cone_b, previous.a);
    for (std::size_t k = 0; k < n; ++k) {
        out.a.samples.push_back(integ.step(out.a, k, rate_a));
        out.b.samples.push_back(integ.step(out.b, k, rate_b));
        if (k + 1 == m) {
            Integrator::measure(out.a, config.a, config.seed_outcome.a);
            Integrator::measure(out.b, config.b, config.seed_outcome.b);
        }
    }
    out.stats = integ.stats;
    return out;
}

double trajectory_distance(const TrajectoryPair& x, const TrajectoryPair& y) {
    double worst = 0.0;
    auto compare = [&](const SpinTrajectory& p, const SpinTrajectory& q) {
        if (p.samples.size() != q.samples.size()) {
            throw InvalidConfig("trajectories live on different grids");
        }
        for (std::size_t k = 0; k < p.samples.size(); ++k) {
            worst = std::max(worst, norm(p.samples[k].vec() - q.samples[k].vec()));
        }
        worst = std::max(worst, norm(p.pre_measurement.vec() - q.pre_measurement.vec()));
    };
    compare(x.a, y.a);
    compare(x.b, y.b);
    return worst;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::NoConvergence: return "no-convergence";
        case SolveStatus::SeedInconsistent: return "seed-inconsistent";
    }
    return "?";
}

TimeSymmetricSolution solve_time_symmetric_report(const ExperimentConfig& config) {
    config.validate();
    TimeSymmetricSolution sol;
    sol.seed = config.seed_outcome;

    TrajectoryPair current = integrate_retarded_only(config, config.seed_outcome);
    bool settled = false;
    for (int iter = 1; iter <= config.max_picard_iters; ++iter) {
        TrajectoryPair next = picard_step(config, current);
        sol.residual = trajectory_distance(next, current);
        sol.residual_history.push_back(sol.residual);
        sol.picard_iters = iter;
        current = std::move(next);
        if (sol.residual <= config.picard_tol) {
            settled = true;
            break;
        }
    }
    sol.trajectories = std::move(current);
    sol.realized = {measure_spin(config.a, sol.trajectories.a.pre_measurement),
                    measure_spin(config.b, sol.trajectories.b.pre_measurement)};
    if (!settled) {
        sol.status = SolveStatus::NoConvergence;
    } else if (!(sol.realized == sol.seed)) {
        sol.status = SolveStatus::SeedInconsistent;
    } else {
        sol.status = SolveStatus::Converged;
    }
    sol.converged = sol.status == SolveStatus::Converged;
    return sol;
}

TimeSymmetricSolution solve_time_symmetric(const ExperimentConfig& config) {
    TimeSymmetricSolution sol = solve_time_symmetric_report(config);
    std::ostringstream msg;
    switch (sol.status) {
        case SolveStatus::Converged: return sol;
        case SolveStatus::NoConvergence:
            msg << "Picard residual " << sol.residual << " after " << sol.picard_iters
                << " iterations exceeds tolerance " << config.picard_tol;
            throw NoConvergence(msg.str());
        case SolveStatus::SeedInconsistent:
            msg << "seed " << to_string(sol.seed) << " realizes " << to_string(sol.realized);
            throw SeedInconsistent(msg.str());
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Analysis of converged solutions
// ---------------------------------------------------------------------------

namespace {

double det3(const Vec3& c1, const Vec3& c2, const Vec3& c3) { return dot(c1, cross(c2, c3)); }

struct Triangle {
    Vec3 v1, v2, v3;
};

Triangle triangle_a(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b, const OutcomePair& o) {
    return {s0.vec(), -static_cast<double>(value(o.b)) * b.vec(), static_cast<double>(value(o.a)) * a.vec()};
}

Triangle triangle_b(const UnitVec3& s0, const UnitVec3& a, const UnitVec3& b, const OutcomePair& o) {
    return {-s0.vec(), static_cast<double>(value(o.b)) * b.vec(), -static_cast<double>(value(o.a)) * a.vec()};
}

constexpr double kDegenerateDet = 1e-9;

}  // namespace

FittedParams extract_alpha_beta_gamma(const TimeSymmetricSolution& sol,
                                      const ExperimentConfig& config) {
    const Triangle t = triangle_a(config.s0, config.a, config.b, sol.seed);
    const double det = det3(t.v1, t.v2, t.v3);
    if (std::abs(det) < kDegenerateDet) {
        throw DegenerateBasis("{S0, -B b, A a} is linearly dependent; weights are not identifiable");
    }
    const Vec3 s = sol.trajectories.a.pre_measurement.vec();
    FittedParams fit;
    fit.raw = {det3(s, t.v2, t.v3) / det, det3(t.v1, s, t.v3) / det, det3(t.v1, t.v2, s) / det};
    const Vec3 recon = fit.raw.x * t.v1 + fit.raw.y * t.v2 + fit.raw.z * t.v3;
    fit.residual = norm(recon - s);
    const double total = fit.raw.x + fit.raw.y + fit.raw.z;
    if (!(std::abs(total) > kDegenerateDet)) throw DegenerateBasis("fitted weights sum to zero");
    fit.alpha = fit.raw.x / total;
    fit.beta = fit.raw.y / total;
    fit.gamma = fit.raw.z / total;
    return fit;
}

double triangle_violation(const Vec3& p, const Vec3& v1, const Vec3& v2, const Vec3& v3) {
    const double det = det3(v1, v2, v3);
    if (std::abs(det) < kDegenerateDet) throw DegenerateBasis("degenerate spherical triangle");
    double worst = -kPi;
    const Vec3 verts[3] = {v1, v2, v3};
    for (int e = 0; e < 3; ++e) {
        const Vec3& p1 = verts[e];
        const Vec3& p2 = verts[(e + 1) % 3];
        const Vec3& opposite = verts[(e + 2) % 3];
        Vec3 n = cross(p1, p2);
        if (dot(n, opposite) < 0.0) n = -n;
        const double sine = dot(p, n) / (norm(n) * norm(p));
        worst = std::max(worst, -std::asin(std::clamp(sine, -1.0, 1.0)));
    }
    return worst;
}

TriangleReport check_invariant_triangle(const TrajectoryPair& trajectories, const UnitVec3& s0,
                                        const UnitVec3& a, const UnitVec3& b,
                                        const OutcomePair& outcome, double tolerance) {
    TriangleReport report;
    auto scan = [&](const SpinTrajectory& traj, const Triangle& tri, char who) {
        auto visit = [&](const UnitVec3& s, double t) {
            const double v = triangle_violation(s.vec(), tri.v1, tri.v2, tri.v3);
            ++report.samples_checked;
            if (v > tolerance) ++report.violations;
            if (v > report.max_violation) {
                report.max_violation = v;
                report.worst_particle = who;
                report.worst_time = t;
            }
        };
        for (std::size_t k = 0; k < traj.samples.size(); ++k) {
            visit(traj.samples[k], traj.h * static_cast<double>(k));
        }
        visit(traj.pre_measurement, traj.measurement_time());
    };
    scan(trajectories.a, triangle_a(s0, a, b, outcome), 'A');
    scan(trajectories.b, triangle_b(s0, a, b, outcome), 'B');
    return report;
}

TriangleReport check_invariant_triangle(const TimeSymmetricSolution& sol,
                                        const ExperimentConfig& config, double tolerance) {
    return check_invariant_triangle(sol.trajectories, config.s0, config.a, config.b, sol.seed,
                                    tolerance);
}

}  // namespace retrobell
