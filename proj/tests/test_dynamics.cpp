#include <cmath>
#include <optional>

#include "doctest.h"
#include "retrobell/dynamics.hpp"
#include "retrobell/errors.hpp"

using namespace retrobell;

namespace {

double geodesic(const UnitVec3& x, const UnitVec3& y) {
    return std::atan2(norm(cross(x, y)), dot(x, y));
}

// Pinned configuration where <a,S0> = <b,S0> = 0.01 at a = 0, b = 120 degrees.
ExperimentConfig ambiguity_config() {
    ExperimentConfig c;
    const double r = 0.02;
    c.s0 = UnitVec3::normalize(r * 0.5, r * std::sqrt(3.0) / 2, std::sqrt(1 - r * r));
    return c;
}

// The seed whose solve converges self-consistently at the default S0.
std::optional<TimeSymmetricSolution> first_converged(ExperimentConfig c) {
    for (const auto& seed : kAllOutcomePairs) {
        c.seed_outcome = seed;
        auto sol = solve_time_symmetric_report(c);
        if (sol.converged) return sol;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("light cone times: static worldlines") {
    const auto i = Worldline::stationary(0, 10, 0);
    const auto j = Worldline::stationary(0, 10, 1.5);
    const auto times = light_cone_times(i, 5, j);
    REQUIRE(times.retarded);
    REQUIRE(times.advanced);
    CHECK(*times.retarded == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(*times.advanced == doctest::Approx(6.5).epsilon(1e-14));

    const auto late = light_cone_times(i, 9, j);
    CHECK(late.retarded);
    CHECK_FALSE(late.advanced);  // 10.5 lies past absorption
    const auto early = light_cone_times(i, 1, j);
    CHECK_FALSE(early.retarded);  // before creation
}

TEST_CASE("light cone times: symmetric recession") {
    const double v = 0.5;
    const auto a = Worldline::inertial(0, 2.1, 0, -v);
    const auto b = Worldline::inertial(0, 2.1, 0, v);
    for (double t : {0.1, 0.5, 1.0, 1.5}) {
        const auto times = light_cone_times(a, t, b);
        REQUIRE(times.retarded);
        CHECK(std::abs(*times.retarded - t * (1 - v) / (1 + v)) < 1e-14);
        const double adv = t * (1 + v) / (1 - v);
        if (adv <= 2.1) {
            REQUIRE(times.advanced);
            CHECK(std::abs(*times.advanced - adv) < 1e-14);
            // Null condition holds at the returned event.
            CHECK(std::abs((adv - t) - std::abs(b.position(adv) - a.position(t))) < 1e-12);
        } else {
            CHECK_FALSE(times.advanced);
        }
    }
}

TEST_CASE("light cone times: piecewise worldline") {
    // j moves right, then stops.
    const Worldline j({{0, 1, 1, 0.5}, {1, 4, 1.5, 0.0}});
    const auto i = Worldline::stationary(0, 4, 0);
    const auto times = light_cone_times(i, 3, j);
    REQUIRE(times.retarded);
    CHECK(*times.retarded == doctest::Approx(1.5));
    // Advanced time would be 4.5, past j's end.
    CHECK_FALSE(times.advanced);
    const auto t2 = light_cone_times(i, 1.6, j);
    REQUIRE(t2.retarded);
    // Retarded on the first segment: 1.6 - tau = 1 + 0.5 tau.
    CHECK(*t2.retarded == doctest::Approx(0.4));
}

TEST_CASE("worldline validation") {
    CHECK_THROWS_AS(Worldline({{0, 1, 0, 1.0}}), InvalidConfig);
    CHECK_THROWS_AS(Worldline({{1, 1, 0, 0.1}}), InvalidConfig);
    CHECK_THROWS_AS(Worldline({{0, 1, 0, 0.1}, {1, 2, 5, 0.1}}), InvalidConfig);
}

TEST_CASE("config validation") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.h = 0.02;  // not below delta/10
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c = ExperimentConfig{};
    c.v = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c = ExperimentConfig{};
    c.kappa = -1;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c = ExperimentConfig{};
    c.h = 3e-4;  // T = 2 is not on this grid
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
}

TEST_CASE("config parsing") {
    const auto c = parse_experiment_config(
        "# comment\n"
        "L = 1.5\n v=0.5 \n"
        "kappa = 2  # trailing comment\n"
        "a = angle:30\n"
        "s0 = 0,0,2\n"
        "seed_outcome = +1,-1\n"
        "max_picard_iters = 50\n");
    CHECK(c.L == 1.5);
    CHECK(c.kappa == 2.0);
    CHECK(c.a.x() == doctest::Approx(std::cos(kPi / 6)));
    CHECK(c.s0.z() == 1.0);
    CHECK(c.seed_outcome.a == Outcome::Up);
    CHECK(c.seed_outcome.b == Outcome::Down);
    CHECK(c.max_picard_iters == 50);

    CHECK_THROWS_AS(parse_experiment_config("bogus = 1\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_experiment_config("kappa\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_experiment_config("kappa = fast\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_experiment_config("s0 = 0,0,0\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_experiment_config("seed_outcome = 1\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_experiment_config("h = 0.05\n"), InvalidConfig);
}

TEST_CASE("retarded-only singlet data is stationary before the measurement") {
    const ExperimentConfig c;
    const auto traj = integrate_retarded_only(c);
    const std::size_t m = c.measurement_index();
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        worst = std::max(worst, norm(traj.a.samples[k].vec() - c.s0.vec()));
        worst = std::max(worst, norm(traj.b.samples[k].vec() + c.s0.vec()));
    }
    worst = std::max(worst, norm(traj.a.pre_measurement.vec() - c.s0.vec()));
    CHECK(worst < 1e-10);
}

TEST_CASE("measurement projects onto the setting") {
    const ExperimentConfig c;
    const auto traj = integrate_retarded_only(c);
    const std::size_t m = c.measurement_index();
    CHECK(traj.a.samples[m] == project_spin(c.a, traj.a.pre_measurement));
    CHECK(traj.b.samples[m] == project_spin(c.b, traj.b.pre_measurement));
    // Forced outcomes override the sign.
    const OutcomePair forced{-measure_spin(c.a, c.s0), Outcome::Up};
    const auto f = integrate_retarded_only(c, forced);
    CHECK(f.a.samples[m] == (forced.a == Outcome::Up ? c.a : -c.a));
}

TEST_CASE("non-singlet data relaxes toward the antipodal configuration") {
    // The retarded source lags by t - tau_ret = 2vt/(1+v); at kappa = 1 that delay
    // makes the pair overshoot the antipode before T (delayed negative feedback),
    // so the monotone approach is checked at weak coupling.
    ExperimentConfig c;
    c.kappa = 0.25;
    const auto b0 = UnitVec3::normalize(-c.s0.x() + 0.3, -c.s0.y(), -c.s0.z() + 0.2);
    const auto traj = integrate_retarded_only(c, std::nullopt, b0);
    const std::size_t m = c.measurement_index();
    double prev = geodesic(traj.a.samples[0], -traj.b.samples[0]);
    const double start = prev;
    bool monotone = true;
    for (std::size_t k = 1; k < m; ++k) {
        const double g = geodesic(traj.a.samples[k], -traj.b.samples[k]);
        if (g > prev + 1e-15) monotone = false;
        prev = g;
    }
    CHECK(monotone);
    CHECK(prev < 0.5 * start);

    c.kappa = 1.0;
    const auto strong = integrate_retarded_only(c, std::nullopt, b0);
    double closest = start;
    for (std::size_t k = 0; k < m; ++k) {
        closest = std::min(closest, geodesic(strong.a.samples[k], -strong.b.samples[k]));
    }
    CHECK(closest < 1e-3);
}

TEST_CASE("norm drift before renormalization stays small at the default step") {
    ExperimentConfig c = ambiguity_config();
    c.seed_outcome = {Outcome::Up, Outcome::Down};
    const auto sol = solve_time_symmetric_report(c);
    CHECK(sol.trajectories.stats.max_norm_drift < 1e-6);
    for (const auto& s : sol.trajectories.a.samples) CHECK(std::abs(norm(s) - 1) < 1e-9);
}

TEST_CASE("midpoint integration converges at second order") {
    ExperimentConfig c;
    c.kappa = 2.0;
    const auto b0 = UnitVec3::normalize(-c.s0.x() + 0.4, -c.s0.y() - 0.2, -c.s0.z() + 0.1);
    std::vector<UnitVec3> at_one;
    for (double h : {2e-3, 1e-3, 5e-4}) {
        c.h = h;
        const auto traj = integrate_retarded_only(c, std::nullopt, b0);
        at_one.push_back(traj.a.samples[static_cast<std::size_t>(std::llround(1.0 / h))]);
    }
    const double e1 = norm(at_one[0].vec() - at_one[1].vec());
    const double e2 = norm(at_one[1].vec() - at_one[2].vec());
    const double ratio = e1 / e2;
    MESSAGE("error ratio " << ratio);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("kappa = 0 reproduces the local solution in one iteration") {
    ExperimentConfig c;
    c.kappa = 0;
    const OutcomePair local{measure_spin(c.a, c.s0), measure_spin(c.b, -c.s0)};
    int converged = 0;
    for (const auto& seed : kAllOutcomePairs) {
        c.seed_outcome = seed;
        const auto sol = solve_time_symmetric_report(c);
        CHECK(sol.picard_iters == 1);
        if (sol.converged) {
            ++converged;
            CHECK(seed == local);
            const auto fit = extract_alpha_beta_gamma(sol, c);
            CHECK(std::abs(fit.alpha - 1) < 1e-9);
            CHECK(std::abs(fit.beta) < 1e-9);
            CHECK(std::abs(fit.gamma) < 1e-9);
            const auto tri = check_invariant_triangle(sol, c);
            CHECK(tri.violations == 0);
        } else {
            CHECK(sol.status == SolveStatus::SeedInconsistent);
        }
    }
    CHECK(converged == 1);
}

TEST_CASE("equal settings reject a coincidence seed") {
    ExperimentConfig c;
    c.b = c.a;
    c.seed_outcome = {Outcome::Up, Outcome::Up};
    const auto sol = solve_time_symmetric_report(c);
    CHECK(sol.status == SolveStatus::SeedInconsistent);
    CHECK_FALSE(sol.converged);
    CHECK_THROWS_AS(solve_time_symmetric(c), SeedInconsistent);
}

TEST_CASE("ambiguity region admits several self-consistent seeds") {
    ExperimentConfig c = ambiguity_config();
    int converged = 0;
    bool equal_found = false;
    bool unequal_found = false;
    for (const auto& seed : kAllOutcomePairs) {
        c.seed_outcome = seed;
        const auto sol = solve_time_symmetric_report(c);
        if (!sol.converged) continue;
        ++converged;
        CHECK(sol.residual <= c.picard_tol);
        CHECK(sol.realized == seed);
        (seed.equal() ? equal_found : unequal_found) = true;
    }
    CHECK(converged >= 2);
    CHECK(equal_found);
    CHECK(unequal_found);
}

TEST_CASE("iteration limit surfaces as NoConvergence") {
    ExperimentConfig c = ambiguity_config();
    c.seed_outcome = {Outcome::Up, Outcome::Down};
    c.max_picard_iters = 2;
    const auto sol = solve_time_symmetric_report(c);
    CHECK(sol.status == SolveStatus::NoConvergence);
    CHECK_THROWS_AS(solve_time_symmetric(c), NoConvergence);
}

TEST_CASE("fitted weights follow alpha > beta > gamma > 0") {
    const ExperimentConfig c;
    const auto sol = first_converged(c);
    REQUIRE(sol);
    const auto fit = extract_alpha_beta_gamma(*sol, c);
    MESSAGE("alpha " << fit.alpha << " beta " << fit.beta << " gamma " << fit.gamma);
    CHECK(fit.alpha > fit.beta);
    CHECK(fit.beta > fit.gamma);
    CHECK(fit.gamma > 0);
    CHECK(std::abs(fit.alpha + fit.beta + fit.gamma - 1) < 1e-12);
    CHECK(fit.residual < 1e-3);
}

TEST_CASE("degenerate basis is reported, not fitted") {
    ExperimentConfig c;
    c.kappa = 0;
    c.b = c.a;
    c.s0 = c.a;
    c.seed_outcome = {Outcome::Up, Outcome::Down};
    const auto sol = solve_time_symmetric_report(c);
    CHECK_THROWS_AS(extract_alpha_beta_gamma(sol, c), DegenerateBasis);
}

TEST_CASE("invariant triangle holds for converged runs and catches corruption") {
    const ExperimentConfig c;
    auto sol = first_converged(c);
    REQUIRE(sol);
    const auto tri = check_invariant_triangle(*sol, c);
    CHECK(tri.violations == 0);
    CHECK(tri.samples_checked > 0);
    CHECK(tri.max_violation <= 1e-6);

    auto broken = *sol;
    broken.trajectories.a.samples[100] = -c.s0;
    const auto bad = check_invariant_triangle(broken, c);
    CHECK(bad.violations >= 1);
    CHECK(bad.worst_particle == 'A');
    CHECK(bad.max_violation > 1e-3);
}

TEST_CASE("triangle_violation sign convention") {
    const Vec3 x{1, 0, 0}, y{0, 1, 0}, z{0, 0, 1};
    CHECK(triangle_violation(UnitVec3::normalize(1, 1, 1), x, y, z) < 0);
    CHECK(triangle_violation(UnitVec3::normalize(-1, 1, 1), x, y, z) > 0);
    CHECK_THROWS_AS(triangle_violation(x, x, y, x + y), DegenerateBasis);
}

TEST_CASE("Picard residual decreases after the first iteration for kappa <= 2") {
    for (double kappa : {0.5, 1.0, 2.0}) {
        ExperimentConfig c = ambiguity_config();
        c.kappa = kappa;
        c.seed_outcome = {Outcome::Up, Outcome::Down};
        const auto sol = solve_time_symmetric_report(c);
        REQUIRE(sol.residual_history.size() >= 3);
        for (std::size_t i = 2; i < sol.residual_history.size(); ++i) {
            CHECK(sol.residual_history[i] <= sol.residual_history[i - 1]);
        }
    }
}

TEST_CASE("first advanced correction to B points toward -A a") {
    ExperimentConfig c;
    for (const auto& seed : kAllOutcomePairs) {
        c.seed_outcome = seed;
        const auto base = integrate_retarded_only(c, seed);
        const auto next = picard_step(c, base);
        const Vec3 target = -value(seed.a) * c.a.vec();
        // Sample the pre-measurement segment where the advanced source exists.
        const std::size_t m = c.measurement_index();
        for (std::size_t k : {m / 2, 3 * m / 4, m - 1}) {
            const Vec3 delta = next.b.samples[k].vec() - base.b.samples[k].vec();
            CHECK(dot(delta, target) > 0);
        }
    }
}

TEST_CASE("fitted gamma grows with the coupling") {
    double prev = 0.0;
    for (double kappa : {0.25, 0.5, 1.0, 2.0}) {
        ExperimentConfig c;
        c.kappa = kappa;
        const auto sol = first_converged(c);
        REQUIRE(sol);
        const double gamma = extract_alpha_beta_gamma(*sol, c).gamma;
        MESSAGE("kappa " << kappa << " gamma " << gamma);
        CHECK(gamma > prev);
        prev = gamma;
    }
}

TEST_CASE("trajectory interpolation") {
    const ExperimentConfig c;
    const auto traj = integrate_retarded_only(c);
    auto same = [](const UnitVec3& x, const UnitVec3& y) { return norm(x.vec() - y.vec()) < 1e-15; };
    CHECK(same(traj.a.at(0.0), traj.a.samples[0]));
    CHECK(same(traj.a.at(c.measurement_time()), traj.a.samples[c.measurement_index()]));
    CHECK(norm(traj.a.at(c.measurement_time() - 1e-12).vec() - traj.a.pre_measurement.vec()) < 1e-9);
    CHECK(same(traj.a.at(100.0), traj.a.samples.back()));
    const double mid = 0.5 * (traj.b.samples[10].vec().x + traj.b.samples[11].vec().x);
    CHECK(std::abs(traj.b.at(10.5 * c.h).x() - mid) < 1e-12);
}
