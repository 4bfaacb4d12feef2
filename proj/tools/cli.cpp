#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "retrobell/dynamics.hpp"
#include "retrobell/errors.hpp"
#include "retrobell/montecarlo.hpp"
#include "retrobell/probability.hpp"
#include "table.hpp"

namespace retrobell::cli {

namespace {

// Bad user input that CLI11 cannot catch by itself (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kSchemaColumns = {
    "nu", "beta", "gamma", "angle_deg", "p_min", "p_max",
    "median", "method", "n_samples", "stderr", "regime_ok"};

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_number(xs[i]);
    return s;
}

double checked_angle(double deg) {
    if (!(deg >= 0.0 && deg < 360.0)) {
        throw UsageError("InvalidAngle: " + format_number(deg) + " outside [0, 360)");
    }
    return deg;
}

struct ParamOptions {
    std::optional<double> nu;
    std::optional<double> beta;
    std::optional<double> gamma;

    void attach(CLI::App* cmd) {
        cmd->add_option("--nu", nu, "advanced-interaction strength (beta = nu, gamma = nu^2)");
        cmd->add_option("--beta", beta, "feed-forward weight");
        cmd->add_option("--gamma", gamma, "preinforcement weight");
    }

    bool given() const { return nu || beta || gamma; }

    ModelParams resolve() const {
        if (nu && (beta || gamma)) throw UsageError("use either --nu or --beta/--gamma, not both");
        try {
            if (nu) return nu_params_unchecked(*nu);
            if (beta && gamma) return ModelParams::from_beta_gamma(*beta, *gamma);
        } catch (const OutOfRange& e) {
            throw UsageError(e.what());
        }
        throw UsageError("model parameters required: --nu or --beta with --gamma");
    }

    void describe(Table& t) const {
        if (nu) t.add_meta("nu", format_number(*nu));
        if (beta) t.add_meta("beta", format_number(*beta));
        if (gamma) t.add_meta("gamma", format_number(*gamma));
    }
};

struct SeedOption {
    std::optional<std::uint64_t> flag;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", flag, "master seed (default: $RETROBELL_SEED, else 1)");
    }

    // Returns (seed, source).
    std::pair<std::uint64_t, std::string> resolve() const {
        if (flag) return {*flag, "flag"};
        if (const char* env = std::getenv("RETROBELL_SEED"); env && *env) {
            try {
                std::size_t used = 0;
                const unsigned long long v = std::stoull(env, &used);
                if (used != std::string(env).size()) throw std::invalid_argument(env);
                return {v, "env"};
            } catch (const std::exception&) {
                throw UsageError(std::string("RETROBELL_SEED is not an unsigned integer: ") + env);
            }
        }
        return {1, "default"};
    }
};

Table base_table(const std::string& command) {
    Table t;
    t.add_meta("tool", kToolName);
    t.add_meta("version", kVersion);
    t.add_meta("command", command);
    return t;
}

void add_seed_meta(Table& t, const SeedOption& seed) {
    const auto [value, source] = seed.resolve();
    t.add_meta("seed", std::to_string(value));
    t.add_meta("seed_source", source);
}

std::vector<Cell> schema_row(const SweepRow& r) {
    std::vector<Cell> row;
    row.push_back(r.nu ? Cell{*r.nu} : Cell{});
    row.push_back(r.beta);
    row.push_back(r.gamma);
    row.push_back(r.angle_deg);
    if (r.bounds) {
        row.push_back(r.bounds->p_min);
        row.push_back(r.bounds->p_max);
        row.push_back(r.bounds->median);
    } else {
        row.insert(row.end(), 3, Cell{});
    }
    row.push_back(to_string(r.method));
    row.push_back(static_cast<std::int64_t>(r.n_samples));
    row.push_back(r.std_error);
    row.push_back(r.regime_ok());
    return row;
}

ProbabilityOracle make_oracle(const std::string& model, const ParamOptions& params,
                              const std::string& policy) {
    if (model == "local") return local_oracle();
    if (model == "qm") return qm_oracle();
    if (model == "bounds") {
        try {
            return bounds_oracle(params.resolve(), parse_policy(policy));
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
    throw UsageError("unknown model '" + model + "' (local, qm, bounds)");
}

std::vector<double> parse_angle_list(const std::string& text, std::size_t expected,
                                     const std::string& what) {
    const auto xs = parse_grid(text);
    if (xs.size() != expected) {
        throw UsageError(what + " expects " + std::to_string(expected) + " comma-separated angles");
    }
    for (double x : xs) checked_angle(x);
    return xs;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct LocalCmd {
    std::optional<double> angle;
    std::optional<std::string> triple;
    std::uint64_t mc_samples = 0;
    SeedOption seed;

    Table run() const {
        if (angle.has_value() == triple.has_value()) {
            throw UsageError("local needs exactly one of --angle or --triple");
        }
        Table t = base_table("local");
        add_seed_meta(t, seed);
        t.add_meta("mc_samples", std::to_string(mc_samples));
        t.columns = {"pair", "angle_deg", "p_anticoincidence", "mc_p", "mc_stderr"};
        const auto local = ModelParams::unchecked(1.0, 0.0, 0.0);
        const auto seed_value = seed.resolve().first;
        std::uint64_t stream = 0;

        auto pair_row = [&](const std::string& label, double deg_x, double deg_y) {
            const auto x = UnitVec3::in_plane(deg_x);
            const auto y = UnitVec3::in_plane(deg_y);
            const double between = angle_between_deg(x, y);
            std::vector<Cell> row{label, between, local_anticoincidence(between)};
            if (mc_samples > 0) {
                const auto est = monte_carlo_anticoincidence(x, y, local, SfpPolicy::Unbiased,
                                                             mc_samples, mix_seed(seed_value, stream));
                row.push_back(est.probability);
                row.push_back(est.std_error);
            } else {
                row.insert(row.end(), 2, Cell{});
            }
            ++stream;
            t.rows.push_back(row);
            return local_anticoincidence(between);
        };

        if (angle) {
            t.add_meta("angle", format_number(*angle));
            pair_row("a-b", 0.0, checked_angle(*angle));
        } else {
            const auto xs = parse_angle_list(*triple, 3, "--triple");
            t.add_meta("triple", join(xs));
            double sum = pair_row("a-b", xs[0], xs[1]);
            sum += pair_row("b-c", xs[1], xs[2]);
            sum += pair_row("a-c", xs[0], xs[2]);
            // Recomputed through bell_sum so the reported sum is the library's value.
            const double bell = bell_sum(BellTriple{xs[0], xs[1], xs[2]}, local_oracle());
            (void)sum;
            t.rows.push_back({std::string("bell_sum"), Cell{}, bell, Cell{}, Cell{}});
        }
        return t;
    }
};

struct BoundsCmd {
    double angle = 120.0;
    ParamOptions params;

    // Returns the table and whether the row was regime-valid.
    std::pair<Table, bool> run() const {
        checked_angle(angle);
        const ModelParams p = params.resolve();
        Table t = base_table("bounds");
        t.add_meta("angle", format_number(angle));
        params.describe(t);
        t.columns = kSchemaColumns;
        SweepRow row;
        row.nu = params.nu;
        row.beta = p.beta();
        row.gamma = p.gamma();
        row.angle_deg = angle;
        const auto [a, b] = coplanar_pair(angle);
        if (in_case_regime(dot(a, b), p)) row.bounds = probability_bounds(a, b, p);
        t.rows.push_back(schema_row(row));
        return {t, row.regime_ok()};
    }
};

struct SweepCmd {
    std::string figure = "fig6";
    double angle = 120.0;
    std::optional<std::string> nu_grid;
    std::optional<std::string> beta_grid;
    std::optional<std::string> gamma_grid;
    SeedOption seed;

    Table run() const {
        checked_angle(angle);
        Table t = base_table("sweep");
        t.add_meta("figure", figure);
        t.add_meta("angle", format_number(angle));
        add_seed_meta(t, seed);
        t.columns = kSchemaColumns;
        std::vector<SweepRow> rows;
        if (figure == "fig6") {
            const auto grid = parse_grid(nu_grid.value_or("0:0.33:0.01"));
            if (grid.empty()) throw UsageError("empty nu grid");
            t.add_meta("nu_grid", join(grid));
            try {
                rows = sweep_nu(grid, angle);
            } catch (const OutOfRange& e) {
                throw UsageError(e.what());
            }
        } else if (figure == "fig7") {
            const auto betas = parse_grid(beta_grid.value_or("0.02:0.4:0.02"));
            const auto gammas = parse_grid(gamma_grid.value_or("0.01:0.2:0.01"));
            if (betas.empty() || gammas.empty()) throw UsageError("empty beta/gamma grid");
            t.add_meta("beta_grid", join(betas));
            t.add_meta("gamma_grid", join(gammas));
            try {
                rows = sweep_beta_gamma(betas, gammas, angle);
            } catch (const OutOfRange& e) {
                throw UsageError(e.what());
            }
        } else {
            throw UsageError("unknown figure '" + figure + "' (fig6, fig7)");
        }
        for (const auto& r : rows) t.rows.push_back(schema_row(r));
        return t;
    }
};

struct McCmd {
    double angle = 120.0;
    ParamOptions params;
    std::string policy = "unbiased";
    std::uint64_t n = 1000000;
    SeedOption seed;

    Table run() const {
        checked_angle(angle);
        const ModelParams p = params.resolve();
        SfpPolicy pol;
        try {
            pol = parse_policy(policy);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        if (n == 0) throw UsageError("-n must be >= 1");
        Table t = base_table("mc");
        t.add_meta("angle", format_number(angle));
        params.describe(t);
        t.add_meta("policy", policy);
        t.add_meta("n", std::to_string(n));
        add_seed_meta(t, seed);
        t.columns = kSchemaColumns;
        t.columns.push_back("policy");
        t.columns.push_back("ambiguity_frequency");

        const auto [a, b] = coplanar_pair(angle);
        const auto est = monte_carlo_anticoincidence(a, b, p, pol, n, seed.resolve().first);
        std::vector<Cell> row{params.nu ? Cell{*params.nu} : Cell{}, p.beta(), p.gamma(), angle};
        for (SfpPolicy slot : {SfpPolicy::FavorEqual, SfpPolicy::FavorUnequal, SfpPolicy::Unbiased}) {
            row.push_back(slot == pol ? Cell{est.probability} : Cell{});
        }
        row.push_back(to_string(Method::MonteCarlo));
        row.push_back(static_cast<std::int64_t>(n));
        row.push_back(est.std_error);
        row.push_back(in_case_regime(dot(a, b), p));
        row.push_back(policy);
        row.push_back(est.ambiguity_frequency());
        t.rows.push_back(row);
        return t;
    }
};

struct BellCmd {
    std::string triple = "0,120,240";
    std::string model = "local";
    std::string policy = "favor-unequal";
    ParamOptions params;

    Table run() const {
        const auto xs = parse_angle_list(triple, 3, "--triple");
        const auto oracle = make_oracle(model, params, policy);
        Table t = base_table("bell");
        t.add_meta("triple", join(xs));
        t.add_meta("model", model);
        if (model == "bounds") {
            t.add_meta("policy", policy);
            params.describe(t);
        }
        t.columns = {"pair", "angle_deg", "p_anticoincidence"};
        const auto a = UnitVec3::in_plane(xs[0]);
        const auto b = UnitVec3::in_plane(xs[1]);
        const auto c = UnitVec3::in_plane(xs[2]);
        t.rows.push_back({std::string("a-b"), angle_between_deg(a, b), oracle(a, b)});
        t.rows.push_back({std::string("b-c"), angle_between_deg(b, c), oracle(b, c)});
        t.rows.push_back({std::string("a-c"), angle_between_deg(a, c), oracle(a, c)});
        const double sum = bell_sum(BellTriple{xs[0], xs[1], xs[2]}, oracle);
        t.rows.push_back({std::string("bell_sum"), Cell{}, sum});
        t.add_meta("violated", sum < 1.0 ? "true" : "false");
        return t;
    }
};

struct ChshCmd {
    // a, a', b, b' in degrees.
    std::string settings = "0,90,45,315";
    std::string model = "qm";
    std::string policy = "favor-unequal";
    ParamOptions params;

    Table run() const {
        const auto xs = parse_angle_list(settings, 4, "--settings");
        const auto oracle = make_oracle(model, params, policy);
        Table t = base_table("chsh");
        t.add_meta("settings", join(xs));
        t.add_meta("model", model);
        if (model == "bounds") {
            t.add_meta("policy", policy);
            params.describe(t);
        }
        const auto a = UnitVec3::in_plane(xs[0]);
        const auto ap = UnitVec3::in_plane(xs[1]);
        const auto b = UnitVec3::in_plane(xs[2]);
        const auto bp = UnitVec3::in_plane(xs[3]);
        t.columns = {"term", "angle_deg", "correlation"};
        auto corr = [&](const UnitVec3& x, const UnitVec3& y) { return 1.0 - 2.0 * oracle(x, y); };
        t.rows.push_back({std::string("E(a,b)"), angle_between_deg(a, b), corr(a, b)});
        t.rows.push_back({std::string("E(a,b')"), angle_between_deg(a, bp), corr(a, bp)});
        t.rows.push_back({std::string("E(a',b)"), angle_between_deg(ap, b), corr(ap, b)});
        t.rows.push_back({std::string("E(a',b')"), angle_between_deg(ap, bp), corr(ap, bp)});
        const double s = chsh_value(a, ap, b, bp, oracle);
        t.rows.push_back({std::string("chsh"), Cell{}, s});
        t.add_meta("violated", std::abs(s) > 2.0 ? "true" : "false");
        return t;
    }
};

struct ScreeningCmd {
    double angle_a = 0.0;
    std::string b_angles = "120,100";
    std::string center = "0.05,0.9526,0.2994";
    double radius = 0.01;
    ParamOptions params;
    std::string policy = "unbiased";
    std::uint64_t n = 100000;
    SeedOption seed;

    Table run() const {
        checked_angle(angle_a);
        const auto bs = parse_grid(b_angles);
        if (bs.empty()) throw UsageError("--b-angles must list at least one angle");
        for (double x : bs) checked_angle(x);
        const auto c = parse_grid(center);
        if (c.size() != 3) throw UsageError("--bin-center expects x,y,z");
        UnitVec3 center_dir;
        try {
            center_dir = UnitVec3::normalize(c[0], c[1], c[2]);
        } catch (const ZeroVector& e) {
            throw UsageError(e.what());
        }
        if (!(radius > 0.0)) throw UsageError("EmptyBin: --bin-radius must be positive");
        if (n == 0) throw UsageError("-n must be >= 1");
        SfpPolicy pol;
        try {
            pol = parse_policy(policy);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        const ModelParams p = params.resolve();

        Table t = base_table("screening");
        t.add_meta("angle_a", format_number(angle_a));
        t.add_meta("b_angles", join(bs));
        t.add_meta("bin_center", join({center_dir.x(), center_dir.y(), center_dir.z()}));
        t.add_meta("bin_radius", format_number(radius));
        params.describe(t);
        t.add_meta("policy", policy);
        t.add_meta("n", std::to_string(n));
        add_seed_meta(t, seed);

        std::vector<UnitVec3> variants;
        for (double x : bs) variants.push_back(UnitVec3::in_plane(x));
        const auto report = screening_analysis(UnitVec3::in_plane(angle_a), variants, p, pol,
                                               SpinBin{center_dir, radius}, n, seed.resolve().first);
        t.columns = {"b_angle_deg", "samples", "a_up", "p_a_up", "stderr"};
        for (double x : bs) t.columns.push_back("z_vs_" + format_number(x));
        for (std::size_t i = 0; i < report.entries.size(); ++i) {
            const auto& e = report.entries[i];
            std::vector<Cell> row{bs[i], static_cast<std::int64_t>(e.samples),
                                  static_cast<std::int64_t>(e.a_up), e.p_a_up, e.std_error};
            for (double z : report.z_scores[i]) row.push_back(z);
            t.rows.push_back(row);
        }
        return t;
    }
};

struct DynamicsCmd {
    std::string config_path;

    Table run() const {
        std::ifstream in(config_path);
        if (!in) throw UsageError("cannot read config file '" + config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        ExperimentConfig config;
        try {
            config = parse_experiment_config(buf.str());
        } catch (const InvalidConfig& e) {
            throw UsageError(e.what());
        }

        Table t = base_table("dynamics");
        for (const auto& [key, value] : describe(config)) t.add_meta(key, value);
        t.columns = {"seed_a", "seed_b", "status", "picard_iters", "residual", "realized_a",
                     "realized_b", "alpha", "beta", "gamma", "fit_residual",
                     "triangle_max_violation", "triangle_violations", "max_norm_drift"};
        for (const auto& seed : kAllOutcomePairs) {
            ExperimentConfig c = config;
            c.seed_outcome = seed;
            const auto sol = solve_time_symmetric_report(c);
            std::vector<Cell> row{static_cast<std::int64_t>(value(seed.a)),
                                  static_cast<std::int64_t>(value(seed.b)),
                                  to_string(sol.status),
                                  static_cast<std::int64_t>(sol.picard_iters),
                                  sol.residual,
                                  static_cast<std::int64_t>(value(sol.realized.a)),
                                  static_cast<std::int64_t>(value(sol.realized.b))};
            if (sol.converged) {
                try {
                    const auto fit = extract_alpha_beta_gamma(sol, c);
                    row.insert(row.end(), {fit.alpha, fit.beta, fit.gamma, fit.residual});
                } catch (const DegenerateBasis&) {
                    row.insert(row.end(), 4, Cell{});
                }
                try {
                    const auto tri = check_invariant_triangle(sol, c);
                    row.push_back(tri.max_violation);
                    row.push_back(static_cast<std::int64_t>(tri.violations));
                } catch (const DegenerateBasis&) {
                    row.insert(row.end(), 2, Cell{});
                }
            } else {
                row.insert(row.end(), 6, Cell{});
            }
            row.push_back(sol.trajectories.stats.max_norm_drift);
            t.rows.push_back(row);
        }
        return t;
    }
};

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + s + "' in '" + text + "'");
        }
    };
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        if (parts.size() != 3) throw UsageError("range must be start:stop:step");
        const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
        if (!(step > 0.0) || stop < start) throw UsageError("range needs step > 0 and stop >= start");
        const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 10000000) throw UsageError("range too long");
        for (std::int64_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number(item));
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-symmetric EPRB hidden-variable model: probabilities, bounds and dynamics",
                 kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string out_path;
    std::string format_name = "csv";
    auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--out,-o", out_path, "output file (default: stdout)");
        cmd->add_option("--format", format_name, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    LocalCmd local;
    auto* c_local = app.add_subcommand("local", "local (retarded-only) model probabilities");
    c_local->add_option("--angle", local.angle, "angle between settings, degrees");
    c_local->add_option("--triple", local.triple, "three coplanar settings a,b,c in degrees");
    c_local->add_option("--mc-samples", local.mc_samples, "optional Monte Carlo cross-check");
    local.seed.attach(c_local);
    add_output(c_local);

    BoundsCmd bounds;
    auto* c_bounds = app.add_subcommand("bounds", "P_min / P_max / median of A != B");
    c_bounds->add_option("--angle", bounds.angle, "angle between a and b, degrees");
    bounds.params.attach(c_bounds);
    add_output(c_bounds);

    SweepCmd sweep;
    auto* c_sweep = app.add_subcommand("sweep", "nu sweep (fig6) or beta/gamma sweep (fig7)");
    c_sweep->add_option("figure", sweep.figure, "fig6 or fig7");
    c_sweep->add_option("--angle", sweep.angle, "angle between a and b, degrees");
    c_sweep->add_option("--nu-grid", sweep.nu_grid, "list a,b,c or range start:stop:step");
    c_sweep->add_option("--beta-grid", sweep.beta_grid, "list or range");
    c_sweep->add_option("--gamma-grid", sweep.gamma_grid, "list or range");
    sweep.seed.attach(c_sweep);
    add_output(c_sweep);

    McCmd mc;
    auto* c_mc = app.add_subcommand("mc", "Monte Carlo anti-coincidence frequency");
    c_mc->add_option("--angle", mc.angle, "angle between a and b, degrees");
    mc.params.attach(c_mc);
    c_mc->add_option("--policy", mc.policy, "favor-equal, favor-unequal or unbiased");
    c_mc->add_option("-n,--samples", mc.n, "number of S0 samples");
    mc.seed.attach(c_mc);
    add_output(c_mc);

    BellCmd bell;
    auto* c_bell = app.add_subcommand("bell", "three-term Bell sum");
    c_bell->add_option("--triple", bell.triple, "settings a,b,c in degrees");
    c_bell->add_option("--model", bell.model, "local, qm or bounds");
    c_bell->add_option("--policy", bell.policy, "bound used by the bounds model");
    bell.params.attach(c_bell);
    add_output(c_bell);

    ChshCmd chsh;
    auto* c_chsh = app.add_subcommand("chsh", "CHSH correlator sum");
    c_chsh->add_option("--settings", chsh.settings, "a,a',b,b' in degrees");
    c_chsh->add_option("--model", chsh.model, "local, qm or bounds");
    c_chsh->add_option("--policy", chsh.policy, "bound used by the bounds model");
    chsh.params.attach(c_chsh);
    add_output(c_chsh);

    ScreeningCmd screening;
    auto* c_scr = app.add_subcommand("screening", "parameter dependence of P(A=+1 | a, b, S0 in bin)");
    c_scr->add_option("--angle-a", screening.angle_a, "setting a, degrees");
    c_scr->add_option("--b-angles", screening.b_angles, "settings b to compare, degrees");
    c_scr->add_option("--bin-center", screening.center, "bin center x,y,z");
    c_scr->add_option("--bin-radius", screening.radius, "bin angular radius, radians");
    screening.params.attach(c_scr);
    c_scr->add_option("--policy", screening.policy, "favor-equal, favor-unequal or unbiased");
    c_scr->add_option("-n,--samples", screening.n, "samples per b variant");
    screening.seed.attach(c_scr);
    add_output(c_scr);

    DynamicsCmd dynamics;
    auto* c_dyn = app.add_subcommand("dynamics", "solve the time-symmetric dynamics for all four outcome seeds");
    c_dyn->add_option("config", dynamics.config_path, "key=value experiment config")->required();
    add_output(c_dyn);

    std::vector<std::string> argv_store{kToolName};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        Table table;
        int status = kOk;
        if (c_local->parsed()) {
            table = local.run();
        } else if (c_bounds->parsed()) {
            auto [t, ok] = bounds.run();
            table = std::move(t);
            if (!ok) {
                err << "RegimeViolation: beta|<a,b>| >= gamma with <a,b> < 0 does not hold; row flagged\n";
                status = kComputationError;
            }
        } else if (c_sweep->parsed()) {
            table = sweep.run();
        } else if (c_mc->parsed()) {
            table = mc.run();
        } else if (c_bell->parsed()) {
            table = bell.run();
        } else if (c_chsh->parsed()) {
            table = chsh.run();
        } else if (c_scr->parsed()) {
            table = screening.run();
        } else {
            table = dynamics.run();
        }

        const Format format = format_name == "json" ? Format::Json : Format::Csv;
        if (out_path.empty()) {
            write_table(table, format, out);
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) throw UsageError("cannot open output file '" + out_path + "'");
            write_table(table, format, file);
        }
        return status;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kComputationError;
    }
}

}  // namespace retrobell::cli
