#include "saea/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "saea/algorithm.hpp"
#include "saea/drift_lab.hpp"
#include "saea/fitness.hpp"
#include "saea/harness.hpp"
#include "saea/invariants.hpp"
#include "saea/potentials.hpp"

namespace saea::cli {

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FunctionFlags {
    std::size_t L = 100;
    double alpha = 0.25;
    double beta = 0.05;
    double epsilon = 0.05;

    void add_to(CLI::App* app) {
        app->add_option("--L", L, "HotTopic: number of levels")->capture_default_str();
        app->add_option("--alpha", alpha, "HotTopic: |A_i| = floor(alpha n)")->capture_default_str();
        app->add_option("--beta", beta, "HotTopic: |B_i| = floor(beta n)")->capture_default_str();
        app->add_option("--epsilon", epsilon, "HotTopic: level threshold")->capture_default_str();
    }

    [[nodiscard]] FunctionSpec make(const std::string& name) const {
        const auto kind = parse_function_kind(name);
        if (!kind) {
            throw ConfigError("--function: unknown function '" + name + "'");
        }
        if (*kind == FunctionKind::adversarial_hook) {
            throw ConfigError("--function: 'hook' needs a programmatic strategy and is not available here");
        }
        auto spec = FunctionSpec::of(*kind);
        spec.hot_topic = HotTopicParams{L, alpha, beta, epsilon};
        return spec;
    }
};

struct AlgoFlags {
    std::size_t n = 100;
    double c = 1.0;
    double s = 1.0;
    double F = 1.5;
    double lambda_init = 1.0;

    void add_to(CLI::App* app) {
        app->add_option("--n", n, "problem dimension")->capture_default_str();
        app->add_option("--c", c, "mutation rate c/n")->capture_default_str();
        app->add_option("--s", s, "success rate of the (1:s+1) rule")->capture_default_str();
        app->add_option("--F", F, "update strength")->capture_default_str();
        app->add_option("--lambda-init", lambda_init, "initial offspring population size")->capture_default_str();
    }

    [[nodiscard]] AlgorithmParams params() const {
        AlgorithmParams p;
        p.n = n;
        p.c = c;
        p.s = s;
        p.F = F;
        p.lambda_init = lambda_init;
        return p;
    }
};

struct Options {
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;

    struct {
        std::string function = "onemax";
        FunctionFlags fn;
        AlgoFlags algo;
        std::string init = "uniform";
        std::optional<std::uint64_t> cap;
        std::optional<std::uint64_t> eval_cap;
        std::string trajectory = "sampled";
        std::string csv;
        std::string dump_instance;
    } run;

    struct {
        std::string config;
        std::string preset;
        std::vector<std::string> functions;
        FunctionFlags fn;
        std::vector<std::size_t> n_list;
        double c = 0.8;
        double s = 0.5;
        double F = 1.5;
        std::string init = "uniform";
        std::optional<std::size_t> runs;
        std::optional<double> cap_multiplier;
        std::optional<double> cell_budget;
        std::string out;
    } sweep;

    struct {
        std::string function = "onemax";
        FunctionFlags fn;
        AlgoFlags algo;
        std::size_t Z = 1;
        double lambda = 1.0;
        std::string family = "g1";
        double K1 = 1.0;
        double K2 = 1.0;
        double K3 = 1.0;
        double K4 = 20.0;
        std::size_t trials = 100000;
        std::optional<double> cap;
        double confidence = 0.95;
    } drift;

    struct {
        std::string preset = "g1";
        std::size_t n = 1000;
        std::size_t trials = 100000;
        std::size_t budget = 1600000;
        std::size_t representatives = 0;
        double confidence = 0.95;
        std::string csv;
        std::string json;
    } scan;

    struct {
        std::size_t trials = 1000000;
        double sigmas = 4.0;
        std::size_t fuzz_pairs = 10000;
        std::size_t sandwich_states = 100000;
    } verify;

    struct {
        std::string show;
        std::size_t n = 2000;
    } presets;
};

PotentialFamily parse_family(const std::string& name) {
    if (name == "g1") {
        return PotentialFamily::G1;
    }
    if (name == "g2") {
        return PotentialFamily::G2;
    }
    if (name == "g3") {
        return PotentialFamily::G3;
    }
    if (name == "g4") {
        return PotentialFamily::G4;
    }
    throw ConfigError("--family: expected g1, g2, g3 or g4, got '" + name + "'");
}

TrajectoryMode parse_trajectory(const std::string& name) {
    if (name == "none") {
        return TrajectoryMode::none;
    }
    if (name == "sampled") {
        return TrajectoryMode::sampled;
    }
    if (name == "full") {
        return TrajectoryMode::full;
    }
    throw ConfigError("--trajectory: expected none, sampled or full, got '" + name + "'");
}

InitPolicy parse_init(const std::string& text) {
    try {
        return parse_init_policy(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--init: ") + e.what());
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("SA_EA_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used, 0);
            if (used == std::string_view(env).size()) {
                return value;
            }
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("SA_EA_SEED: not an unsigned integer: '") + env + "'");
    }
    return 0;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    return out;
}

void write_trajectory_csv(const std::vector<StepRecord>& records, std::ostream& out) {
    out << "t,zeromax_before,zeromax_after,lambda_before,lambda_after,offspring_count,success\n";
    for (const auto& r : records) {
        fmt::print(out, "{},{},{},{},{},{},{}\n", r.t, r.zeromax_before, r.zeromax_after, r.lambda_before,
                   r.lambda_after, r.offspring_count, r.success ? 1 : 0);
    }
}

int do_run(const Options& o, std::ostream& out) {
    const auto& r = o.run;
    auto params = r.algo.params();
    params.generation_cap = r.cap;
    params.evaluation_cap = r.eval_cap;
    const auto spec = r.fn.make(r.function);
    const auto init = parse_init(r.init);
    RunOptions options;
    options.trajectory = parse_trajectory(r.trajectory);
    try {
        validate(params);
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto seed = resolve_seed(o.seed);
    const auto stream = RngStream::from_key(seed);

    if (!r.dump_instance.empty()) {
        auto construction = stream.derive(StreamRole::instance);
        auto file = open_output(r.dump_instance);
        file << make_instance(spec, params.n, construction).to_json().dump(2) << '\n';
    }

    const auto result = run(params, spec, stream, init, options);
    fmt::print(out,
               "function={} n={} c={} s={} F={} lambda_init={} init={} seed={} generations={} evaluations={} "
               "hit_cap={} initial_zeromax={} final_zeromax={} best_zeromax={} success_generations={} "
               "final_lambda={}\n",
               to_string(spec.kind), params.n, params.c, params.s, params.F, params.lambda_init, describe(init), seed,
               result.generations, result.evaluations, result.hit_cap ? 1 : 0, result.initial_zeromax,
               result.final_zeromax, result.best_zeromax, result.success_generations, result.final_lambda);
    if (!r.csv.empty()) {
        auto file = open_output(r.csv);
        write_trajectory_csv(result.trajectory, file);
    }
    return exit_ok;
}

SweepSpec sweep_from_flags(const Options& o) {
    const auto& w = o.sweep;
    if (!w.config.empty() && !w.preset.empty()) {
        throw ConfigError("sweep: give either --config or --preset, not both");
    }
    SweepSpec spec;
    if (!w.config.empty()) {
        try {
            spec = load_sweep_config(w.config);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (w.preset == "threshold" || w.preset == "fsweep" || w.preset == "scaling") {
        std::vector<FunctionSpec> functions;
        for (const auto& name : w.functions.empty() ? std::vector<std::string>{"onemax"} : w.functions) {
            functions.push_back(w.fn.make(name));
        }
        const std::size_t n = w.n_list.empty() ? 2000 : w.n_list.front();
        if (w.preset == "threshold") {
            spec = preset_threshold_sweep(n, functions);
        } else if (w.preset == "fsweep") {
            spec = preset_F_sweep(w.n_list.empty() ? 1000 : n);
        } else {
            const auto n_list = w.n_list.empty() ? std::vector<std::size_t>{500, 1000, 2000} : w.n_list;
            spec = preset_scaling_experiment(functions.front(), w.c, w.s, w.F, n_list, parse_init(w.init));
        }
    } else if (w.preset.empty()) {
        throw ConfigError("sweep: one of --config or --preset is required");
    } else {
        throw ConfigError("--preset: expected threshold, fsweep or scaling, got '" + w.preset + "'");
    }

    if (o.seed || std::getenv("SA_EA_SEED") != nullptr) {
        spec.master_seed = resolve_seed(o.seed);
    }
    if (w.runs) {
        spec.runs_per_cell = *w.runs;
    }
    if (w.cap_multiplier) {
        spec.generation_cap_multiplier = *w.cap_multiplier;
    }
    if (w.cell_budget) {
        spec.cell_time_budget = *w.cell_budget;
    }
    if (o.workers != 0) {
        spec.workers = o.workers;
    }
    if (!w.out.empty() || !spec.raw_csv || !spec.summary_csv) {
        const std::filesystem::path dir = w.out.empty() ? "." : w.out;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            throw ConfigError("--out: cannot create '" + dir.string() + "'");
        }
        spec.raw_csv = (dir / "raw.csv").string();
        spec.summary_csv = (dir / "summary.csv").string();
    }
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

int do_sweep(const Options& o, std::ostream& out) {
    const auto spec = sweep_from_flags(o);
    SweepResult result;
    try {
        result = run_sweep(spec);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    for (const auto& s : result.summaries) {
        fmt::print(out, "{} n={} c={} s={} F={} runs={} mean_norm_generations={} std={} mean_evaluations={} cap_fraction={}\n",
                   s.cell.function, s.cell.n, s.cell.c, s.cell.s, s.cell.F, s.runs, s.mean_norm_generations,
                   s.std_norm_generations, s.mean_evaluations, s.cap_fraction);
    }
    const auto errored = static_cast<std::size_t>(
        std::count_if(result.runs.begin(), result.runs.end(), [](const RunRecord& r) { return !r.error.empty(); }));
    if (spec.functions.size() == 1 && spec.c_list.size() == 1 && spec.s_list.size() == 1 &&
        spec.F_list.size() == 1) {
        const auto report = scaling_report(result.summaries);
        if (report.ratios_available) {
            fmt::print(out, "scaling: generation_ratio(n={} / n={})={} evaluation_spread={}\n", report.n_max,
                       report.n_min, report.generation_ratio, report.evaluation_spread);
        } else {
            out << "scaling: single n, no ratios\n";
        }
    }
    fmt::print(out, "wrote {} and {} ({} runs, {} errored)\n", *spec.raw_csv, *spec.summary_csv, result.runs.size(),
               errored);
    return errored == 0 ? exit_ok : exit_aborted;
}

void print_estimate(std::ostream& out, const char* label, const DriftEstimate& e) {
    fmt::print(out, "{}: mean={} std_error={} trials={} verdict={}\n", label, e.mean, e.std_error, e.trials,
               to_string(e.verdict()));
}

int do_drift(const Options& o, std::ostream& out) {
    const auto& d = o.drift;
    const auto params = d.algo.params();
    const auto spec = d.fn.make(d.function);
    PotentialSpec pot;
    pot.family = parse_family(d.family);
    pot.F = params.F;
    pot.s = params.s;
    pot.n = params.n;
    pot.g1.K1 = d.K1;
    pot.g2.K2 = d.K2;
    pot.g3 = {d.K1, d.K2, d.K3};
    pot.g4.K4 = d.K4;
    if (d.Z == 0 || d.Z > params.n) {
        throw ConfigError("--Z: must satisfy 1 <= Z <= n");
    }
    const auto seed = RngStream::from_key(resolve_seed(o.seed));
    auto placement = seed.derive(StreamRole::instance);
    auto trials = seed.derive(StreamRole::algorithm);
    const auto x = with_zeromax(params.n, d.Z, placement);
    DriftTriple triple;
    try {
        validate(params);
        triple = estimate_drift(x, d.lambda, params, spec, pot, DriftRequest{d.trials, d.cap, d.confidence}, trials);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    fmt::print(out, "state: function={} n={} Z={} lambda={} family={} confidence={}\n", to_string(spec.kind),
               params.n, d.Z, d.lambda, to_string(pot.family), d.confidence);
    print_estimate(out, "Z-drift", triple.z);
    print_estimate(out, "H-drift", triple.h);
    print_estimate(out, "G-drift", triple.g);
    if (triple.g_truncated) {
        print_estimate(out, "G-drift(truncated)", *triple.g_truncated);
    }
    return exit_ok;
}

int do_scan(const Options& o, std::ostream& out) {
    const auto& sc = o.scan;
    ScanPreset preset;
    try {
        preset = scan_preset(sc.preset, sc.n);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--preset: ") + e.what());
    }
    ScanOptions options;
    options.trials = sc.trials;
    options.trial_budget = std::max(sc.budget, sc.trials);
    options.representatives = sc.representatives;
    options.confidence = sc.confidence;
    const auto report = scan_drift_region(preset.params, preset.function, preset.potential, preset.Z_grid,
                                          preset.lambda_grid, options, RngStream::from_key(resolve_seed(o.seed)));
    for (const auto& cell : report.worst_cells()) {
        fmt::print(out, "Z={} lambda={} g_mean={} g_se={} trials={} verdict={}\n", cell.Z, cell.lambda,
                   cell.drift.g.mean, cell.drift.g.std_error, cell.drift.g.trials, to_string(cell.verdict));
    }
    fmt::print(out, "scan {}: {} cells, all positive: {}\n", preset.name, report.worst_cells().size(),
               report.all_positive() ? "yes" : "no");
    if (!sc.csv.empty()) {
        auto file = open_output(sc.csv);
        write_scan_csv(report, file);
    }
    if (!sc.json.empty()) {
        auto file = open_output(sc.json);
        file << scan_summary_json(report).dump(2) << '\n';
    }
    return exit_ok;
}

int do_verify(const Options& o, std::ostream& out) {
    const auto& v = o.verify;
    const auto seed = RngStream::from_key(resolve_seed(o.seed));
    bool ok = true;

    const auto events = verify_event_probabilities(default_event_grid(), v.trials, seed.derive(1), v.sigmas);
    fmt::print(out, "event probabilities: {} grid points, {} failures\n", events.rows.size(), events.failures());
    for (const auto& row : events.rows) {
        if (!row.pass_a || !row.pass_b) {
            fmt::print(out, "  FAIL n={} Z={} c={} offspring={}: A {} vs {}, B {} vs {}\n", row.point.n, row.point.Z,
                       row.point.c, row.point.offspring, row.closed_a, row.mc_a, row.closed_b, row.mc_b);
        }
    }
    ok = ok && events.all_pass();

    std::vector<InvariantReport> reports;
    auto fuzz = seed.derive(2);
    for (auto kind : {FunctionKind::onemax, FunctionKind::binary, FunctionKind::binary_value,
                      FunctionKind::dynamic_binval, FunctionKind::hot_topic}) {
        reports.push_back(check_monotonicity(FunctionSpec::of(kind), 200, v.fuzz_pairs, 4, fuzz));
    }
    auto sandwich = seed.derive(3);
    for (auto family : {PotentialFamily::G1, PotentialFamily::G2, PotentialFamily::G3}) {
        PotentialSpec pot;
        pot.family = family;
        pot.n = 1000;
        pot.s = 0.5;
        pot.g3 = {1.0, 3.0, 1.0};
        reports.push_back(check_sandwich(pot, v.sandwich_states, sandwich));
    }
    AlgorithmParams params;
    params.n = 300;
    params.c = 1.0;
    params.s = 0.5;
    RunOptions full;
    full.trajectory = TrajectoryMode::full;
    const auto result = run(params, FunctionSpec::of(FunctionKind::onemax), seed.derive(4), UniformRandomInit{}, full);
    reports.push_back(check_trajectory(result, params, params.lambda_init));

    for (const auto& r : reports) {
        fmt::print(out, "{}: {} checks, {} violations\n", r.name, r.checks, r.violations);
        for (const auto& e : r.examples) {
            fmt::print(out, "  {}\n", e);
        }
        ok = ok && r.ok();
    }
    out << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
    return ok ? exit_ok : exit_check_failed;
}

int do_presets(const Options& o, std::ostream& out) {
    const auto& p = o.presets;
    if (p.show.empty()) {
        out << "sweep presets:\n"
               "  threshold  F=1.5, c=1, s grid over [0.5, 10], uniform init\n"
               "  fsweep     dynbinval, s=1.8, c in {0.98, 1}, F grid 1.1..32\n"
               "  scaling    one (function, c, s, F) cell over several n\n"
               "scan presets:\n"
               "  g1  s=0.1, c=0.8, F=1.5, Z in {1, .01n, .1n, .5n, .9n}, lambda 1..512\n"
               "  g4  s=30, K4=20, Z in [0.45n, 0.5n], small lambda\n"
               "  g3  s=30, near-optimum region Z <= 2 eps n\n";
        return exit_ok;
    }
    SweepSpec spec;
    if (p.show == "threshold") {
        spec = preset_threshold_sweep(p.n, {FunctionSpec::of(FunctionKind::onemax)});
    } else if (p.show == "fsweep") {
        spec = preset_F_sweep(p.n);
    } else if (p.show == "scaling") {
        spec = preset_scaling_experiment(FunctionSpec::of(FunctionKind::onemax), 0.8, 0.5, 1.5, {500, 1000, 2000});
    } else {
        throw ConfigError("--show: unknown preset '" + p.show + "'");
    }
    spec.master_seed = resolve_seed(o.seed);
    out << to_json(spec).dump(2) << '\n';
    return exit_ok;
}

struct Parser {
    Options o;
    CLI::App app{"Self-adjusting (1,lambda)-EA simulator, drift laboratory and experiment harness", "saea"};
    std::vector<CLI::App*> verbs;

    Parser() {
        app.require_subcommand(1);
        app.set_version_flag("--version", "0.1.0");

        auto add_common = [this](CLI::App* sub) {
            sub->add_option("--seed", o.seed, "master seed (falls back to SA_EA_SEED, then 0)");
            verbs.push_back(sub);
        };

        auto* run = app.add_subcommand("run", "single seeded run; --seed is the stream key, so a sweep row's seed replays it");
        add_common(run);
        run->add_option("--function", o.run.function, "onemax|binary|binaryvalue|dynbinval|hottopic")
            ->capture_default_str();
        o.run.algo.add_to(run);
        o.run.fn.add_to(run);
        run->add_option("--init", o.run.init, "uniform | zeromax:<k>")->capture_default_str();
        run->add_option("--cap", o.run.cap, "generation cap (default 500 n)");
        run->add_option("--eval-cap", o.run.eval_cap, "evaluation cap (default none)");
        run->add_option("--trajectory", o.run.trajectory, "none|sampled|full")->capture_default_str();
        run->add_option("--csv", o.run.csv, "write trajectory records to this CSV");
        run->add_option("--dump-instance", o.run.dump_instance, "write the generation-0 instance as JSON");

        auto* sweep = app.add_subcommand("sweep", "parameter sweep from a JSON config or a preset");
        add_common(sweep);
        sweep->add_option("--workers", o.workers, "worker threads, 0 = available parallelism")->capture_default_str();
        sweep->add_option("--config", o.sweep.config, "JSON sweep config");
        sweep->add_option("--preset", o.sweep.preset, "threshold|fsweep|scaling");
        sweep->add_option("--function", o.sweep.functions, "functions for threshold/scaling (repeatable)");
        o.sweep.fn.add_to(sweep);
        sweep->add_option("--n", o.sweep.n_list, "dimension(s); scaling accepts several (default 500 1000 2000)");
        sweep->add_option("--c", o.sweep.c, "scaling: mutation rate c/n")->capture_default_str();
        sweep->add_option("--s", o.sweep.s, "scaling: success rate")->capture_default_str();
        sweep->add_option("--F", o.sweep.F, "scaling: update strength")->capture_default_str();
        sweep->add_option("--init", o.sweep.init, "scaling: uniform | zeromax:<k>")->capture_default_str();
        sweep->add_option("--runs", o.sweep.runs, "runs per cell (preset default 10)");
        sweep->add_option("--cap-multiplier", o.sweep.cap_multiplier, "generation cap = multiplier * n (default 500)");
        sweep->add_option("--cell-budget", o.sweep.cell_budget, "per-cell wall-clock budget in seconds (default off)");
        sweep->add_option("--out", o.sweep.out, "directory for raw.csv and summary.csv (default .)");

        auto* drift = app.add_subcommand("drift", "one-step drift estimate at a frozen (x, lambda)");
        add_common(drift);
        drift->add_option("--function", o.drift.function, "onemax|binary|binaryvalue|dynbinval|hottopic")
            ->capture_default_str();
        o.drift.algo.add_to(drift);
        o.drift.fn.add_to(drift);
        drift->add_option("--Z", o.drift.Z, "zero-bits of the frozen parent")->capture_default_str();
        drift->add_option("--lambda", o.drift.lambda, "frozen lambda")->capture_default_str();
        drift->add_option("--family", o.drift.family, "potential g1|g2|g3|g4")->capture_default_str();
        drift->add_option("--K1", o.drift.K1, "K1 (g1, g3)")->capture_default_str();
        drift->add_option("--K2", o.drift.K2, "K2 (g2, g3)")->capture_default_str();
        drift->add_option("--K3", o.drift.K3, "K3 (g3)")->capture_default_str();
        drift->add_option("--K4", o.drift.K4, "K4 (g4)")->capture_default_str();
        drift->add_option("--trials", o.drift.trials, "Monte-Carlo trials (>= 1000)")->capture_default_str();
        drift->add_option("--cap", o.drift.cap, "truncation cap for the G-drift samples (default none)");
        drift->add_option("--confidence", o.drift.confidence, "verdict confidence level")->capture_default_str();

        auto* scan = app.add_subcommand("scan", "drift-sign scan over a (Z, lambda) grid");
        add_common(scan);
        scan->add_option("--preset", o.scan.preset, "g1|g4|g3")->capture_default_str();
        scan->add_option("--n", o.scan.n, "problem dimension")->capture_default_str();
        scan->add_option("--trials", o.scan.trials, "trials per cell")->capture_default_str();
        scan->add_option("--budget", o.scan.budget, "max trials per cell after escalation")->capture_default_str();
        scan->add_option("--representatives", o.scan.representatives,
                         "representatives per cell, 0 = automatic")
            ->capture_default_str();
        scan->add_option("--confidence", o.scan.confidence, "verdict confidence level")->capture_default_str();
        scan->add_option("--csv", o.scan.csv, "write all cells to this CSV");
        scan->add_option("--json", o.scan.json, "write the verdict summary to this JSON file");

        auto* verify = app.add_subcommand("verify", "event-probability and invariant suites; exit 3 on failure");
        add_common(verify);
        verify->add_option("--trials", o.verify.trials, "Monte-Carlo trials per grid point")->capture_default_str();
        verify->add_option("--sigmas", o.verify.sigmas, "tolerance in binomial standard errors")
            ->capture_default_str();
        verify->add_option("--fuzz-pairs", o.verify.fuzz_pairs, "dominated pairs per function and generation")
            ->capture_default_str();
        verify->add_option("--sandwich-states", o.verify.sandwich_states, "random states per potential family")
            ->capture_default_str();

        auto* presets = app.add_subcommand("presets", "list presets, or print one as a sweep config");
        add_common(presets);
        presets->add_option("--show", o.presets.show, "threshold|fsweep|scaling");
        presets->add_option("--n", o.presets.n, "dimension for --show")->capture_default_str();
    }

    int dispatch(std::ostream& out) {
        const auto* sub = app.get_subcommands().front();
        const auto& name = sub->get_name();
        if (name == "run") {
            return do_run(o, out);
        }
        if (name == "sweep") {
            return do_sweep(o, out);
        }
        if (name == "drift") {
            return do_drift(o, out);
        }
        if (name == "scan") {
            return do_scan(o, out);
        }
        if (name == "verify") {
            return do_verify(o, out);
        }
        return do_presets(o, out);
    }
};

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto parser = std::make_unique<Parser>();
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        parser->app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = parser->app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config_error;
    }
    try {
        return parser->dispatch(out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const HookViolation& e) {
        err << "aborted: " << e.what() << '\n';
        return exit_aborted;
    } catch (const RunAborted& e) {
        err << "aborted: " << e.what() << '\n';
        return exit_aborted;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    }
}

std::vector<std::string> flags_of(const std::string& verb) {
    Parser parser;
    std::vector<std::string> flags;
    for (const auto* sub : parser.verbs) {
        if (sub->get_name() != verb) {
            continue;
        }
        for (const auto* opt : sub->get_options()) {
            for (const auto& name : opt->get_lnames()) {
                flags.push_back("--" + name);
            }
        }
    }
    return flags;
}

std::vector<std::string> undocumented_flags() {
    Parser parser;
    std::vector<std::string> missing;
    for (const auto* sub : parser.verbs) {
        const auto help = sub->help();
        for (const auto* opt : sub->get_options()) {
            for (const auto& name : opt->get_lnames()) {
                const auto flag = "--" + name;
                const auto at = help.find(flag);
                // The flag must be followed by a delimiter, so "--n" is not satisfied by "--no-x".
                bool found = false;
                for (auto pos = at; pos != std::string::npos; pos = help.find(flag, pos + 1)) {
                    const auto next = pos + flag.size();
                    if (next >= help.size() || help[next] == ' ' || help[next] == ',' || help[next] == '\n') {
                        found = true;
                        break;
                    }
                }
                if (!found || opt->get_description().empty()) {
                    missing.push_back(sub->get_name() + " " + flag);
                }
            }
        }
    }
    return missing;
}

}  // namespace saea::cli
