#include "saea/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "saea/stats.hpp"

namespace saea {

namespace {

using Json = nlohmann::json;

struct Cell {
    FunctionSpec function;
    CellKey key;
};

std::vector<Cell> expand_cells(const SweepSpec& spec) {
    std::vector<Cell> cells;
    for (const auto& f : spec.functions) {
        for (auto n : spec.n_list) {
            for (auto c : spec.c_list) {
                for (auto s : spec.s_list) {
                    for (auto F : spec.F_list) {
                        cells.push_back({f, CellKey{std::string(to_string(f.kind)), n, c, s, F}});
                    }
                }
            }
        }
    }
    return cells;
}

std::string sanitize(std::string text) {
    for (auto& ch : text) {
        if (ch == ',' || ch == '\n' || ch == '\r') {
            ch = ';';
        } else if (ch == '"') {
            ch = '\'';
        }
    }
    return text;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

template <typename T>
T parse_number(const std::string& text, const char* column) {
    try {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_same_v<T, double>) {
            value = std::stod(text, &used);
        } else {
            value = static_cast<T>(std::stoull(text, &used));
        }
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("malformed value in column '") + column + "': '" + text + "'");
    }
}

bool parse_bool(const std::string& text, const char* column) {
    if (text == "1") {
        return true;
    }
    if (text == "0") {
        return false;
    }
    throw std::invalid_argument(std::string("malformed boolean in column '") + column + "': '" + text + "'");
}

void require_header(std::istream& in, const char* expected) {
    std::string header;
    if (!std::getline(in, header)) {
        throw std::invalid_argument("csv: missing header");
    }
    if (!header.empty() && header.back() == '\r') {
        header.pop_back();
    }
    if (header != expected) {
        const auto got = split_row(header);
        const auto want = split_row(expected);
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (i >= got.size() || got[i] != want[i]) {
                throw std::invalid_argument("csv: header mismatch at column " + std::to_string(i + 1) + ", expected '" +
                                            want[i] + "'");
            }
        }
        throw std::invalid_argument("csv: header has extra columns");
    }
}

template <typename T>
std::vector<T> number_list(const Json& j) {
    if (!j.is_array()) {
        return {j.get<T>()};
    }
    return j.get<std::vector<T>>();
}

std::uint64_t cell_hash(const CellKey& cell) {
    return hash_words({hash_string(cell.function), cell.n, std::bit_cast<std::uint64_t>(cell.c),
                       std::bit_cast<std::uint64_t>(cell.s), std::bit_cast<std::uint64_t>(cell.F)});
}

}  // namespace

void validate(const SweepSpec& spec) {
    for (const auto& f : spec.functions) {
        validate(f);
    }
    for (auto n : spec.n_list) {
        if (n == 0) {
            throw std::invalid_argument("n: values must be positive");
        }
        for (auto c : spec.c_list) {
            if (!(c > 0.0) || c > static_cast<double>(n)) {
                throw std::invalid_argument("c: values must satisfy 0 < c <= n");
            }
        }
    }
    for (auto s : spec.s_list) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("s: values must be > 0");
        }
    }
    for (auto F : spec.F_list) {
        if (!(F > 1.0)) {
            throw std::invalid_argument("F: values must be > 1");
        }
    }
    if (spec.runs_per_cell == 0) {
        throw std::invalid_argument("runs_per_cell: must be positive");
    }
    if (!(spec.generation_cap_multiplier >= 0.0)) {
        throw std::invalid_argument("generation_cap_multiplier: must be non-negative");
    }
    if (!(spec.lambda_init >= 1.0)) {
        throw std::invalid_argument("lambda_init: must be >= 1");
    }
    if (spec.cell_time_budget && !(*spec.cell_time_budget > 0.0)) {
        throw std::invalid_argument("cell_time_budget: must be positive");
    }
}

std::uint64_t generation_cap(const SweepSpec& spec, std::size_t n) {
    return static_cast<std::uint64_t>(std::llround(spec.generation_cap_multiplier * static_cast<double>(n)));
}

std::uint64_t run_seed(std::uint64_t master_seed, const CellKey& cell, std::size_t run_index) {
    return RngStream(master_seed, hash_words({cell_hash(cell), run_index})).key();
}

SweepResult run_sweep(const SweepSpec& spec) {
    validate(spec);
    const auto cells = expand_cells(spec);
    const std::size_t total = cells.size() * spec.runs_per_cell;
    std::vector<RunRecord> records(total);

    using Clock = std::chrono::steady_clock;
    std::vector<std::optional<Clock::time_point>> cell_start(cells.size());
    std::mutex start_mutex;

    const auto execute = [&](std::size_t task) {
        const auto& cell = cells[task / spec.runs_per_cell];
        const std::size_t cell_index = task / spec.runs_per_cell;
        RunRecord rec;
        rec.cell = cell.key;
        rec.run_index = task % spec.runs_per_cell;
        rec.seed = run_seed(spec.master_seed, cell.key, rec.run_index);
        rec.init = describe(spec.init);

        AlgorithmParams params;
        params.n = cell.key.n;
        params.c = cell.key.c;
        params.s = cell.key.s;
        params.F = cell.key.F;
        params.lambda_init = spec.lambda_init;
        params.generation_cap = generation_cap(spec, params.n);

        RunOptions options;
        options.trajectory = TrajectoryMode::none;
        if (spec.cell_time_budget) {
            Clock::time_point start;
            {
                std::lock_guard lock(start_mutex);
                if (!cell_start[cell_index]) {
                    cell_start[cell_index] = Clock::now();
                }
                start = *cell_start[cell_index];
            }
            const auto budget = std::chrono::duration<double>(*spec.cell_time_budget);
            options.should_abort = [start, budget] { return Clock::now() - start > budget; };
        }

        try {
            const auto result = run(params, cell.function, RngStream::from_key(rec.seed), spec.init, options);
            rec.generations = result.generations;
            rec.evaluations = result.evaluations;
            rec.hit_cap = result.hit_cap;
            rec.final_zeromax = result.final_zeromax;
            rec.success_generations = result.success_generations;
            rec.normalized_generations = static_cast<double>(result.generations) / static_cast<double>(params.n);
        } catch (const RunAborted&) {
            rec.error = "cell time budget exceeded";
        } catch (const HookViolation& e) {
            rec.error = sanitize(std::string("hook violation: ") + e.what());
        } catch (const std::exception& e) {
            rec.error = sanitize(e.what());
        }
        records[task] = std::move(rec);
    };

    std::size_t workers = spec.workers != 0 ? spec.workers : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(total, 1));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t task = next++; task < total; task = next++) {
            execute(task);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
    }

    SweepResult result;
    result.runs = std::move(records);
    result.summaries = summarize(result.runs);
    if (spec.raw_csv) {
        std::ofstream out(*spec.raw_csv);
        if (!out) {
            throw std::runtime_error("cannot write " + *spec.raw_csv);
        }
        write_raw_csv(result.runs, out);
    }
    if (spec.summary_csv) {
        std::ofstream out(*spec.summary_csv);
        if (!out) {
            throw std::runtime_error("cannot write " + *spec.summary_csv);
        }
        write_summary_csv(result.summaries, out);
    }
    return result;
}

std::vector<CellSummary> summarize(const std::vector<RunRecord>& runs) {
    std::vector<CellKey> order;
    std::vector<std::vector<const RunRecord*>> groups;
    for (const auto& r : runs) {
        auto it = std::find(order.begin(), order.end(), r.cell);
        if (it == order.end()) {
            order.push_back(r.cell);
            groups.emplace_back();
            it = order.end() - 1;
        }
        if (r.error.empty()) {
            groups[static_cast<std::size_t>(it - order.begin())].push_back(&r);
        }
    }

    std::vector<CellSummary> summaries;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& group = groups[i];
        std::sort(group.begin(), group.end(),
                  [](const RunRecord* a, const RunRecord* b) { return a->run_index < b->run_index; });
        std::vector<double> norm;
        std::vector<double> evals;
        std::size_t capped = 0;
        for (const auto* r : group) {
            norm.push_back(r->normalized_generations);
            evals.push_back(static_cast<double>(r->evaluations));
            capped += r->hit_cap ? 1 : 0;
        }
        CellSummary s;
        s.cell = order[i];
        s.runs = group.size();
        if (group.empty()) {
            s.mean_norm_generations = s.std_norm_generations = s.mean_evaluations = s.cap_fraction = std::nan("");
        } else {
            s.mean_norm_generations = mean(norm);
            s.std_norm_generations = sample_stddev(norm);
            s.mean_evaluations = mean(evals);
            s.cap_fraction = static_cast<double>(capped) / static_cast<double>(group.size());
        }
        summaries.push_back(s);
    }
    return summaries;
}

void write_raw_csv(const std::vector<RunRecord>& runs, std::ostream& out) {
    out << raw_csv_header << '\n';
    for (const auto& r : runs) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.cell.function, r.cell.n, r.cell.c,
                           r.cell.s, r.cell.F, r.run_index, r.seed, r.init, r.generations, r.evaluations,
                           r.hit_cap ? 1 : 0, r.final_zeromax, r.success_generations, r.normalized_generations,
                           sanitize(r.error));
    }
}

void write_summary_csv(const std::vector<CellSummary>& summaries, std::ostream& out) {
    out << summary_csv_header << '\n';
    for (const auto& s : summaries) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", s.cell.function, s.cell.n, s.cell.c, s.cell.s, s.cell.F,
                           s.runs, s.mean_norm_generations, s.std_norm_generations, s.mean_evaluations,
                           s.cap_fraction);
    }
}

void validate_record(const RunRecord& r, std::optional<double> cap_multiplier) {
    if (!parse_function_kind(r.cell.function)) {
        throw std::invalid_argument("run record: unknown function '" + r.cell.function + "'");
    }
    if (r.cell.n == 0) {
        throw std::invalid_argument("run record: n must be positive");
    }
    if (!r.error.empty()) {
        return;
    }
    if (r.normalized_generations != static_cast<double>(r.generations) / static_cast<double>(r.cell.n)) {
        throw std::invalid_argument("run record: normalized_generations != generations / n");
    }
    if (r.evaluations < r.generations) {
        throw std::invalid_argument("run record: evaluations < generations");
    }
    if (!r.hit_cap && r.final_zeromax != 0) {
        throw std::invalid_argument("run record: run neither capped nor optimal");
    }
    if (r.hit_cap && r.final_zeromax == 0) {
        throw std::invalid_argument("run record: capped run reports the optimum");
    }
    if (cap_multiplier && r.hit_cap &&
        r.generations != static_cast<std::uint64_t>(std::llround(*cap_multiplier * static_cast<double>(r.cell.n)))) {
        throw std::invalid_argument("run record: capped run does not sit at the generation cap");
    }
    if (r.success_generations > r.generations) {
        throw std::invalid_argument("run record: more successes than generations");
    }
}

std::vector<RunRecord> read_raw_csv(std::istream& in, std::optional<double> cap_multiplier) {
    require_header(in, raw_csv_header);
    std::vector<RunRecord> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_row(line);
        if (f.size() != 15) {
            throw std::invalid_argument("raw csv line " + std::to_string(line_no) + ": expected 15 fields");
        }
        RunRecord r;
        r.cell.function = f[0];
        r.cell.n = parse_number<std::size_t>(f[1], "n");
        r.cell.c = parse_number<double>(f[2], "c");
        r.cell.s = parse_number<double>(f[3], "s");
        r.cell.F = parse_number<double>(f[4], "F");
        r.run_index = parse_number<std::size_t>(f[5], "run_index");
        r.seed = parse_number<std::uint64_t>(f[6], "seed");
        r.init = f[7];
        r.generations = parse_number<std::uint64_t>(f[8], "generations");
        r.evaluations = parse_number<std::uint64_t>(f[9], "evaluations");
        r.hit_cap = parse_bool(f[10], "hit_cap");
        r.final_zeromax = parse_number<std::size_t>(f[11], "final_zeromax");
        r.success_generations = parse_number<std::uint64_t>(f[12], "success_generations");
        r.normalized_generations = parse_number<double>(f[13], "normalized_generations");
        r.error = f[14];
        try {
            validate_record(r, cap_multiplier);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("raw csv line " + std::to_string(line_no) + ": " + e.what());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<CellSummary> read_summary_csv(std::istream& in) {
    require_header(in, summary_csv_header);
    std::vector<CellSummary> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_row(line);
        if (f.size() != 10) {
            throw std::invalid_argument("summary csv: expected 10 fields");
        }
        CellSummary s;
        s.cell.function = f[0];
        s.cell.n = parse_number<std::size_t>(f[1], "n");
        s.cell.c = parse_number<double>(f[2], "c");
        s.cell.s = parse_number<double>(f[3], "s");
        s.cell.F = parse_number<double>(f[4], "F");
        s.runs = parse_number<std::size_t>(f[5], "runs");
        s.mean_norm_generations = parse_number<double>(f[6], "mean_norm_generations");
        s.std_norm_generations = parse_number<double>(f[7], "std_norm_generations");
        s.mean_evaluations = parse_number<double>(f[8], "mean_evaluations");
        s.cap_fraction = parse_number<double>(f[9], "cap_fraction");
        rows.push_back(s);
    }
    return rows;
}

SweepSpec sweep_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: expected a JSON object");
    }
    SweepSpec spec;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "functions") {
                spec.functions.clear();
                if (value.is_array()) {
                    for (const auto& f : value) {
                        spec.functions.push_back(function_spec_from_json(f));
                    }
                } else {
                    spec.functions.push_back(function_spec_from_json(value));
                }
            } else if (key == "n") {
                spec.n_list = number_list<std::size_t>(value);
            } else if (key == "c") {
                spec.c_list = number_list<double>(value);
            } else if (key == "s") {
                spec.s_list = number_list<double>(value);
            } else if (key == "F") {
                spec.F_list = number_list<double>(value);
            } else if (key == "runs_per_cell") {
                spec.runs_per_cell = value.get<std::size_t>();
            } else if (key == "generation_cap_multiplier") {
                spec.generation_cap_multiplier = value.get<double>();
            } else if (key == "master_seed") {
                spec.master_seed = value.get<std::uint64_t>();
            } else if (key == "init") {
                spec.init = parse_init_policy(value.get<std::string>());
            } else if (key == "lambda_init") {
                spec.lambda_init = value.get<double>();
            } else if (key == "raw_csv") {
                spec.raw_csv = value.get<std::string>();
            } else if (key == "summary_csv") {
                spec.summary_csv = value.get<std::string>();
            } else if (key == "workers") {
                spec.workers = value.get<std::size_t>();
            } else if (key == "cell_time_budget") {
                spec.cell_time_budget = value.get<double>();
            } else {
                throw std::invalid_argument("unknown key");
            }
        } catch (const std::exception& e) {
            throw std::invalid_argument("config key '" + key + "': " + e.what());
        }
    }
    validate(spec);
    return spec;
}

nlohmann::json to_json(const SweepSpec& spec) {
    Json functions = Json::array();
    for (const auto& f : spec.functions) {
        functions.push_back(to_json(f));
    }
    Json j{{"functions", functions},
           {"n", spec.n_list},
           {"c", spec.c_list},
           {"s", spec.s_list},
           {"F", spec.F_list},
           {"runs_per_cell", spec.runs_per_cell},
           {"generation_cap_multiplier", spec.generation_cap_multiplier},
           {"master_seed", spec.master_seed},
           {"init", describe(spec.init)},
           {"lambda_init", spec.lambda_init},
           {"workers", spec.workers}};
    if (spec.raw_csv) {
        j["raw_csv"] = *spec.raw_csv;
    }
    if (spec.summary_csv) {
        j["summary_csv"] = *spec.summary_csv;
    }
    if (spec.cell_time_budget) {
        j["cell_time_budget"] = *spec.cell_time_budget;
    }
    return j;
}

SweepSpec load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open '" + path + "'");
    }
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }
    return sweep_from_json(j);
}

SweepSpec preset_threshold_sweep(std::size_t n, const std::vector<FunctionSpec>& functions) {
    SweepSpec spec;
    spec.functions = functions;
    spec.n_list = {n};
    spec.c_list = {1.0};
    spec.F_list = {1.5};
    spec.s_list = {0.5, 1.0, 1.5, 2.0, 2.5, 2.75, 3.0, 3.2, 3.4, 3.6, 3.8, 4.0, 4.25, 4.5, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    return spec;
}

SweepSpec preset_F_sweep(std::size_t n) {
    SweepSpec spec;
    spec.functions = {FunctionSpec::of(FunctionKind::dynamic_binval)};
    spec.n_list = {n};
    spec.c_list = {0.98, 1.0};
    spec.s_list = {1.8};
    spec.F_list = {1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 5.0, 6.25, 8.0, 12.0, 16.0, 24.0, 32.0};
    return spec;
}

SweepSpec preset_scaling_experiment(const FunctionSpec& function, double c, double s, double F,
                                    const std::vector<std::size_t>& n_list, InitPolicy init) {
    SweepSpec spec;
    spec.functions = {function};
    spec.n_list = n_list;
    spec.c_list = {c};
    spec.s_list = {s};
    spec.F_list = {F};
    spec.init = std::move(init);
    return spec;
}

ScalingReport scaling_report(const std::vector<CellSummary>& summaries) {
    ScalingReport report;
    std::map<std::size_t, const CellSummary*> by_n;
    for (const auto& s : summaries) {
        by_n[s.cell.n] = &s;
    }
    if (by_n.empty()) {
        return report;
    }
    report.n_min = by_n.begin()->first;
    report.n_max = by_n.rbegin()->first;
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& [n, s] : by_n) {
        const double nd = static_cast<double>(n);
        const double v = s->mean_evaluations / (nd * std::log(nd));
        report.evaluations_per_nlogn.push_back(v);
        lo = report.evaluations_per_nlogn.size() == 1 ? v : std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (by_n.size() < 2) {
        return report;
    }
    report.ratios_available = true;
    report.generation_ratio = by_n.rbegin()->second->mean_norm_generations / by_n.begin()->second->mean_norm_generations;
    report.evaluation_spread = hi / lo;
    return report;
}

}  // namespace saea
