#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "saea/algorithm.hpp"
#include "saea/fitness.hpp"

namespace saea {

/// Cartesian product functions x n x c x s x F, each cell run `runs_per_cell` times.
struct SweepSpec {
    std::vector<FunctionSpec> functions;
    std::vector<std::size_t> n_list;
    std::vector<double> c_list;
    std::vector<double> s_list;
    std::vector<double> F_list;
    std::size_t runs_per_cell = 10;
    double generation_cap_multiplier = 500.0;
    std::uint64_t master_seed = 0;
    InitPolicy init = UniformRandomInit{};
    double lambda_init = 1.0;
    std::optional<std::string> raw_csv;
    std::optional<std::string> summary_csv;
    /// 0 means one worker per hardware thread.
    std::size_t workers = 0;
    /// Per-cell wall-clock budget in seconds; runs past it are recorded with an error.
    std::optional<double> cell_time_budget;
};

struct CellKey {
    std::string function;
    std::size_t n = 0;
    double c = 0.0;
    double s = 0.0;
    double F = 0.0;

    friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct RunRecord {
    CellKey cell;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    std::string init;
    std::uint64_t generations = 0;
    std::uint64_t evaluations = 0;
    bool hit_cap = false;
    std::size_t final_zeromax = 0;
    std::uint64_t success_generations = 0;
    double normalized_generations = 0.0;
    std::string error;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct CellSummary {
    CellKey cell;
    std::size_t runs = 0;
    double mean_norm_generations = 0.0;
    double std_norm_generations = 0.0;  // unbiased (n-1)
    double mean_evaluations = 0.0;
    double cap_fraction = 0.0;

    friend bool operator==(const CellSummary&, const CellSummary&) = default;
};

struct SweepResult {
    std::vector<RunRecord> runs;
    std::vector<CellSummary> summaries;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const SweepSpec& spec);

/// Generation cap for dimension n: round(multiplier * n).
std::uint64_t generation_cap(const SweepSpec& spec, std::size_t n);

/// Seed key of run `run_index` in `cell`; independent of the other cells in the sweep.
std::uint64_t run_seed(std::uint64_t master_seed, const CellKey& cell, std::size_t run_index);

/// Executes all runs (concurrently up to `workers`) and writes the configured CSVs.
/// Output is identical for any worker count.
SweepResult run_sweep(const SweepSpec& spec);

/// Per-cell aggregation; invariant under the order of `runs`. Errored runs are excluded.
std::vector<CellSummary> summarize(const std::vector<RunRecord>& runs);

inline constexpr const char* raw_csv_header =
    "function,n,c,s,F,run_index,seed,init,generations,evaluations,hit_cap,final_zeromax,success_generations,"
    "normalized_generations,error";
inline constexpr const char* summary_csv_header =
    "function,n,c,s,F,runs,mean_norm_generations,std_norm_generations,mean_evaluations,cap_fraction";

void write_raw_csv(const std::vector<RunRecord>& runs, std::ostream& out);
void write_summary_csv(const std::vector<CellSummary>& summaries, std::ostream& out);

/// Parses and revalidates raw rows. When `cap_multiplier` is given, capped runs must sit at the cap.
std::vector<RunRecord> read_raw_csv(std::istream& in, std::optional<double> cap_multiplier = std::nullopt);
std::vector<CellSummary> read_summary_csv(std::istream& in);

/// Throws std::invalid_argument describing the first violated RunRecord invariant.
void validate_record(const RunRecord& record, std::optional<double> cap_multiplier = std::nullopt);

SweepSpec sweep_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& spec);
SweepSpec load_sweep_config(const std::string& path);

/// F = 1.5, c = 1, s in [0.5, 10] refined around [2.5, 4.5]; 10 runs, 500n cap.
SweepSpec preset_threshold_sweep(std::size_t n, const std::vector<FunctionSpec>& functions);
/// DynamicBinVal, s = 1.8, c in {0.98, 1.0}, geometric F grid through 32 including 6.25.
SweepSpec preset_F_sweep(std::size_t n);
/// One algorithm configuration over several n.
SweepSpec preset_scaling_experiment(const FunctionSpec& function, double c, double s, double F,
                                    const std::vector<std::size_t>& n_list, InitPolicy init = UniformRandomInit{});

struct ScalingReport {
    bool ratios_available = false;  // needs at least two distinct n
    std::size_t n_min = 0;
    std::size_t n_max = 0;
    double generation_ratio = 0.0;            // mean normalized generations, n_max over n_min
    double evaluation_spread = 0.0;           // max/min of mean evaluations / (n ln n)
    std::vector<double> evaluations_per_nlogn;
};

/// Summaries of a single (function, c, s, F) configuration, any order.
ScalingReport scaling_report(const std::vector<CellSummary>& summaries);

}  // namespace saea
