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
#include "saea/potentials.hpp"
#include "saea/rng.hpp"

namespace saea {

enum class Verdict { positive, negative, undecided };

std::string_view to_string(Verdict verdict);

struct DriftEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample_std / sqrt(trials)
    std::size_t trials = 0;
    double confidence = 0.95;
    std::optional<double> truncation_cap;

    /// Sign of the mean when the normal-approximation interval excludes zero.
    [[nodiscard]] Verdict verdict() const;
};

/// One-step drifts from a frozen (x, lambda). Sign convention: positive means progress,
/// i.e. current minus next; for G4 the reversed difference next minus current is reported.
struct DriftTriple {
    DriftEstimate z;
    DriftEstimate h;
    DriftEstimate g;  // mean is exactly z.mean + h.mean
    std::optional<DriftEstimate> g_truncated;
};

/// Per-trial samples, for instrumentation.
struct DriftSamples {
    std::vector<double> z;
    std::vector<double> h;
    std::vector<double> g;
    std::vector<double> g_truncated;
    std::vector<bool> success;
    std::vector<double> lambda_after;
};

struct DriftRequest {
    std::size_t trials = 100000;
    std::optional<double> cap;
    double confidence = 0.95;
};

/// Runs `trials` independent single generations from (x, lambda), resampling dynamic
/// instances per trial. Requires zeromax(x) >= 1 and trials >= 1000.
DriftTriple estimate_drift(const SearchPoint& x, double lambda, const AlgorithmParams& params,
                           const FunctionSpec& spec, const PotentialSpec& pot, const DriftRequest& request,
                           RngStream& rng, DriftSamples* samples = nullptr);

struct ProbabilityEstimate {
    double p = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

/// Fraction of trials in which the best of round(lambda) children strictly beats x.
ProbabilityEstimate estimate_success_prob(const SearchPoint& x, double lambda, const AlgorithmParams& params,
                                          const FunctionSpec& spec, std::size_t trials, RngStream& rng);

struct LambdaStar {
    std::uint64_t offspring = 1;
    bool boundary = false;  // success target already met at one child, or search limit reached
    std::vector<std::pair<std::uint64_t, double>> probes;
};

/// Smallest offspring count whose success probability reaches 1/(s+1), by doubling then
/// bisection. Each probe uses enough trials for a CI half-width of at most `tol`.
LambdaStar find_lambda_star(const SearchPoint& x, const AlgorithmParams& params, const FunctionSpec& spec,
                            double tol, RngStream& rng, std::uint64_t max_offspring = std::uint64_t{1} << 24);

struct ScanCell {
    std::size_t Z = 0;
    double lambda = 1.0;
    std::size_t representative = 0;
    DriftTriple drift;
    Verdict verdict = Verdict::undecided;
};

struct DriftScanReport {
    PotentialFamily family = PotentialFamily::G1;
    double confidence = 0.95;
    std::vector<ScanCell> cells;

    /// Worst verdict per (Z, lambda) over representatives.
    [[nodiscard]] std::vector<ScanCell> worst_cells() const;
    [[nodiscard]] bool all_positive() const;
};

struct ScanOptions {
    std::size_t trials = 100000;
    double confidence = 0.95;
    std::optional<double> cap;
    /// Undecided cells are rerun with 4x trials until this many trials.
    std::size_t trial_budget = 1600000;
    /// 0 picks 1 for position-symmetric functions and 16 otherwise.
    std::size_t representatives = 0;
};

/// Drift estimates over a (Z, lambda) grid with verdicts on the predicted positive sign.
DriftScanReport scan_drift_region(const AlgorithmParams& params, const FunctionSpec& spec, const PotentialSpec& pot,
                                  const std::vector<std::size_t>& Z_grid, const std::vector<double>& lambda_grid,
                                  const ScanOptions& options, const RngStream& rng);

/// Fully specified region scan.
struct ScanPreset {
    std::string name;
    AlgorithmParams params;
    FunctionSpec function;
    PotentialSpec potential;
    std::vector<std::size_t> Z_grid;
    std::vector<double> lambda_grid;
};

/// "g1": small s=0.1 positive drift everywhere. "g4": s=30 reversed drift for Z in
/// [0.45n, 0.5n]. "g3": s=30 near-optimum region Z <= 2 eps n with eps = 0.05.
ScanPreset scan_preset(const std::string& name, std::size_t n = 1000);

void write_scan_csv(const DriftScanReport& report, std::ostream& out);
nlohmann::json scan_summary_json(const DriftScanReport& report);

struct EventGridPoint {
    std::size_t n = 4;
    std::size_t Z = 2;
    double c = 1.0;
    std::size_t offspring = 1;
};

struct EventCheck {
    EventGridPoint point;
    double closed_a = 0.0;
    double mc_a = 0.0;
    double se_a = 0.0;
    bool pass_a = false;
    double closed_b = 0.0;
    double mc_b = 0.0;
    double se_b = 0.0;
    bool pass_b = false;
    /// -ln(Pr[B-bar]) n / (offspring Z) from the Monte-Carlo estimate; absent when undefined.
    std::optional<double> fitted_b_exponent;
};

struct EventReport {
    std::vector<EventCheck> rows;
    double sigmas = 4.0;
    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] std::size_t failures() const;
};

/// n in {4,10,50}, Z in {1, n/2, n}, c in {0.5, 1}, offspring in {1, 2, 10}.
std::vector<EventGridPoint> default_event_grid();

/// Closed-form event probabilities against simulation with the real mutation operator.
EventReport verify_event_probabilities(const std::vector<EventGridPoint>& grid, std::size_t trials,
                                       const RngStream& rng, double sigmas = 4.0);

}  // namespace saea
