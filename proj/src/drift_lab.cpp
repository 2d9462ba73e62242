#include "saea/drift_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "saea/stats.hpp"

namespace saea {

namespace {

DriftEstimate summarize(std::span<const double> samples, double confidence, std::optional<double> cap = {}) {
    DriftEstimate e;
    e.trials = samples.size();
    e.mean = mean(samples);
    e.std_error = sample_stddev(samples) / std::sqrt(static_cast<double>(samples.size()));
    e.confidence = confidence;
    e.truncation_cap = cap;
    return e;
}

bool position_symmetric(FunctionKind kind) {
    return kind == FunctionKind::onemax || kind == FunctionKind::dynamic_binval;
}

int severity(Verdict v) {
    switch (v) {
        case Verdict::positive: return 0;
        case Verdict::undecided: return 1;
        case Verdict::negative: return 2;
    }
    return 2;
}

std::uint64_t cell_stream_id(std::size_t Z, double lambda, std::size_t rep) {
    return hash_words({Z, std::bit_cast<std::uint64_t>(lambda), rep});
}

}  // namespace

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::positive: return "positive";
        case Verdict::negative: return "negative";
        case Verdict::undecided: return "undecided";
    }
    return "undecided";
}

Verdict DriftEstimate::verdict() const {
    const double half_width = normal_critical_value(confidence) * std_error;
    if (mean - half_width > 0.0) {
        return Verdict::positive;
    }
    if (mean + half_width < 0.0) {
        return Verdict::negative;
    }
    return Verdict::undecided;
}

DriftTriple estimate_drift(const SearchPoint& x, double lambda, const AlgorithmParams& params,
                           const FunctionSpec& spec, const PotentialSpec& pot, const DriftRequest& request,
                           RngStream& rng, DriftSamples* samples) {
    validate(params);
    const std::size_t Z = x.zeromax();
    if (Z == 0) {
        throw std::invalid_argument("estimate_drift: x is already optimal");
    }
    if (request.trials < 1000) {
        throw std::invalid_argument("estimate_drift: at least 1000 trials required");
    }
    if (x.size() != params.n || pot.n != params.n) {
        throw std::invalid_argument("estimate_drift: dimension mismatch between x, params and potential");
    }

    const bool reversed = pot.family == PotentialFamily::G4;
    const double h_now = eval_h(pot, lambda);
    const auto offspring = round_offspring(lambda);
    FitnessInstance base = make_instance(spec, params.n, rng);
    Stepper stepper(params.n, params.c);

    DriftSamples local;
    DriftSamples& out = samples != nullptr ? *samples : local;
    out = DriftSamples{};
    out.z.reserve(request.trials);
    out.h.reserve(request.trials);
    out.g.reserve(request.trials);

    for (std::size_t trial = 0; trial < request.trials; ++trial) {
        const FitnessInstance instance = base.advance(trial, x, rng);
        const auto selection = stepper.select(x, offspring, instance, rng);
        std::ptrdiff_t gained = 0;
        for (auto p : selection.flips) {
            gained += x[p] ? -1 : 1;
        }
        const double lambda_next = update_lambda(lambda, selection.success, params.F, params.s);
        const double h_next = eval_h(pot, lambda_next);
        double z_sample = static_cast<double>(gained);
        double h_sample = h_now - h_next;
        if (reversed) {
            z_sample = -z_sample;
            h_sample = -h_sample;
        }
        const double g_sample = z_sample + h_sample;
        out.z.push_back(z_sample);
        out.h.push_back(h_sample);
        out.g.push_back(g_sample);
        if (request.cap) {
            out.g_truncated.push_back(std::min(*request.cap, g_sample));
        }
        if (samples != nullptr) {
            out.success.push_back(selection.success);
            out.lambda_after.push_back(lambda_next);
        }
    }

    DriftTriple result;
    result.z = summarize(out.z, request.confidence);
    result.h = summarize(out.h, request.confidence);
    result.g = summarize(out.g, request.confidence);
    result.g.mean = result.z.mean + result.h.mean;
    if (request.cap) {
        result.g_truncated = summarize(out.g_truncated, request.confidence, request.cap);
    }
    return result;
}

ProbabilityEstimate estimate_success_prob(const SearchPoint& x, double lambda, const AlgorithmParams& params,
                                          const FunctionSpec& spec, std::size_t trials, RngStream& rng) {
    validate(params);
    if (x.zeromax() == 0) {
        throw std::invalid_argument("estimate_success_prob: x is already optimal");
    }
    if (trials == 0) {
        throw std::invalid_argument("estimate_success_prob: trials must be positive");
    }
    const auto offspring = round_offspring(lambda);
    FitnessInstance base = make_instance(spec, params.n, rng);
    Stepper stepper(params.n, params.c);
    std::size_t hits = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const FitnessInstance instance = base.advance(trial, x, rng);
        hits += stepper.select(x, offspring, instance, rng).success ? 1 : 0;
    }
    ProbabilityEstimate est;
    est.trials = trials;
    est.p = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(trials));
    return est;
}

LambdaStar find_lambda_star(const SearchPoint& x, const AlgorithmParams& params, const FunctionSpec& spec,
                            double tol, RngStream& rng, std::uint64_t max_offspring) {
    if (!(tol > 0.0 && tol < 0.5)) {
        throw std::invalid_argument("find_lambda_star: tol must lie in (0, 0.5)");
    }
    const double target = 1.0 / (params.s + 1.0);
    // Worst-case variance p(1-p) <= 1/4 at 95% confidence.
    const double z = normal_critical_value(0.95);
    const auto trials = static_cast<std::size_t>(std::ceil(std::pow(z * 0.5 / tol, 2.0)));

    LambdaStar result;
    const auto probe = [&](std::uint64_t k) {
        const double p = estimate_success_prob(x, static_cast<double>(k), params, spec, trials, rng).p;
        result.probes.emplace_back(k, p);
        return p >= target;
    };

    if (probe(1)) {
        result.offspring = 1;
        result.boundary = true;
        return result;
    }
    std::uint64_t low = 1;  // known to miss the target
    std::uint64_t high = 2;
    while (!probe(high)) {
        low = high;
        if (high >= max_offspring) {
            result.offspring = high;
            result.boundary = true;
            return result;
        }
        high = std::min(high * 2, max_offspring);
    }
    while (high - low > 1) {
        const auto mid = low + (high - low) / 2;
        if (probe(mid)) {
            high = mid;
        } else {
            low = mid;
        }
    }
    result.offspring = high;
    return result;
}

std::vector<ScanCell> DriftScanReport::worst_cells() const {
    std::vector<ScanCell> worst;
    for (const auto& cell : cells) {
        auto it = std::find_if(worst.begin(), worst.end(),
                               [&](const ScanCell& w) { return w.Z == cell.Z && w.lambda == cell.lambda; });
        if (it == worst.end()) {
            worst.push_back(cell);
        } else if (severity(cell.verdict) > severity(it->verdict)) {
            *it = cell;
        }
    }
    return worst;
}

bool DriftScanReport::all_positive() const {
    return std::all_of(cells.begin(), cells.end(), [](const ScanCell& c) { return c.verdict == Verdict::positive; });
}

DriftScanReport scan_drift_region(const AlgorithmParams& params, const FunctionSpec& spec, const PotentialSpec& pot,
                                  const std::vector<std::size_t>& Z_grid, const std::vector<double>& lambda_grid,
                                  const ScanOptions& options, const RngStream& rng) {
    DriftScanReport report;
    report.family = pot.family;
    report.confidence = options.confidence;
    const std::size_t reps =
        options.representatives != 0 ? options.representatives : (position_symmetric(spec.kind) ? 1 : 16);

    for (const auto Z : Z_grid) {
        for (const auto lambda : lambda_grid) {
            for (std::size_t rep = 0; rep < reps; ++rep) {
                RngStream cell_rng = rng.derive(cell_stream_id(Z, lambda, rep));
                const SearchPoint x = with_zeromax(params.n, Z, cell_rng);
                ScanCell cell;
                cell.Z = Z;
                cell.lambda = lambda;
                cell.representative = rep;
                DriftRequest request{options.trials, options.cap, options.confidence};
                while (true) {
                    cell.drift = estimate_drift(x, lambda, params, spec, pot, request, cell_rng);
                    cell.verdict = cell.drift.g.verdict();
                    if (cell.verdict != Verdict::undecided || request.trials * 4 > options.trial_budget) {
                        break;
                    }
                    request.trials *= 4;
                }
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

ScanPreset scan_preset(const std::string& name, std::size_t n) {
    ScanPreset preset;
    preset.name = name;
    preset.params.n = n;
    preset.params.c = 0.8;
    preset.params.F = 1.5;
    preset.function = FunctionSpec::of(FunctionKind::onemax);
    preset.potential.n = n;
    preset.potential.F = 1.5;
    const auto frac = [n](double f) { return std::max<std::size_t>(1, static_cast<std::size_t>(f * n)); };
    if (name == "g1") {
        preset.params.s = 0.1;
        preset.potential.family = PotentialFamily::G1;
        preset.Z_grid = {1, frac(0.01), frac(0.1), frac(0.5), frac(0.9)};
        for (double l = 1.0; l <= 512.0; l *= 2.0) {
            preset.lambda_grid.push_back(l);
        }
    } else if (name == "g4") {
        preset.params.s = 30.0;
        preset.potential.family = PotentialFamily::G4;
        preset.potential.g4.K4 = 20.0;
        for (double f = 0.45; f <= 0.5 + 1e-9; f += 0.01) {
            preset.Z_grid.push_back(frac(f));
        }
        // Small offspring sizes from F upward; below F the H-term loss outweighs the Z-drift.
        preset.lambda_grid = {1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
    } else if (name == "g3") {
        preset.params.s = 30.0;
        preset.potential.family = PotentialFamily::G3;
        const double eps = 0.05;
        preset.Z_grid = {1, frac(eps / 10), frac(eps / 2), frac(eps), frac(2 * eps)};
        for (double l = 1.0; l <= 64.0; l *= 2.0) {
            preset.lambda_grid.push_back(l);
        }
    } else {
        throw std::invalid_argument("unknown scan preset '" + name + "' (expected g1, g3 or g4)");
    }
    preset.potential.s = preset.params.s;
    return preset;
}

void write_scan_csv(const DriftScanReport& report, std::ostream& out) {
    out << "family,Z,lambda,representative,trials,z_mean,z_se,h_mean,h_se,g_mean,g_se,verdict\n";
    for (const auto& c : report.cells) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(report.family), c.Z, c.lambda,
                           c.representative, c.drift.g.trials, c.drift.z.mean, c.drift.z.std_error, c.drift.h.mean,
                           c.drift.h.std_error, c.drift.g.mean, c.drift.g.std_error, to_string(c.verdict));
    }
}

nlohmann::json scan_summary_json(const DriftScanReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    std::size_t positive = 0;
    for (const auto& c : report.worst_cells()) {
        positive += c.verdict == Verdict::positive ? 1 : 0;
        cells.push_back({{"Z", c.Z}, {"lambda", c.lambda}, {"verdict", std::string(to_string(c.verdict))}});
    }
    return {{"family", std::string(to_string(report.family))},
            {"confidence", report.confidence},
            {"cells", cells},
            {"positive_cells", positive},
            {"all_positive", report.all_positive()}};
}

bool EventReport::all_pass() const { return failures() == 0; }

std::size_t EventReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const EventCheck& r) { return !(r.pass_a && r.pass_b); }));
}

std::vector<EventGridPoint> default_event_grid() {
    std::vector<EventGridPoint> grid;
    for (std::size_t n : {4, 10, 50}) {
        for (std::size_t Z : {std::size_t{1}, n / 2, n}) {
            for (double c : {0.5, 1.0}) {
                for (std::size_t k : {1, 2, 10}) {
                    grid.push_back({n, Z, c, k});
                }
            }
        }
    }
    return grid;
}

EventReport verify_event_probabilities(const std::vector<EventGridPoint>& grid, std::size_t trials,
                                       const RngStream& rng, double sigmas) {
    if (trials == 0) {
        throw std::invalid_argument("verify_event_probabilities: trials must be positive");
    }
    EventReport report;
    report.sigmas = sigmas;
    std::vector<std::uint32_t> flips;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& pt = grid[i];
        RngStream local = rng.derive(i);
        const SearchPoint x = with_zeromax(pt.n, pt.Z, local);
        BitFlipMutation mutation(pt.n, pt.c);
        std::size_t count_a = 0;
        std::size_t count_b = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            bool every_child_flips_one = true;
            bool no_child_flips_zero = true;
            for (std::size_t j = 0; j < pt.offspring; ++j) {
                mutation.sample(local, flips);
                bool flips_one = false;
                for (auto p : flips) {
                    if (x[p]) {
                        flips_one = true;
                    } else {
                        no_child_flips_zero = false;
                    }
                }
                every_child_flips_one = every_child_flips_one && flips_one;
            }
            count_a += every_child_flips_one ? 1 : 0;
            count_b += no_child_flips_zero ? 1 : 0;
        }
        EventCheck row;
        row.point = pt;
        const double N = static_cast<double>(trials);
        row.closed_a = prob_A_bar(pt.n, pt.Z, pt.c, pt.offspring);
        row.closed_b = prob_B_bar(pt.n, pt.Z, pt.c, pt.offspring);
        row.mc_a = static_cast<double>(count_a) / N;
        row.mc_b = static_cast<double>(count_b) / N;
        row.se_a = std::sqrt(row.closed_a * (1.0 - row.closed_a) / N);
        row.se_b = std::sqrt(row.closed_b * (1.0 - row.closed_b) / N);
        // With zero variance the estimate must match exactly; allow for the closed form's rounding.
        const auto within = [&](double closed, double mc, double se) {
            return std::abs(closed - mc) <= sigmas * se + 1e-12;
        };
        row.pass_a = within(row.closed_a, row.mc_a, row.se_a);
        row.pass_b = within(row.closed_b, row.mc_b, row.se_b);
        if (pt.Z > 0 && row.mc_b > 0.0 && row.mc_b < 1.0) {
            row.fitted_b_exponent =
                -std::log(row.mc_b) * static_cast<double>(pt.n) / static_cast<double>(pt.offspring * pt.Z);
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace saea
