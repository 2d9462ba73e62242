#include "saea/invariants.hpp"

#include <cmath>

#include <fmt/format.h>

namespace saea {

void InvariantReport::fail(std::string what) {
    ++violations;
    if (examples.size() < 5) {
        examples.push_back(std::move(what));
    }
}

InvariantReport check_monotonicity(const FunctionSpec& spec, std::size_t n, std::size_t pairs,
                                   std::size_t generations, RngStream& rng) {
    InvariantReport report;
    report.name = "monotonicity:" + std::string(to_string(spec.kind));
    auto instance = make_instance(spec, n, rng);
    std::vector<std::uint32_t> ones;
    for (std::size_t g = 0; g < generations; ++g) {
        auto x = new_random(n, rng);
        instance = instance.advance(g, x, rng);
        for (std::size_t i = 0; i < pairs; ++i) {
            x = new_random(n, rng);
            if (x.onemax() == 0) {
                x.set(rng.below(n), true);
            }
            ones.clear();
            for (std::size_t j = 0; j < n; ++j) {
                if (x[j]) {
                    ones.push_back(static_cast<std::uint32_t>(j));
                }
            }
            // Nonempty subset: each one kept with probability 1/2, plus one forced pick.
            auto y = x;
            y.set(ones[rng.below(ones.size())], false);
            for (auto j : ones) {
                if (rng() & 1U) {
                    y.set(j, false);
                }
            }
            ++report.checks;
            if (instance.compare(x, y) != std::weak_ordering::greater) {
                report.fail(fmt::format("generation {}: x={} y={}", g, x.to_string(), y.to_string()));
            }
        }
    }
    return report;
}

InvariantReport check_sandwich(const PotentialSpec& spec, std::size_t states, RngStream& rng) {
    InvariantReport report;
    report.name = "sandwich:" + std::string(to_string(spec.family));
    const auto [lower, upper] = sandwich_bounds(spec);
    const double lmax = spec.lambda_max();
    for (std::size_t i = 0; i < states; ++i) {
        const auto Z = static_cast<std::size_t>(rng.below(spec.n + 1));
        const double lambda = 1.0 + rng.uniform01() * (2.0 * lmax - 1.0);
        const double g = eval_g(spec, Z, lambda);
        const double z = static_cast<double>(Z);
        ++report.checks;
        if (!(g - lower <= z && z <= g + upper)) {
            report.fail(fmt::format("Z={} lambda={} g={}", Z, lambda, g));
        }
    }
    return report;
}

InvariantReport check_trajectory(const RunResult& result, const AlgorithmParams& params, double lambda_init) {
    InvariantReport report;
    report.name = "trajectory";
    std::uint64_t evaluations = 0;
    std::uint64_t successes = 0;
    double lambda = lambda_init;
    for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
        const auto& rec = result.trajectory[i];
        ++report.checks;
        if (rec.t != i) {
            report.fail(fmt::format("record {} has t={}", i, rec.t));
        }
        if (rec.lambda_before != lambda) {
            report.fail(fmt::format("t={}: lambda_before does not chain", rec.t));
        }
        if (!(rec.lambda_before >= 1.0) || !(rec.lambda_after >= 1.0)) {
            report.fail(fmt::format("t={}: lambda below 1", rec.t));
        }
        if (rec.lambda_after != update_lambda(rec.lambda_before, rec.success, params.F, params.s)) {
            report.fail(fmt::format("t={}: lambda update is not exact", rec.t));
        }
        if (rec.offspring_count != round_offspring(rec.lambda_before)) {
            report.fail(fmt::format("t={}: offspring count is not round(lambda)", rec.t));
        }
        if (i > 0 && rec.zeromax_before != result.trajectory[i - 1].zeromax_after) {
            report.fail(fmt::format("t={}: zeromax does not chain", rec.t));
        }
        evaluations += rec.offspring_count;
        successes += rec.success ? 1 : 0;
        lambda = rec.lambda_after;
    }
    ++report.checks;
    if (evaluations != result.evaluations) {
        report.fail(fmt::format("evaluations {} != recomputed {}", result.evaluations, evaluations));
    }
    if (successes != result.success_generations) {
        report.fail("success count mismatch");
    }
    if (result.trajectory.size() != result.generations) {
        report.fail("trajectory is not complete");
    }
    if (lambda != result.final_lambda) {
        report.fail("final lambda mismatch");
    }
    return report;
}

}  // namespace saea
