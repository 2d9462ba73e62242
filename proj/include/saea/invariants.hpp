#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "saea/algorithm.hpp"
#include "saea/fitness.hpp"
#include "saea/potentials.hpp"
#include "saea/rng.hpp"

namespace saea {

/// Outcome of one invariant suite; `examples` keeps the first few violations.
struct InvariantReport {
    std::string name;
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::vector<std::string> examples;

    [[nodiscard]] bool ok() const { return violations == 0; }
    void fail(std::string what);
};

/// Dominated pairs (x, y) with y obtained by zeroing a nonempty random subset of x's ones,
/// checked in each of `generations` successive instances.
InvariantReport check_monotonicity(const FunctionSpec& spec, std::size_t n, std::size_t pairs,
                                   std::size_t generations, RngStream& rng);

/// g - lower_gap <= zeromax <= g for random (x, lambda) with lambda in [1, 2 lambda_max].
InvariantReport check_sandwich(const PotentialSpec& spec, std::size_t states, RngStream& rng);

/// Lambda-update exactness, lambda >= 1, record chaining and the evaluation counter, over a
/// full trajectory.
InvariantReport check_trajectory(const RunResult& result, const AlgorithmParams& params,
                                 double lambda_init);

}  // namespace saea
