#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "saea/bitstring.hpp"
#include "saea/fitness.hpp"
#include "saea/rng.hpp"

namespace saea {

/// Parameters of the self-adjusting (1,lambda)-EA with the (1:s+1)-success rule.
struct AlgorithmParams {
    std::size_t n = 100;
    double c = 1.0;            // mutation rate c/n
    double s = 1.0;            // success rate
    double F = 1.5;            // update strength
    double lambda_init = 1.0;
    std::optional<std::uint64_t> generation_cap;  // defaults to 500 n
    std::optional<std::uint64_t> evaluation_cap;

    [[nodiscard]] std::uint64_t effective_generation_cap() const {
        return generation_cap.value_or(500 * static_cast<std::uint64_t>(n));
    }
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const AlgorithmParams& params);

struct AlgorithmState {
    SearchPoint x;
    double lambda = 1.0;
    std::uint64_t t = 0;
    std::uint64_t evaluations = 0;
    std::size_t best_zeromax = 0;
    bool last_success = false;
    std::uint64_t success_generations = 0;

    static AlgorithmState initial(SearchPoint x0, double lambda_init);
};

struct StepRecord {
    std::uint64_t t = 0;
    std::size_t zeromax_before = 0;
    std::size_t zeromax_after = 0;
    double lambda_before = 1.0;
    double lambda_after = 1.0;
    std::uint64_t offspring_count = 0;
    bool success = false;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Nearest integer, .5 rounded away from zero. Rejects lambda < 1.
std::uint64_t round_offspring(double lambda);

/// success: max(1, lambda/F); failure: lambda * F^(1/s).
double update_lambda(double lambda, bool success, double F, double s);

struct UniformRandomInit {};
struct FixedZeromaxInit {
    std::size_t k = 0;
};
struct ExplicitInit {
    SearchPoint x0;
};
using InitPolicy = std::variant<UniformRandomInit, FixedZeromaxInit, ExplicitInit>;

std::string describe(const InitPolicy& init);
/// Parses "uniform" or "zeromax:<k>".
InitPolicy parse_init_policy(const std::string& text);

enum class TrajectoryMode {
    none,
    sampled,  // every ceil(n/100)-th step plus all successful steps
    full,
};

struct RunOptions {
    TrajectoryMode trajectory = TrajectoryMode::sampled;
    /// Invoked for every completed generation.
    std::function<void(const StepRecord&)> observer;
    /// Polled every 1024 generations; returning true aborts with RunAborted.
    std::function<bool()> should_abort;
};

class RunAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunResult {
    std::uint64_t generations = 0;
    std::uint64_t evaluations = 0;
    bool hit_cap = false;
    std::size_t initial_zeromax = 0;
    std::size_t final_zeromax = 0;
    std::size_t best_zeromax = 0;
    std::uint64_t success_generations = 0;
    double final_lambda = 1.0;
    std::vector<StepRecord> trajectory;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Offspring generation and selection for one generation, reusing its buffers across calls.
class Stepper {
public:
    Stepper(std::size_t n, double c) : mutation_(n, c) {}

    struct Selection {
        std::span<const std::uint32_t> flips;  // selected child relative to the parent
        bool success = false;                  // selected child strictly better than parent
    };

    /// Creates `offspring` children of `parent`, returns a uniformly random fittest one.
    Selection select(const SearchPoint& parent, std::uint64_t offspring, const FitnessInstance& instance,
                     RngStream& rng);

    /// One full generation: select, update lambda, replace the parent (comma selection).
    StepRecord advance_state(AlgorithmState& state, const FitnessInstance& instance, const AlgorithmParams& params,
                             RngStream& rng);

private:
    BitFlipMutation mutation_;
    std::vector<std::uint32_t> best_;
    std::vector<std::uint32_t> candidate_;
};

/// One generation from `state` under `instance`. Requires zeromax(state.x) > 0.
std::pair<AlgorithmState, StepRecord> step(const AlgorithmState& state, const FitnessInstance& instance,
                                           const AlgorithmParams& params, RngStream& rng);

/// Full run: advance the environment, then step, until the optimum or a cap is reached.
/// Sub-streams of `seed` drive initialization/mutation and the environment separately.
RunResult run(const AlgorithmParams& params, const FunctionSpec& spec, const RngStream& seed,
              const InitPolicy& init = UniformRandomInit{}, const RunOptions& options = {});

}  // namespace saea
