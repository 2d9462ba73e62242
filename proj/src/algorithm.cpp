#include "saea/algorithm.hpp"

#include <cmath>
#include <stdexcept>

namespace saea {

void validate(const AlgorithmParams& params) {
    if (params.n == 0) {
        throw std::invalid_argument("n must be at least 1");
    }
    if (!(params.c > 0.0) || params.c > static_cast<double>(params.n)) {
        throw std::invalid_argument("c must satisfy 0 < c <= n");
    }
    if (!(params.s > 0.0)) {
        throw std::invalid_argument("s must be > 0");
    }
    if (!(params.F > 1.0)) {
        throw std::invalid_argument("F must be > 1");
    }
    if (!(params.lambda_init >= 1.0)) {
        throw std::invalid_argument("lambda_init must be >= 1");
    }
}

AlgorithmState AlgorithmState::initial(SearchPoint x0, double lambda_init) {
    AlgorithmState state;
    state.best_zeromax = x0.zeromax();
    state.x = std::move(x0);
    state.lambda = lambda_init;
    return state;
}

std::uint64_t round_offspring(double lambda) {
    if (!(lambda >= 1.0)) {
        throw std::invalid_argument("round_offspring: lambda must be >= 1");
    }
    if (lambda >= 0x1.0p62) {
        throw std::overflow_error("round_offspring: lambda too large to materialize offspring");
    }
    return static_cast<std::uint64_t>(std::round(lambda));
}

double update_lambda(double lambda, bool success, double F, double s) {
    if (success) {
        return std::max(1.0, lambda / F);
    }
    return lambda * std::pow(F, 1.0 / s);
}

std::string describe(const InitPolicy& init) {
    if (std::holds_alternative<UniformRandomInit>(init)) {
        return "uniform";
    }
    if (const auto* fixed = std::get_if<FixedZeromaxInit>(&init)) {
        return "zeromax:" + std::to_string(fixed->k);
    }
    return "explicit";
}

InitPolicy parse_init_policy(const std::string& text) {
    if (text == "uniform") {
        return UniformRandomInit{};
    }
    const std::string prefix = "zeromax:";
    if (text.rfind(prefix, 0) == 0) {
        const auto digits = text.substr(prefix.size());
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("init: malformed zeromax count in '" + text + "'");
        }
        return FixedZeromaxInit{static_cast<std::size_t>(std::stoull(digits))};
    }
    throw std::invalid_argument("init: expected 'uniform' or 'zeromax:<k>', got '" + text + "'");
}

Stepper::Selection Stepper::select(const SearchPoint& parent, std::uint64_t offspring,
                                   const FitnessInstance& instance, RngStream& rng) {
    mutation_.sample(rng, best_);
    std::uint64_t ties = 1;
    for (std::uint64_t j = 1; j < offspring; ++j) {
        mutation_.sample(rng, candidate_);
        const auto order = instance.compare_mutants(parent, candidate_, best_);
        if (order == std::weak_ordering::greater) {
            best_.swap(candidate_);
            ties = 1;
        } else if (order == std::weak_ordering::equivalent) {
            // Reservoir sampling keeps a uniform choice among the fittest.
            ++ties;
            if (rng.below(ties) == 0) {
                best_.swap(candidate_);
            }
        }
    }
    const bool success =
        instance.compare_mutants(parent, best_, std::span<const std::uint32_t>{}) == std::weak_ordering::greater;
    return {best_, success};
}

StepRecord Stepper::advance_state(AlgorithmState& state, const FitnessInstance& instance,
                                  const AlgorithmParams& params, RngStream& rng) {
    StepRecord rec;
    rec.t = state.t;
    rec.zeromax_before = state.x.zeromax();
    if (rec.zeromax_before == 0) {
        throw std::logic_error("step: parent is already optimal");
    }
    rec.lambda_before = state.lambda;
    rec.offspring_count = round_offspring(state.lambda);

    const auto selection = select(state.x, rec.offspring_count, instance, rng);
    std::ptrdiff_t gained = 0;
    for (auto p : selection.flips) {
        gained += state.x[p] ? -1 : 1;
    }
    state.x.apply(selection.flips);

    rec.success = selection.success;
    rec.zeromax_after = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(rec.zeromax_before) - gained);
    rec.lambda_after = update_lambda(state.lambda, rec.success, params.F, params.s);

    state.lambda = rec.lambda_after;
    state.evaluations += rec.offspring_count;
    state.best_zeromax = std::min(state.best_zeromax, rec.zeromax_after);
    state.last_success = rec.success;
    state.success_generations += rec.success ? 1 : 0;
    ++state.t;
    return rec;
}

std::pair<AlgorithmState, StepRecord> step(const AlgorithmState& state, const FitnessInstance& instance,
                                           const AlgorithmParams& params, RngStream& rng) {
    validate(params);
    Stepper stepper(params.n, params.c);
    AlgorithmState next = state;
    auto rec = stepper.advance_state(next, instance, params, rng);
    return {std::move(next), rec};
}

RunResult run(const AlgorithmParams& params, const FunctionSpec& spec, const RngStream& seed, const InitPolicy& init,
              const RunOptions& options) {
    validate(params);
    validate(spec);
    RngStream algo = seed.derive(StreamRole::algorithm);
    RngStream env = seed.derive(StreamRole::environment);
    RngStream construction = seed.derive(StreamRole::instance);

    FitnessInstance instance = make_instance(spec, params.n, construction);

    SearchPoint x0;
    if (std::holds_alternative<UniformRandomInit>(init)) {
        x0 = new_random(params.n, algo);
    } else if (const auto* fixed = std::get_if<FixedZeromaxInit>(&init)) {
        x0 = with_zeromax(params.n, fixed->k, algo);
    } else {
        x0 = std::get<ExplicitInit>(init).x0;
        if (x0.size() != params.n) {
            throw std::invalid_argument("init: explicit start point has the wrong dimension");
        }
    }

    RunResult result;
    result.initial_zeromax = x0.zeromax();
    AlgorithmState state = AlgorithmState::initial(std::move(x0), params.lambda_init);
    Stepper stepper(params.n, params.c);
    const auto cap = params.effective_generation_cap();
    const std::uint64_t sample_every = (params.n + 99) / 100;

    while (state.x.zeromax() != 0) {
        if (state.t >= cap || (params.evaluation_cap && state.evaluations >= *params.evaluation_cap)) {
            result.hit_cap = true;
            break;
        }
        if (options.should_abort && state.t % 1024 == 0 && options.should_abort()) {
            throw RunAborted("run aborted at generation " + std::to_string(state.t));
        }
        instance = instance.advance(state.t, state.x, env);
        const auto rec = stepper.advance_state(state, instance, params, algo);
        if (options.observer) {
            options.observer(rec);
        }
        if (options.trajectory == TrajectoryMode::full ||
            (options.trajectory == TrajectoryMode::sampled && (rec.success || rec.t % sample_every == 0))) {
            result.trajectory.push_back(rec);
        }
    }

    result.generations = state.t;
    result.evaluations = state.evaluations;
    result.final_zeromax = state.x.zeromax();
    result.best_zeromax = state.best_zeromax;
    result.success_generations = state.success_generations;
    result.final_lambda = state.lambda;
    return result;
}

}  // namespace saea
