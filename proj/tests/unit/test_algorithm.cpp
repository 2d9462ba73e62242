#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "saea/algorithm.hpp"
#include "saea/invariants.hpp"

using namespace saea;

namespace {

AlgorithmParams params_of(std::size_t n, double c, double s, double F = 1.5) {
    AlgorithmParams p;
    p.n = n;
    p.c = c;
    p.s = s;
    p.F = F;
    return p;
}

FitnessInstance onemax(std::size_t n) {
    RngStream rng;
    return make_instance(FunctionSpec::of(FunctionKind::onemax), n, rng);
}

}  // namespace

TEST_CASE("round_offspring") {
    CHECK(round_offspring(1.0) == 1);
    CHECK(round_offspring(2.5) == 3);
    CHECK(round_offspring(3.4) == 3);
    CHECK(round_offspring(1.5) == 2);
    CHECK_THROWS_AS(round_offspring(0.99), std::invalid_argument);
    CHECK_THROWS_AS(round_offspring(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(round_offspring(1e30), std::overflow_error);
}

TEST_CASE("update_lambda") {
    CHECK(update_lambda(2.0, true, 1.5, 1.0) == doctest::Approx(4.0 / 3.0));
    CHECK(update_lambda(1.0, true, 2.0, 1.0) == 1.0);
    CHECK(update_lambda(1.0, false, 1.5, 1.0) == 1.5);
    CHECK(update_lambda(3.0, false, 4.0, 2.0) == doctest::Approx(6.0));
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate(params_of(10, 1.0, 1.0)));
    CHECK_THROWS_AS(validate(params_of(10, 0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate(params_of(10, 11.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate(params_of(10, 1.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate(params_of(10, 1.0, 1.0, 1.0)), std::invalid_argument);
    auto p = params_of(10, 1.0, 1.0);
    p.lambda_init = 0.5;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    CHECK(params_of(10, 1.0, 1.0).effective_generation_cap() == 5000);
}

TEST_CASE("init policies") {
    CHECK(describe(parse_init_policy("uniform")) == "uniform");
    CHECK(describe(parse_init_policy("zeromax:10")) == "zeromax:10");
    CHECK_THROWS_AS(parse_init_policy("zeromax:"), std::invalid_argument);
    CHECK_THROWS_AS(parse_init_policy("zeromax:-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_init_policy("random"), std::invalid_argument);
}

TEST_CASE("step without flips never succeeds") {
    const auto params = params_of(20, 1e-9, 2.0);
    const auto f = onemax(20);
    RngStream rng(1, 0);
    auto state = AlgorithmState::initial(SearchPoint::from_string("10101010101010101010"), 3.0);
    for (int i = 0; i < 40; ++i) {
        const auto before = state;
        const auto [next, rec] = step(state, f, params, rng);
        REQUIRE_FALSE(rec.success);
        REQUIRE(next.x == before.x);
        REQUIRE(rec.lambda_after == before.lambda * std::pow(1.5, 0.5));
        state = next;
    }
}

TEST_CASE("step success probability at n=2, x=10") {
    // Exactly one of the four flip patterns (only the zero flips) improves: 1/4.
    const auto params = params_of(2, 1.0, 1.0);
    const auto f = onemax(2);
    RngStream rng(2, 0);
    const auto state = AlgorithmState::initial(SearchPoint::from_string("10"), 1.0);
    const double trials = 100000;
    double successes = 0;
    for (int i = 0; i < trials; ++i) {
        successes += step(state, f, params, rng).second.success ? 1.0 : 0.0;
    }
    CHECK(std::abs(successes / trials - 0.25) <= 4 * oracle::binomial_se(0.25, trials));
}

TEST_CASE("selection takes a fittest child, uniformly among ties") {
    // Parent 00, two children each uniform over {00, 01, 10, 11} (c/n = 1/2).
    const auto params = params_of(2, 1.0, 1.0);
    const auto f = onemax(2);
    RngStream rng(3, 0);
    const auto state = AlgorithmState::initial(SearchPoint::from_string("00"), 2.0);
    const double trials = 200000;
    double success = 0;
    double both = 0;
    double first = 0;
    double second = 0;
    for (int i = 0; i < trials; ++i) {
        const auto [next, rec] = step(state, f, params, rng);
        success += rec.success ? 1.0 : 0.0;
        const auto s = next.x.to_string();
        both += s == "11" ? 1.0 : 0.0;
        first += s == "10" ? 1.0 : 0.0;
        second += s == "01" ? 1.0 : 0.0;
    }
    const double p_success = 1.0 - 1.0 / 16.0;
    const double p_both = 1.0 - 9.0 / 16.0;
    const double p_single = (p_success - p_both) / 2.0;
    CHECK(std::abs(success / trials - p_success) <= 4 * oracle::binomial_se(p_success, trials));
    CHECK(std::abs(both / trials - p_both) <= 4 * oracle::binomial_se(p_both, trials));
    CHECK(std::abs(first / trials - p_single) <= 4 * oracle::binomial_se(p_single, trials));
    CHECK(std::abs(second / trials - p_single) <= 4 * oracle::binomial_se(p_single, trials));
}

TEST_CASE("step rejects an optimal parent") {
    RngStream rng;
    const auto state = AlgorithmState::initial(SearchPoint::ones(4), 1.0);
    CHECK_THROWS_AS(step(state, onemax(4), params_of(4, 1.0, 1.0), rng), std::logic_error);
}

TEST_CASE("small s reaches the optimum at n=50") {
    const auto params = params_of(50, 0.8, 0.5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto result = run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(seed, 0));
        CHECK_FALSE(result.hit_cap);
        CHECK(result.final_zeromax == 0);
    }
}

TEST_CASE("large s fails at n=1000") {
    const auto params = params_of(1000, 1.0, 30.0);
    RunOptions options;
    options.trajectory = TrajectoryMode::none;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto result = run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(seed, 0), UniformRandomInit{}, options);
        CHECK(result.hit_cap);
        CHECK(result.generations == 500000);
        CHECK(result.final_zeromax > 0);
    }
}

TEST_CASE("zero generation cap") {
    auto params = params_of(10, 1.0, 1.0);
    params.generation_cap = 0;
    const auto result = run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(1, 0));
    CHECK(result.generations == 0);
    CHECK(result.hit_cap);
    const auto optimal = run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(1, 0),
                             ExplicitInit{SearchPoint::ones(10)});
    CHECK_FALSE(optimal.hit_cap);
    CHECK(optimal.generations == 0);
}

TEST_CASE("evaluation cap") {
    auto params = params_of(200, 1.0, 30.0);
    params.evaluation_cap = 1000;
    const auto result = run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(1, 0));
    CHECK(result.hit_cap);
    CHECK(result.evaluations >= 1000);
    CHECK(result.generations < params.effective_generation_cap());
}

TEST_CASE("explicit init dimension is checked") {
    CHECK_THROWS_AS(run(params_of(10, 1.0, 1.0), FunctionSpec::of(FunctionKind::onemax), RngStream(1, 0),
                        ExplicitInit{SearchPoint::zeros(9)}),
                    std::invalid_argument);
}

TEST_CASE("trajectory invariants on full runs") {
    RunOptions full;
    full.trajectory = TrajectoryMode::full;
    for (auto kind : {FunctionKind::onemax, FunctionKind::binary, FunctionKind::binary_value,
                      FunctionKind::dynamic_binval, FunctionKind::hot_topic}) {
        for (double s : {0.5, 3.0}) {
            auto params = params_of(300, 1.0, s);
            params.generation_cap = 30000;
            params.lambda_init = 2.5;
            const auto result = run(params, FunctionSpec::of(kind), RngStream(5, static_cast<int>(kind)),
                                    UniformRandomInit{}, full);
            const auto report = check_trajectory(result, params, params.lambda_init);
            INFO(to_string(kind), " s=", s, " ", report.examples.empty() ? "" : report.examples.front());
            CHECK(report.ok());
            std::size_t best = result.initial_zeromax;
            for (const auto& rec : result.trajectory) {
                best = std::min(best, rec.zeromax_after);
            }
            CHECK(best == result.best_zeromax);
        }
    }
}

TEST_CASE("success means strictly better on OneMax") {
    RunOptions full;
    full.trajectory = TrajectoryMode::full;
    const auto result = run(params_of(200, 1.0, 1.0), FunctionSpec::of(FunctionKind::onemax), RngStream(6, 0),
                            UniformRandomInit{}, full);
    for (const auto& rec : result.trajectory) {
        REQUIRE(rec.success == (rec.zeromax_after < rec.zeromax_before));
    }
}

TEST_CASE("sampled trajectories keep successes and a stride") {
    const auto params = params_of(500, 1.0, 1.0);
    const auto result = run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(7, 0));
    std::uint64_t successes = 0;
    for (const auto& rec : result.trajectory) {
        REQUIRE((rec.success || rec.t % 5 == 0));
        successes += rec.success ? 1 : 0;
    }
    CHECK(successes == result.success_generations);
}

TEST_CASE("comma selection can lose fitness") {
    RunOptions full;
    full.trajectory = TrajectoryMode::full;
    auto params = params_of(1000, 1.0, 30.0);
    params.generation_cap = 20000;
    const auto result =
        run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(8, 0), UniformRandomInit{}, full);
    const bool regressed = std::any_of(result.trajectory.begin(), result.trajectory.end(),
                                       [](const StepRecord& r) { return r.zeromax_after > r.zeromax_before; });
    CHECK(regressed);
}

TEST_CASE("success fraction settles near 1/(s+1) while lambda is free to move") {
    // s = 3 on a long OneMax run: the single-child success probability stays below 1/4,
    // so the lambda floor never binds inside the window.
    auto params = params_of(50000, 1.0, 3.0);
    params.generation_cap = 100000;
    std::uint64_t window = 0;
    std::uint64_t successes = 0;
    RunOptions options;
    options.trajectory = TrajectoryMode::none;
    options.observer = [&](const StepRecord& rec) {
        if (rec.t >= 10000) {
            ++window;
            successes += rec.success ? 1 : 0;
        }
    };
    const auto result = run(params, FunctionSpec::of(FunctionKind::onemax), RngStream(9, 0), UniformRandomInit{}, options);
    REQUIRE(result.hit_cap);
    REQUIRE(window == 90000);
    const double fraction = static_cast<double>(successes) / static_cast<double>(window);
    CHECK(fraction >= 0.5 / 4.0);
    CHECK(fraction <= 2.0 / 4.0);
}

TEST_CASE("runs are deterministic") {
    const auto params = params_of(400, 1.0, 2.0);
    for (auto kind : {FunctionKind::onemax, FunctionKind::dynamic_binval, FunctionKind::hot_topic}) {
        const auto a = run(params, FunctionSpec::of(kind), RngStream(10, 3));
        const auto b = run(params, FunctionSpec::of(kind), RngStream(10, 3));
        CHECK(a == b);
        const auto c = run(params, FunctionSpec::of(kind), RngStream(10, 4));
        CHECK_FALSE(a == c);
    }
}

TEST_CASE("should_abort stops the run") {
    RunOptions options;
    int polls = 0;
    options.should_abort = [&] { return ++polls > 2; };
    CHECK_THROWS_AS(run(params_of(1000, 1.0, 30.0), FunctionSpec::of(FunctionKind::onemax), RngStream(1, 0),
                        UniformRandomInit{}, options),
                    RunAborted);
}
