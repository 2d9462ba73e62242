#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "saea/algorithm.hpp"
#include "saea/invariants.hpp"
#include "saea/potentials.hpp"

using namespace saea;

namespace {

PotentialSpec spec_of(PotentialFamily family, double F, double s, std::size_t n) {
    PotentialSpec p;
    p.family = family;
    p.F = F;
    p.s = s;
    p.n = n;
    return p;
}

}  // namespace

TEST_CASE("lambda_max") {
    CHECK(spec_of(PotentialFamily::G1, 2.0, 1.0, 8).lambda_max() == doctest::Approx(16.0));
    CHECK(spec_of(PotentialFamily::G1, 4.0, 2.0, 10).lambda_max() == doctest::Approx(20.0));
}

TEST_CASE("h1 examples") {
    const auto p = spec_of(PotentialFamily::G1, 2.0, 1.0, 8);
    CHECK(eval_h(p, 1.0) == doctest::Approx(4.0));
    CHECK(eval_h(p, 16.0) == doctest::Approx(0.0));
    CHECK(eval_h(p, 100.0) == 0.0);
    CHECK(eval_h(p, 4.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(eval_h(p, 0.5), std::invalid_argument);
}

TEST_CASE("h2, h3, h4 formulas") {
    auto p2 = spec_of(PotentialFamily::G2, 2.0, 1.0, 8);
    p2.g2.K2 = 2.0;
    CHECK(eval_h(p2, 1.0) == doctest::Approx(2.0 * (1.0 - 1.0 / 16.0)));
    CHECK(eval_h(p2, 16.0) == doctest::Approx(0.0));
    CHECK(eval_h(p2, 32.0) == 0.0);

    auto p3 = spec_of(PotentialFamily::G3, 2.0, 1.0, 8);
    p3.g3 = {1.0, 3.0, 0.5};
    CHECK(eval_h(p3, 2.0) == doctest::Approx(3.0 + 3.0 * std::exp(-1.0)));

    for (double K4 : {1.0, 20.0, 7.5}) {
        auto p4 = spec_of(PotentialFamily::G4, 1.5, 30.0, 1000);
        p4.g4.K4 = K4;
        CHECK(eval_h(p4, 1.0) == doctest::Approx(-K4));
        CHECK(eval_h(p4, 1.5) == doctest::Approx(-4.0 * K4));
    }
}

TEST_CASE("g examples") {
    const auto p1 = spec_of(PotentialFamily::G1, 2.0, 1.0, 8);
    CHECK(eval_g(p1, SearchPoint::from_string("11010110"), 1.0) == doctest::Approx(7.0));
    CHECK(eval_g(p1, SearchPoint::from_string("11010110"), 20.0) == doctest::Approx(3.0));
    const auto p2 = spec_of(PotentialFamily::G2, 2.0, 1.0, 8);
    CHECK(eval_g(p2, SearchPoint::ones(8), p2.lambda_max()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sandwich gaps") {
    const auto p1 = spec_of(PotentialFamily::G1, 2.0, 1.0, 8);
    CHECK(sandwich_bounds(p1).first == doctest::Approx(4.0));
    CHECK(sandwich_bounds(p1).second == 0.0);
    auto p2 = spec_of(PotentialFamily::G2, 2.0, 1.0, 8);
    p2.g2.K2 = 2.0;
    CHECK(sandwich_bounds(p2).first == doctest::Approx(1.875));
    auto p3 = spec_of(PotentialFamily::G3, 2.0, 1.0, 8);
    p3.g3 = {1.0, 3.0, 1.0};
    CHECK(sandwich_bounds(p3).first == doctest::Approx(7.0));
    CHECK_THROWS_AS(sandwich_bounds(spec_of(PotentialFamily::G4, 2.0, 1.0, 8)), std::invalid_argument);
}

TEST_CASE("sandwich holds on random states") {
    RngStream rng(1, 0);
    for (auto family : {PotentialFamily::G1, PotentialFamily::G2, PotentialFamily::G3}) {
        for (double s : {0.1, 1.0, 30.0}) {
            auto p = spec_of(family, 1.5, s, 500);
            p.g1.K1 = 3.0;
            p.g2.K2 = 5.0;
            p.g3 = {2.0, 4.0, 0.3};
            const auto report = check_sandwich(p, 100000, rng);
            INFO(report.name, " s=", s);
            CHECK(report.ok());
        }
    }
}

TEST_CASE("h is non-increasing for G1-G3, decreasing for G4") {
    for (auto family : {PotentialFamily::G1, PotentialFamily::G2, PotentialFamily::G3, PotentialFamily::G4}) {
        const auto p = spec_of(family, 1.5, 2.0, 100);
        double previous = eval_h(p, 1.0);
        for (double lambda = 1.01; lambda < 2.5 * p.lambda_max(); lambda *= 1.01) {
            const double h = eval_h(p, lambda);
            if (family == PotentialFamily::G4) {
                REQUIRE(h < previous);
                REQUIRE(h < 0.0);
            } else {
                REQUIRE(h <= previous);
                REQUIRE(h >= 0.0);
            }
            previous = h;
        }
    }
}

TEST_CASE("one F-step of h1 changes it by at most K1") {
    auto p = spec_of(PotentialFamily::G1, 1.7, 0.4, 300);
    p.g1.K1 = 2.5;
    for (double lambda = 1.0; lambda < 3 * p.lambda_max(); lambda *= 1.13) {
        REQUIRE(eval_h(p, lambda) - eval_h(p, lambda * p.F) <= p.g1.K1 + 1e-12);
    }
}

TEST_CASE("event probability examples") {
    CHECK(prob_A_bar(10, 10, 1.0, 3) == 0.0);
    CHECK(prob_A_bar(4, 2, 1.0, 1) == doctest::Approx(0.4375));
    CHECK(prob_B_bar(10, 0, 0.5, 5) == 1.0);
    CHECK(prob_B_bar(4, 2, 1.0, 1) == doctest::Approx(0.5625));
    CHECK(prob_B_bar(10, 10, 0.5, 2) == doctest::Approx(std::pow(0.95, 20)));
    CHECK(prob_B_bar(10, 10, 0.5, 2) == doctest::Approx(0.35849).epsilon(1e-4));
    CHECK_THROWS_AS(prob_A_bar(4, 5, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(prob_B_bar(4, 2, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(prob_B_bar(4, 2, 1.0, 0), std::invalid_argument);
}

TEST_CASE("prob_A_bar tends to zero in the offspring count") {
    double previous = 1.0;
    for (std::size_t k = 1; k <= 200; ++k) {
        const double p = prob_A_bar(50, 10, 1.0, k);
        REQUIRE(p < previous);
        previous = p;
    }
    CHECK(previous < 1e-30);
}

TEST_CASE("prob_B_bar decreases in Z, c and offspring") {
    for (std::size_t Z = 1; Z < 50; ++Z) {
        REQUIRE(prob_B_bar(50, Z + 1, 1.0, 3) < prob_B_bar(50, Z, 1.0, 3));
    }
    for (double c = 0.1; c < 5.0; c += 0.1) {
        REQUIRE(prob_B_bar(50, 5, c + 0.1, 3) < prob_B_bar(50, 5, c, 3));
    }
    for (std::size_t k = 1; k < 50; ++k) {
        REQUIRE(prob_B_bar(50, 5, 1.0, k + 1) < prob_B_bar(50, 5, 1.0, k));
    }
}

TEST_CASE("success probability lower bound") {
    // 1 - exp(-1/(2e)) = 0.168014...
    CHECK(success_prob_lower_bound(100, 100, 1.0, 1) == doctest::Approx(1.0 - std::exp(-0.5 / std::exp(1.0))));
    CHECK(success_prob_lower_bound(100, 100, 1.0, 1) == doctest::Approx(0.168014).epsilon(1e-5));
    CHECK(success_prob_lower_bound(100, 1, 1.0, 100000) > 0.9999999);
    CHECK_THROWS_AS(success_prob_lower_bound(100, 0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("lower bound sits below the OneMax success rate") {
    const double exact = oracle::onemax_success(100, 50, 1.0, 5);
    CHECK(success_prob_lower_bound(100, 50, 1.0, 5) <= exact);

    // Monte-Carlo counterpart with the real operator.
    const auto params = [] {
        AlgorithmParams p;
        p.n = 100;
        p.c = 1.0;
        return p;
    }();
    RngStream rng(2, 0);
    RngStream unused;
    const auto f = make_instance(FunctionSpec::of(FunctionKind::onemax), 100, unused);
    const auto state = AlgorithmState::initial(with_zeromax(100, 50, rng), 5.0);
    const double trials = 100000;
    double successes = 0;
    Stepper stepper(100, 1.0);
    for (int i = 0; i < trials; ++i) {
        auto s = state;
        successes += stepper.advance_state(s, f, params, rng).success ? 1.0 : 0.0;
    }
    CHECK(success_prob_lower_bound(100, 50, 1.0, 5) <= successes / trials);
    CHECK(std::abs(successes / trials - exact) <= 4 * oracle::binomial_se(exact, trials));
}
