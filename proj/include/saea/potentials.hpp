#pragma once

#include <cstddef>
#include <string_view>
#include <utility>

#include "saea/bitstring.hpp"

namespace saea {

enum class PotentialFamily { G1, G2, G3, G4 };

std::string_view to_string(PotentialFamily family);

/// Potential g(x, lambda) = zeromax(x) + h(lambda). Constants are kept per family, so the
/// K1/K2 of the near-optimum family never alias those of the first two families.
struct PotentialSpec {
    PotentialFamily family = PotentialFamily::G1;
    double F = 1.5;
    double s = 1.0;
    std::size_t n = 100;

    struct {
        double K1 = 1.0;
    } g1;
    struct {
        double K2 = 1.0;
    } g2;
    struct {
        double K1 = 1.0;
        double K2 = 1.0;
        double K3 = 1.0;
    } g3;
    struct {
        double K4 = 20.0;
    } g4;

    /// F^(1/s) * n
    [[nodiscard]] double lambda_max() const;
};

/// log base F, evaluated in extended precision.
double log_base(double F, double value);

/// Penalty term h(lambda). Rejects lambda < 1.
double eval_h(const PotentialSpec& spec, double lambda);

/// zeromax(x) + h(lambda)
double eval_g(const PotentialSpec& spec, const SearchPoint& x, double lambda);
double eval_g(const PotentialSpec& spec, std::size_t zeromax, double lambda);

/// (lower_gap, upper_gap) with g - lower_gap <= zeromax <= g + upper_gap. Rejects G4.
std::pair<double, double> sandwich_bounds(const PotentialSpec& spec);

/// Probability that every one of `offspring` children flips at least one one-bit.
double prob_A_bar(std::size_t n, std::size_t Z, double c, std::size_t offspring);

/// Probability that no child flips a zero-bit.
double prob_B_bar(std::size_t n, std::size_t Z, double c, std::size_t offspring);

/// 1 - exp(-c e^{-c} offspring Z / (2n)); a lower bound on the success probability of one
/// generation on every monotone function. Requires Z >= 1.
double success_prob_lower_bound(std::size_t n, std::size_t Z, double c, std::size_t offspring);

}  // namespace saea
