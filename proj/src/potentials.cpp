#include "saea/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace saea {

namespace {

void check_event_domain(std::size_t n, std::size_t Z, double c, std::size_t offspring) {
    if (n == 0 || Z > n) {
        throw std::invalid_argument("event probability: require 0 <= Z <= n, n >= 1");
    }
    if (!(c > 0.0) || c > static_cast<double>(n)) {
        throw std::invalid_argument("event probability: require 0 < c <= n");
    }
    if (offspring == 0) {
        throw std::invalid_argument("event probability: offspring must be positive");
    }
}

}  // namespace

std::string_view to_string(PotentialFamily family) {
    switch (family) {
        case PotentialFamily::G1: return "G1";
        case PotentialFamily::G2: return "G2";
        case PotentialFamily::G3: return "G3";
        case PotentialFamily::G4: return "G4";
    }
    return "?";
}

double PotentialSpec::lambda_max() const {
    return static_cast<double>(std::pow(static_cast<long double>(F), 1.0L / s) * static_cast<long double>(n));
}

double log_base(double F, double value) {
    return static_cast<double>(std::log(static_cast<long double>(value)) / std::log(static_cast<long double>(F)));
}

double eval_h(const PotentialSpec& spec, double lambda) {
    if (!(lambda >= 1.0)) {
        throw std::invalid_argument("eval_h: lambda must be >= 1");
    }
    const double lmax = spec.lambda_max();
    // K * max(0, log_F lambda_max - log_F lambda)
    const auto log_penalty = [&](double K) {
        const double gap = log_base(spec.F, lmax) - log_base(spec.F, lambda);
        return gap > 0.0 ? K * gap : 0.0;
    };
    switch (spec.family) {
        case PotentialFamily::G1: return log_penalty(spec.g1.K1);
        case PotentialFamily::G2: return spec.g2.K2 * std::max(0.0, 1.0 / lambda - 1.0 / lmax);
        case PotentialFamily::G3: return log_penalty(spec.g3.K1) + spec.g3.K2 * std::exp(-spec.g3.K3 * lambda);
        case PotentialFamily::G4: {
            const double l = log_base(spec.F, lambda) + 1.0;
            return -spec.g4.K4 * l * l;
        }
    }
    throw std::invalid_argument("eval_h: unknown family");
}

double eval_g(const PotentialSpec& spec, std::size_t zeromax, double lambda) {
    return static_cast<double>(zeromax) + eval_h(spec, lambda);
}

double eval_g(const PotentialSpec& spec, const SearchPoint& x, double lambda) {
    return eval_g(spec, x.zeromax(), lambda);
}

std::pair<double, double> sandwich_bounds(const PotentialSpec& spec) {
    const double lmax = spec.lambda_max();
    switch (spec.family) {
        case PotentialFamily::G1: return {spec.g1.K1 * log_base(spec.F, lmax), 0.0};
        case PotentialFamily::G2: return {spec.g2.K2 * (1.0 - 1.0 / lmax), 0.0};
        case PotentialFamily::G3: return {spec.g3.K1 * log_base(spec.F, lmax) + spec.g3.K2, 0.0};
        case PotentialFamily::G4: break;
    }
    throw std::invalid_argument("sandwich_bounds: G4 has no bounded gap to zeromax");
}

double prob_A_bar(std::size_t n, std::size_t Z, double c, std::size_t offspring) {
    check_event_domain(n, Z, c, offspring);
    const long double keep = 1.0L - static_cast<long double>(c) / static_cast<long double>(n);
    const long double child = 1.0L - std::pow(keep, static_cast<long double>(n - Z));
    return static_cast<double>(std::pow(child, static_cast<long double>(offspring)));
}

double prob_B_bar(std::size_t n, std::size_t Z, double c, std::size_t offspring) {
    check_event_domain(n, Z, c, offspring);
    const long double keep = 1.0L - static_cast<long double>(c) / static_cast<long double>(n);
    return static_cast<double>(std::pow(keep, static_cast<long double>(Z) * static_cast<long double>(offspring)));
}

double success_prob_lower_bound(std::size_t n, std::size_t Z, double c, std::size_t offspring) {
    check_event_domain(n, Z, c, offspring);
    if (Z == 0) {
        throw std::invalid_argument("success_prob_lower_bound: Z must be at least 1");
    }
    const double exponent =
        0.5 * c * std::exp(-c) * static_cast<double>(offspring) * static_cast<double>(Z) / static_cast<double>(n);
    return -std::expm1(-exponent);
}

}  // namespace saea
