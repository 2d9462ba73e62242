#pragma once

// Independent reference computations shared by the unit tests.

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

/// Pearson statistic against expected counts; bins with small expectation are pooled
/// left to right until each holds at least 5.
inline bool chi_square_accepts(const std::vector<double>& observed, const std::vector<double>& expected,
                               double significance = 0.01) {
    std::vector<double> obs;
    std::vector<double> exp;
    double o = 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o += observed[i];
        e += expected[i];
        if (e >= 5.0) {
            obs.push_back(o);
            exp.push_back(e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 && !exp.empty()) {
        obs.back() += o;
        exp.back() += e;
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    }
    const boost::math::chi_squared_distribution<double> dist(static_cast<double>(obs.size() - 1));
    return stat <= boost::math::quantile(boost::math::complement(dist, significance));
}

/// Binomial standard error of a proportion estimate.
inline double binomial_se(double p, double trials) { return std::sqrt(p * (1.0 - p) / trials); }

/// Exact single-child improvement probability on OneMax: more zeros than ones flipped.
inline double onemax_child_improves(std::size_t n, std::size_t Z, double c) {
    const double p = c / static_cast<double>(n);
    const boost::math::binomial_distribution<double> zeros(static_cast<double>(Z), p);
    const boost::math::binomial_distribution<double> ones(static_cast<double>(n - Z), p);
    double q = 0.0;
    for (std::size_t a = 1; a <= Z; ++a) {
        q += boost::math::pdf(zeros, static_cast<double>(a)) * boost::math::cdf(ones, static_cast<double>(a - 1));
    }
    return q;
}

/// Best-of-k success probability on OneMax.
inline double onemax_success(std::size_t n, std::size_t Z, double c, std::size_t k) {
    return 1.0 - std::pow(1.0 - onemax_child_improves(n, Z, c), static_cast<double>(k));
}

}  // namespace oracle
