#include "saea/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace saea {

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t block = 32;
    if (values.size() <= block) {
        double total = 0.0;
        for (double v : values) {
            total += v;
        }
        return total;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
    if (values.empty()) {
        return 0.0;
    }
    return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2) {
        return 0.0;
    }
    const double m = mean(values);
    // Two-pass form with a compensated sum of squared deviations.
    double total = 0.0;
    double compensation = 0.0;
    for (double v : values) {
        const double d = (v - m) * (v - m) - compensation;
        const double next = total + d;
        compensation = (next - total) - d;
        total = next;
    }
    return std::sqrt(total / static_cast<double>(values.size() - 1));
}

double normal_critical_value(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + confidence / 2.0);
}

}  // namespace saea
