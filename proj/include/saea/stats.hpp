#pragma once

#include <cstddef>
#include <span>

namespace saea {

/// Pairwise (cascade) summation; result independent of the caller's accumulation order.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

/// Unbiased (n-1) sample standard deviation; 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

/// Two-sided normal critical value, e.g. 1.95996 for confidence 0.95.
double normal_critical_value(double confidence);

}  // namespace saea
