#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace vmkl::harness {

/// Linear-interpolated quantile (the common "type 7" definition); q in [0, 1].
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);
double interquartile_range(std::vector<double> values);
double mean(std::span<const double> values);

struct Proportion
{
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  /// Wilson score interval at 95%.
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// sqrt(rate (1 - rate) / trials).
  double standard_error = 0.0;
};

Proportion proportion(std::size_t successes, std::size_t trials);

/// Least-squares slope of log(y) on log(x); empty with fewer than two distinct x values.
std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y);

/// P(X >= k) for X ~ Binomial(n, p).
double binomial_upper_tail(std::size_t n, double p, std::size_t k);

/// Probability that the majority of an odd number of replicates succeeds.
double majority_success(std::size_t replicates, double p);

} // namespace vmkl::harness
