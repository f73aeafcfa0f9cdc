#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vmkl::harness {

double quantile(std::vector<double> values, double q)
{
  if (values.empty())
    throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values)
{
  return quantile(std::move(values), 0.5);
}

double interquartile_range(std::vector<double> values)
{
  return quantile(values, 0.75) - quantile(values, 0.25);
}

double mean(std::span<const double> values)
{
  if (values.empty())
    throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Proportion proportion(std::size_t successes, std::size_t trials)
{
  if (successes > trials)
    throw std::invalid_argument("more successes than trials");
  Proportion p;
  p.successes = successes;
  p.trials = trials;
  if (trials == 0)
    return p;
  const double n = static_cast<double>(trials);
  const double r = static_cast<double>(successes) / n;
  constexpr double z = 1.959963984540054;
  const double denom = 1.0 + z * z / n;
  const double centre = (r + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(r * (1.0 - r) / n + z * z / (4.0 * n * n)) / denom;
  p.rate = r;
  p.ci_low = std::max(0.0, centre - half);
  p.ci_high = std::min(1.0, centre + half);
  p.standard_error = std::sqrt(r * (1.0 - r) / n);
  return p;
}

std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size())
    throw std::invalid_argument("slope fit needs paired samples");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::domain_error("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 2)
    return std::nullopt;
  const double mx = mean(lx);
  const double my = mean(ly);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0)
    return std::nullopt;
  return sxy / sxx;
}

double binomial_upper_tail(std::size_t n, double p, std::size_t k)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial probability must lie in [0, 1]");
  if (k == 0)
    return 1.0;
  if (k > n)
    return 0.0;
  if (p == 0.0)
    return 0.0;
  if (p == 1.0)
    return 1.0;
  double total = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t i = k; i <= n; ++i) {
    const double ii = static_cast<double>(i);
    const double log_term = std::lgamma(nn + 1.0) - std::lgamma(ii + 1.0) - std::lgamma(nn - ii + 1.0) +
                            ii * std::log(p) + (nn - ii) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return std::min(1.0, total);
}

double majority_success(std::size_t replicates, double p)
{
  return binomial_upper_tail(replicates, p, replicates / 2 + 1);
}

} // namespace vmkl::harness
