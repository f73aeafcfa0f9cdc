#include "vmkl/closeness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vmkl {

std::string to_string(Decision d)
{
  return d == Decision::H1 ? "H1" : "H0";
}

double sample_exponent(double beta, std::size_t dim)
{
  if (!(beta > 0.0) || dim < 1)
    throw std::invalid_argument("sample exponent needs beta > 0 and dim >= 1");
  return std::max(2.0, (2.0 * beta + static_cast<double>(dim)) / (2.0 * beta));
}

SampleSizeRule::SampleSizeRule(double beta_, std::size_t dim_, double kappa_)
  : beta(beta_)
  , dim(dim_)
  , kappa(kappa_)
  , tau(sample_exponent(beta_, dim_))
{
  if (!(kappa > 0.0))
    throw std::invalid_argument("sample-size constant kappa must be positive");
}

std::pair<std::uint64_t, std::uint64_t> required_samples(double epsilon, double delta, const SampleSizeRule& rule)
{
  if (!(epsilon > 0.0))
    throw std::invalid_argument("required_samples needs epsilon > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("required_samples needs 0 < delta < 1");
  const double n = std::ceil(rule.kappa * std::pow(std::log(1.0 / delta) / epsilon, rule.tau));
  if (!(n < 1e18))
    throw std::overflow_error("required sample size overflows");
  const auto count = static_cast<std::uint64_t>(n);
  return {count, count};
}

ClosenessConfig make_closeness_config(const DomainBox& domain, double beta, double bandwidth_scale)
{
  ClosenessConfig cfg{domain, make_kernel(kernel_order_for_smoothness(beta), domain.dim()), {}, 1.0};
  cfg.estimator.beta = beta;
  cfg.estimator.bandwidth_scale = bandwidth_scale;
  return cfg;
}

Decision decide(double statistic, double epsilon)
{
  return statistic > 0.5 * epsilon ? Decision::H1 : Decision::H0;
}

TestOutcome closeness_test(const PointSet& samples_p, const PointSet& samples_q, double epsilon, double delta,
                           const ClosenessConfig& config)
{
  if (!(epsilon > 0.0))
    throw std::invalid_argument("closeness_test needs epsilon > 0");
  if (!(config.statistic_scale > 0.0))
    throw std::invalid_argument("statistic scale must be positive");
  TestOutcome out;
  out.estimate = vm_estimate(samples_p, samples_q, config.kernel, config.domain, config.estimator);
  out.statistic = out.estimate.value / config.statistic_scale;
  out.threshold = 0.5 * epsilon;
  out.decision = decide(out.statistic, epsilon);
  out.n = samples_p.size();
  out.m = samples_q.size();
  out.epsilon = epsilon;
  out.delta = delta;
  return out;
}

} // namespace vmkl
