#pragma once

#include "vmkl/divergence.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace vmkl {

enum class Decision
{
  H0,
  H1
};

std::string to_string(Decision d);

/// Sample-size rule n = m = ceil(kappa * ((1/eps) ln(1/delta))^tau).
struct SampleSizeRule
{
  SampleSizeRule(double beta, std::size_t dim, double kappa);

  double beta;
  std::size_t dim;
  double kappa;
  /// max{2, (2 beta + d) / (2 beta)}.
  double tau;
};

double sample_exponent(double beta, std::size_t dim);

std::pair<std::uint64_t, std::uint64_t> required_samples(double epsilon, double delta, const SampleSizeRule& rule);

struct ClosenessConfig
{
  DomainBox domain;
  KernelSpec kernel;
  EstimatorOptions estimator;
  /// The statistic is the VM estimate divided by this (a D_max normalization); 1 for plain testing.
  double statistic_scale = 1.0;
};

/// Kernel and options for smoothness beta on a domain, with the default kernel order.
ClosenessConfig make_closeness_config(const DomainBox& domain, double beta, double bandwidth_scale = 1.0);

struct TestOutcome
{
  Decision decision = Decision::H0;
  /// Scaled statistic compared with the threshold.
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  KlEstimate estimate;
};

/// H1 iff statistic > epsilon / 2.
Decision decide(double statistic, double epsilon);

/// Runs the Von Mises estimator on the two sample sets and thresholds it at epsilon / 2.
/// `delta` is recorded for provenance only; the sample sizes are the caller's.
TestOutcome closeness_test(const PointSet& samples_p, const PointSet& samples_q, double epsilon, double delta,
                           const ClosenessConfig& config);

} // namespace vmkl
