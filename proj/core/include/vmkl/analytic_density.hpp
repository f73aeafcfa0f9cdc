#pragma once

#include "vmkl/point_set.hpp"
#include "vmkl/random.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vmkl {

enum class DensityKind
{
  truncatedGaussian,
  mixture,
  uniform,
  pushforward
};

std::string to_string(DensityKind kind);

/// A known density on a box with exact evaluation and sampling.
///
/// Every density records a positive lower bound `p_min()` and an upper bound
/// `p_max()` valid on the whole domain. Copies share immutable state.
class AnalyticDensity
{
public:
  /// Product of independent normals N(mean_i, sd_i^2) restricted to the box.
  static AnalyticDensity truncated_gaussian(const DomainBox& domain, std::vector<double> mean, std::vector<double> sd);
  static AnalyticDensity uniform(const DomainBox& domain);
  /// Weighted mixture; weights are normalized, components must share the domain.
  static AnalyticDensity mixture(std::vector<double> weights, std::vector<AnalyticDensity> components);
  /// Law of a transformed variable given by an unnormalized density and an exact sampler.
  /// The normalizer and bounds are computed on a tensor grid of `grid_points` per axis.
  static AnalyticDensity pushforward(const DomainBox& domain, std::function<double(std::span<const double>)> unnormalized,
                                     std::function<void(Rng&, std::span<double>)> sampler,
                                     std::size_t grid_points = 257);

  DensityKind kind() const;
  const DomainBox& domain() const;
  std::size_t dim() const { return domain().dim(); }
  /// Mass that turns the kind's base function into a probability density on the box.
  double normalizer() const;
  double p_min() const;
  double p_max() const;

  /// Density at x; zero outside the domain.
  double pdf(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return pdf(x); }

  void sample_one(Rng& rng, std::span<double> out) const;
  PointSet sample(Rng& rng, std::size_t count) const;

  /// Mean of each coordinate (closed form where available, quadrature otherwise).
  std::vector<double> mean() const;

  struct State;

private:
  explicit AnalyticDensity(std::shared_ptr<const State> state)
    : state_(std::move(state))
  {
  }
  std::shared_ptr<const State> state_;
};

/// Standard normal CDF.
double normal_cdf(double z);
/// Inverse standard normal CDF for p in (0, 1).
double normal_quantile(double p);

} // namespace vmkl
