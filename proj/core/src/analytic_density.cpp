#include "vmkl/analytic_density.hpp"

#include "vmkl/quadrature.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace vmkl {

struct AnalyticDensity::State
{
  DensityKind kind{};
  DomainBox domain;
  double normalizer = 1.0;
  double p_min = 0.0;
  double p_max = 0.0;
  std::vector<double> mean;
  std::function<double(std::span<const double>)> pdf;
  std::function<void(Rng&, std::span<double>)> sampler;
};

std::string to_string(DensityKind kind)
{
  switch (kind) {
    case DensityKind::truncatedGaussian:
      return "truncatedGaussian";
    case DensityKind::mixture:
      return "mixture";
    case DensityKind::uniform:
      return "uniform";
    case DensityKind::pushforward:
      return "pushforward";
  }
  return "unknown";
}

double normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile needs p in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace {

double normal_pdf(double z)
{
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace

AnalyticDensity AnalyticDensity::truncated_gaussian(const DomainBox& domain, std::vector<double> mean,
                                                    std::vector<double> sd)
{
  const std::size_t d = domain.dim();
  if (mean.size() != d || sd.size() != d)
    throw std::invalid_argument("truncated_gaussian parameter dimension mismatch");
  auto st = std::make_shared<State>();
  st->kind = DensityKind::truncatedGaussian;
  st->domain = domain;
  std::vector<double> cdf_lo(d), cdf_hi(d), mass(d);
  st->normalizer = 1.0;
  st->p_min = 1.0;
  st->p_max = 1.0;
  st->mean.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!(sd[i] > 0.0))
      throw std::invalid_argument("truncated_gaussian needs positive standard deviations");
    const double a = (domain.lower(i) - mean[i]) / sd[i];
    const double b = (domain.upper(i) - mean[i]) / sd[i];
    cdf_lo[i] = normal_cdf(a);
    cdf_hi[i] = normal_cdf(b);
    // Difference of upper tails is more accurate when both cut points are far right.
    mass[i] = a > 0.0 ? normal_cdf(-a) - normal_cdf(-b) : cdf_hi[i] - cdf_lo[i];
    if (!(mass[i] > 0.0))
      throw std::invalid_argument("truncated_gaussian box carries no mass");
    st->normalizer *= mass[i];
    const double scale = 1.0 / (sd[i] * mass[i]);
    st->p_min *= scale * std::min(normal_pdf(a), normal_pdf(b));
    st->p_max *= scale * normal_pdf(std::clamp(0.0, a, b));
    st->mean[i] = mean[i] + sd[i] * (normal_pdf(a) - normal_pdf(b)) / mass[i];
  }
  st->pdf = [domain, mean, sd, mass](std::span<const double> x) {
    if (!domain.contains(x))
      return 0.0;
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      v *= normal_pdf((x[i] - mean[i]) / sd[i]) / (sd[i] * mass[i]);
    return v;
  };
  st->sampler = [domain, mean, sd, cdf_lo, cdf_hi](Rng& rng, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      // Inverse CDF on the truncated range; in far tails fall back to the nearest bound.
      const double u = cdf_lo[i] + (cdf_hi[i] - cdf_lo[i]) * rng.uniform_open();
      double x = (u > 0.0 && u < 1.0) ? mean[i] + sd[i] * normal_quantile(u) : domain.lower(i);
      out[i] = std::clamp(x, domain.lower(i), domain.upper(i));
    }
  };
  return AnalyticDensity(std::move(st));
}

AnalyticDensity AnalyticDensity::uniform(const DomainBox& domain)
{
  auto st = std::make_shared<State>();
  st->kind = DensityKind::uniform;
  st->domain = domain;
  st->normalizer = domain.volume();
  st->p_min = st->p_max = 1.0 / domain.volume();
  st->mean = domain.midpoint();
  const double value = 1.0 / domain.volume();
  st->pdf = [domain, value](std::span<const double> x) { return domain.contains(x) ? value : 0.0; };
  st->sampler = [domain](Rng& rng, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = rng.uniform(domain.lower(i), domain.upper(i));
  };
  return AnalyticDensity(std::move(st));
}

AnalyticDensity AnalyticDensity::mixture(std::vector<double> weights, std::vector<AnalyticDensity> components)
{
  if (weights.empty() || weights.size() != components.size())
    throw std::invalid_argument("mixture needs one weight per component");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || std::any_of(weights.begin(), weights.end(), [](double w) { return w < 0.0; }))
    throw std::invalid_argument("mixture weights must be non-negative with positive sum");
  for (double& w : weights)
    w /= total;
  const DomainBox& domain = components.front().domain();
  for (const auto& c : components)
    if (!(c.domain() == domain))
      throw std::invalid_argument("mixture components must share a domain");

  auto st = std::make_shared<State>();
  st->kind = DensityKind::mixture;
  st->domain = domain;
  st->mean.assign(domain.dim(), 0.0);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    st->p_min += weights[k] * components[k].p_min();
    st->p_max += weights[k] * components[k].p_max();
    const auto m = components[k].mean();
    for (std::size_t i = 0; i < m.size(); ++i)
      st->mean[i] += weights[k] * m[i];
    acc += weights[k];
    cumulative.push_back(acc);
  }
  st->pdf = [weights, components](std::span<const double> x) {
    double v = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k)
      v += weights[k] * components[k].pdf(x);
    return v;
  };
  st->sampler = [cumulative, components](Rng& rng, std::span<double> out) {
    const double u = rng.uniform();
    std::size_t k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                             cumulative.begin());
    k = std::min(k, components.size() - 1);
    components[k].sample_one(rng, out);
  };
  return AnalyticDensity(std::move(st));
}

AnalyticDensity AnalyticDensity::pushforward(const DomainBox& domain,
                                             std::function<double(std::span<const double>)> unnormalized,
                                             std::function<void(Rng&, std::span<double>)> sampler,
                                             std::size_t grid_points)
{
  if (!unnormalized || !sampler)
    throw std::invalid_argument("pushforward needs a density and a sampler");
  auto st = std::make_shared<State>();
  st->kind = DensityKind::pushforward;
  st->domain = domain;
  const auto mass = quad::simpson_grid(unnormalized, domain, grid_points);
  if (!(mass.value > 0.0))
    throw std::invalid_argument("pushforward density has no mass on the domain");
  st->normalizer = mass.value;
  const std::size_t d = domain.dim();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  std::vector<double> first_moment(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto r = quad::simpson_grid([&](std::span<const double> x) { return x[i] * unnormalized(x); }, domain,
                                      grid_points);
    first_moment[i] = r.value / mass.value;
  }
  quad::simpson_grid(
    [&](std::span<const double> x) {
      const double v = unnormalized(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      return v;
    },
    domain, grid_points);
  // Grid extrema; the 10% margins make the recorded bounds conservative for smooth inputs.
  st->p_min = 0.9 * lo / mass.value;
  st->p_max = 1.1 * hi / mass.value;
  st->mean = std::move(first_moment);
  const double z = mass.value;
  st->pdf = [domain, unnormalized, z](std::span<const double> x) {
    return domain.contains(x) ? unnormalized(x) / z : 0.0;
  };
  st->sampler = std::move(sampler);
  return AnalyticDensity(std::move(st));
}

DensityKind AnalyticDensity::kind() const
{
  return state_->kind;
}

const DomainBox& AnalyticDensity::domain() const
{
  return state_->domain;
}

double AnalyticDensity::normalizer() const
{
  return state_->normalizer;
}

double AnalyticDensity::p_min() const
{
  return state_->p_min;
}

double AnalyticDensity::p_max() const
{
  return state_->p_max;
}

double AnalyticDensity::pdf(std::span<const double> x) const
{
  return state_->pdf(x);
}

void AnalyticDensity::sample_one(Rng& rng, std::span<double> out) const
{
  if (out.size() != dim())
    throw std::invalid_argument("sample buffer has wrong dimension");
  state_->sampler(rng, out);
}

PointSet AnalyticDensity::sample(Rng& rng, std::size_t count) const
{
  std::vector<double> coords(count * dim());
  for (std::size_t i = 0; i < count; ++i)
    sample_one(rng, std::span<double>(coords.data() + i * dim(), dim()));
  return PointSet(dim(), std::move(coords));
}

std::vector<double> AnalyticDensity::mean() const
{
  return state_->mean;
}

} // namespace vmkl
