#include "vmkl/divergence.hpp"

#include "vmkl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vmkl {

std::string to_string(Estimator e)
{
  switch (e) {
    case Estimator::vonMises:
      return "vonMises";
    case Estimator::plugIn:
      return "plugIn";
    case Estimator::oracle:
      return "oracle";
  }
  return "unknown";
}

namespace {

double resolve_floor(const EstimatorOptions& options, const DomainBox& domain)
{
  return options.floor < 0.0 ? default_floor(domain) : options.floor;
}

void check_inputs(const PointSet& p, const PointSet& q, const KernelSpec& kernel, const DomainBox& domain,
                  std::size_t minimum)
{
  if (p.size() < minimum || q.size() < minimum)
    throw std::invalid_argument("KL estimation needs at least " + std::to_string(minimum) + " samples per side");
  if (p.dim() != domain.dim() || q.dim() != domain.dim() || kernel.dim() != domain.dim())
    throw std::invalid_argument("KL estimation dimension mismatch");
}

std::size_t fit_count(std::size_t n)
{
  return (n + 1) / 2;
}

} // namespace

KlEstimate vm_estimate(const KernelDensity& p_hat, const KernelDensity& q_hat, const PointSet& eval_p,
                       const PointSet& eval_q)
{
  if (eval_p.empty() || eval_q.empty())
    throw std::invalid_argument("Von Mises estimate needs non-empty evaluation sets");
  KlEstimate est;
  est.estimator = Estimator::vonMises;
  est.n = p_hat.size() + eval_p.size();
  est.m = q_hat.size() + eval_q.size();
  est.h_p = p_hat.bandwidth();
  est.h_q = q_hat.bandwidth();
  est.floor = std::max(p_hat.floor(), q_hat.floor());

  auto clamp_count = [&](const KernelDensity& f, double v) { return v <= f.floor() ? 1u : 0u; };

  double log_sum = 0.0;
  for (std::size_t i = 0; i < eval_p.size(); ++i) {
    const double pv = p_hat(eval_p[i]);
    const double qv = q_hat(eval_p[i]);
    est.clamped += clamp_count(p_hat, pv) + clamp_count(q_hat, qv);
    log_sum += std::log(pv / qv);
  }
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < eval_q.size(); ++i) {
    const double pv = p_hat(eval_q[i]);
    const double qv = q_hat(eval_q[i]);
    est.clamped += clamp_count(p_hat, pv) + clamp_count(q_hat, qv);
    ratio_sum += pv / qv;
  }
  est.evaluations = 2 * (eval_p.size() + eval_q.size());
  est.degenerate = est.clamped == est.evaluations;
  est.value = log_sum / static_cast<double>(eval_p.size()) + 1.0 - ratio_sum / static_cast<double>(eval_q.size());
  return est;
}

KlEstimate vm_estimate(const PointSet& samples_p, const PointSet& samples_q, const KernelSpec& kernel,
                       const DomainBox& domain, const EstimatorOptions& options)
{
  check_inputs(samples_p, samples_q, kernel, domain, 4);
  const std::size_t n = samples_p.size();
  const std::size_t m = samples_q.size();
  const double floor = resolve_floor(options, domain);
  const double h_p = bandwidth_rule(n, options.beta, domain.dim(), options.bandwidth_scale);
  const double h_q = bandwidth_rule(m, options.beta, domain.dim(), options.bandwidth_scale);
  const std::size_t fp = fit_count(n);
  const std::size_t fq = fit_count(m);
  const auto p_hat = kde_fit(samples_p.slice(0, fp), kernel, h_p, domain, floor);
  const auto q_hat = kde_fit(samples_q.slice(0, fq), kernel, h_q, domain, floor);
  if (!domain.contains_all(samples_p) || !domain.contains_all(samples_q))
    throw std::out_of_range("vm_estimate: sample outside the domain");
  return vm_estimate(p_hat, q_hat, samples_p.slice(fp, n - fp), samples_q.slice(fq, m - fq));
}

KlEstimate plugin_estimate(const KernelDensity& p_hat, const KernelDensity& q_hat, const EstimatorOptions& options)
{
  const DomainBox& domain = p_hat.domain();
  if (!(q_hat.domain() == domain))
    throw std::invalid_argument("plug-in estimate needs fits on the same domain");
  std::size_t grid = options.plugin_grid;
  if (grid == 0)
    grid = domain.dim() == 1 ? 4097 : domain.dim() == 2 ? 257 : 65;
  KlEstimate est;
  est.estimator = Estimator::plugIn;
  est.n = p_hat.size();
  est.m = q_hat.size();
  est.h_p = p_hat.bandwidth();
  est.h_q = q_hat.bandwidth();
  est.floor = std::max(p_hat.floor(), q_hat.floor());
  const auto r = quad::simpson_grid(
    [&](std::span<const double> x) {
      const double pv = p_hat(x);
      const double qv = q_hat(x);
      est.clamped += (pv <= p_hat.floor()) + (qv <= q_hat.floor());
      est.evaluations += 2;
      return pv * std::log(pv / qv);
    },
    domain, grid);
  est.degenerate = est.clamped == est.evaluations;
  est.value = r.value;
  est.residual = r.error;
  if (r.error > options.plugin_tolerance)
    throw ConvergenceError("plug-in quadrature grid too coarse", r.error);
  return est;
}

KlEstimate plugin_estimate(const PointSet& samples_p, const PointSet& samples_q, const KernelSpec& kernel,
                           const DomainBox& domain, const EstimatorOptions& options)
{
  check_inputs(samples_p, samples_q, kernel, domain, 1);
  const double floor = resolve_floor(options, domain);
  const double h_p = bandwidth_rule(samples_p.size(), options.beta, domain.dim(), options.bandwidth_scale);
  const double h_q = bandwidth_rule(samples_q.size(), options.beta, domain.dim(), options.bandwidth_scale);
  const auto p_hat = kde_fit(samples_p, kernel, h_p, domain, floor);
  const auto q_hat = kde_fit(samples_q, kernel, h_q, domain, floor);
  return plugin_estimate(p_hat, q_hat, options);
}

quad::Result kl_oracle_with_error(const AnalyticDensity& p, const AnalyticDensity& q, double tol)
{
  if (!(p.domain() == q.domain()))
    throw std::invalid_argument("kl_oracle needs densities on the same domain");
  const DomainBox& domain = p.domain();
  auto integrand = [&](std::span<const double> x) {
    const double pv = p.pdf(x);
    if (pv <= 0.0)
      return 0.0;
    return pv * std::log(pv / q.pdf(x));
  };
  if (domain.dim() == 1) {
    return quad::adaptive([&](double x) { return integrand(std::span<const double>(&x, 1)); }, domain.lower(0),
                          domain.upper(0), tol);
  }
  if (domain.dim() > 3)
    throw std::invalid_argument("kl_oracle supports dimensions 1 to 3");
  return quad::romberg(integrand, domain, tol, 257);
}

double kl_oracle(const AnalyticDensity& p, const AnalyticDensity& q, double tol)
{
  return std::max(0.0, kl_oracle_with_error(p, q, tol).value);
}

} // namespace vmkl
