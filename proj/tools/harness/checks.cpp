#include "experiments.hpp"

#include "pairs.hpp"

#include "vmkl/analytic_density.hpp"
#include "vmkl/discovery.hpp"
#include "vmkl/divergence.hpp"
#include "vmkl/kernel_density.hpp"
#include "vmkl/quadrature.hpp"
#include "vmkl/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vmkl::harness {

using nlohmann::json;

namespace {

json config_object(const Config& config)
{
  json j = json::object();
  for (const auto& [k, v] : config.values())
    j[k] = v;
  return j;
}

// Max |int K(u) u^s du - [s = 0]| over multi-indices with |s| <= order.
double worst_moment_error(int order, std::size_t dim, double tol)
{
  const auto k = make_kernel(order, dim);
  const auto box = DomainBox::cube(dim, -1.0, 1.0);
  double worst = 0.0;
  std::vector<int> s(dim, 0);
  for (;;) {
    int total = 0;
    for (int v : s)
      total += v;
    if (total <= order) {
      auto f = [&](std::span<const double> u) {
        double v = k(u);
        for (std::size_t i = 0; i < dim; ++i)
          v *= std::pow(u[i], s[i]);
        return v;
      };
      worst = std::max(worst, std::abs(quad::romberg(f, box, tol).value - (total == 0 ? 1.0 : 0.0)));
    }
    std::size_t pos = 0;
    while (pos < dim && ++s[pos] > order)
      s[pos++] = 0;
    if (pos == dim)
      return worst;
  }
}

ExperimentReport kernel_moments(const Config& config)
{
  const double tol = config.get_double("tolerance", 1e-6);
  ExperimentReport report;
  report.name = "kernel_moments";
  std::ostringstream csv;
  csv << "order,dim,max_moment_error\n";
  json rows = json::array();
  double worst = 0.0;
  for (double order : config.get_doubles("orders", {2, 4}))
    for (double dim : config.get_doubles("dims", {1, 2})) {
      const double e = worst_moment_error(static_cast<int>(order), static_cast<std::size_t>(dim), 1e-10);
      worst = std::max(worst, e);
      rows.push_back({{"order", static_cast<int>(order)}, {"dim", static_cast<int>(dim)}, {"max_moment_error", e}});
      csv << static_cast<int>(order) << ',' << static_cast<int>(dim) << ',' << format_double(e) << '\n';
    }
  report.passed = worst <= tol;
  report.summary = {{"experiment", "estimate-kl"}, {"check", "kernel_moments"}, {"config", config_object(config)},
                    {"rows", rows}, {"worst", worst}, {"tolerance", tol}, {"passed", report.passed}};
  report.csv = csv.str();
  return report;
}

// VM with the same fitted estimate on both sides must vanish: every correction cancels.
ExperimentReport shared_fit_zero(const Config& config)
{
  const std::size_t inputs = config.get_uint("inputs", 100);
  const std::uint64_t seed = config.get_uint("seed", 2);
  const double tol = config.get_double("tolerance", 1e-12);
  ExperimentReport report;
  report.name = "shared_fit_zero";
  std::ostringstream csv;
  csv << "input,dim,order,n,value\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs; ++i) {
    Rng rng = Rng::stream(seed, i, "exact_zero");
    const std::size_t dim = 1 + i % 3;
    const auto box = DomainBox::cube(dim, -2.0, 2.0);
    std::vector<double> mean(dim), sd(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      mean[j] = rng.uniform(-1.0, 1.0);
      sd[j] = rng.uniform(0.3, 2.0);
    }
    const auto p = AnalyticDensity::truncated_gaussian(box, mean, sd);
    const int order = 1 + static_cast<int>(rng() % 4);
    const auto kernel = make_kernel(order, dim);
    const std::size_t n = 4 + rng() % 400;
    const auto fit = kde_fit(p.sample(rng, n), kernel, rng.uniform(0.05, 1.5), box, default_floor(box));
    const auto est = vm_estimate(fit, fit, p.sample(rng, 2 + rng() % 300), p.sample(rng, 2 + rng() % 300));
    worst = std::max(worst, std::abs(est.value));
    csv << i << ',' << dim << ',' << order << ',' << n << ',' << format_double(est.value) << '\n';
  }
  report.passed = worst <= tol;
  report.summary = {{"experiment", "estimate-kl"}, {"check", "shared_fit_zero"}, {"config", config_object(config)},
                    {"inputs", inputs}, {"worst", worst}, {"tolerance", tol}, {"passed", report.passed}};
  report.csv = csv.str();
  return report;
}

// Oracle against mu^2 / (2 sd^2), the untruncated closed form for a mean shift.
ExperimentReport oracle_agreement(const Config& config)
{
  const std::string name = config.get("pair", "wide6");
  const double shift = config.get_double("shift", 0.5);
  const double tol = config.get_double("tolerance", 1e-3);
  const ReferencePair pair = reference_pair(name, config.get_uint("dim", 1));
  const auto r = kl_oracle_with_error(pair.p, pair.q, 1e-10);
  const double closed = 0.5 * shift * shift;
  const double gap = std::abs(r.value - closed);
  ExperimentReport report;
  report.name = "oracle_agreement";
  report.passed = gap <= tol;
  report.summary = {{"experiment", "estimate-kl"}, {"check", "oracle"},      {"config", config_object(config)},
                    {"pair", name},                {"oracle", r.value},      {"residual", r.error},
                    {"closed_form", closed},       {"gap", gap},             {"tolerance", tol},
                    {"passed", report.passed}};
  report.csv = "pair,oracle,closed_form,gap\n" + name + ',' + format_double(r.value) + ',' + format_double(closed) +
               ',' + format_double(gap) + '\n';
  return report;
}

} // namespace

ExperimentReport run_estimator_check(const Config& config)
{
  const std::string check = config.get("check", "");
  if (check == "kernel_moments")
    return kernel_moments(config);
  if (check == "shared_fit_zero")
    return shared_fit_zero(config);
  if (check == "oracle")
    return oracle_agreement(config);
  throw std::invalid_argument("check must be kernel_moments, shared_fit_zero or oracle");
}

ExperimentReport run_schedule_check(const Config& config)
{
  const double beta = config.get_double("beta", 2.0);
  const std::size_t dim = config.get_uint("dim", 1);
  const double kappa = config.get_double("kappa", 8.0);
  const double max_budget = config.get_double("max_error_budget", 0.1);
  ExperimentReport report;
  report.name = "schedule";
  std::ostringstream csv;
  csv << "epsilon,c,k,error_budget,exhaustive_interventional\n";
  json rows = json::array();
  double worst = 0.0;
  for (double eps : config.get_doubles("epsilons", {1.0, 0.5, 0.25, 0.1}))
    for (double c : config.get_doubles("c", {1.0, 3.0, 5.0})) {
      const LevinSchedule s = build_schedule(eps, c, beta, dim, kappa);
      const double budget = s.error_budget();
      worst = std::max(worst, budget);
      rows.push_back({{"epsilon", eps}, {"c", c}, {"k", s.k}, {"l", s.l}, {"n", s.n}, {"m", s.m},
                      {"delta", s.delta}, {"error_budget", budget},
                      {"exhaustive_interventional", s.exhaustive_interventional()}});
      csv << format_double(eps) << ',' << format_double(c) << ',' << s.k << ',' << format_double(budget) << ','
          << s.exhaustive_interventional() << '\n';
    }
  report.passed = worst <= max_budget;
  report.summary = {{"experiment", "discover"}, {"dry_run", true},        {"config", config_object(config)},
                    {"rows", rows},             {"worst_budget", worst}, {"max_error_budget", max_budget},
                    {"passed", report.passed}};
  report.csv = csv.str();
  return report;
}

} // namespace vmkl::harness
