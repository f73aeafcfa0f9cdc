#include <doctest.h>

#include "pairs.hpp"
#include "vmkl/divergence.hpp"
#include "vmkl/errors.hpp"
#include "vmkl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace vmkl;
using vmkl::harness::reference_pair;

namespace {

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

AnalyticDensity gauss(double lo, double hi, double mu, double sd)
{
  return AnalyticDensity::truncated_gaussian(DomainBox::cube(1, lo, hi), {mu}, {sd});
}

struct Errors
{
  std::vector<double> vm;
  std::vector<double> plugin;
  std::vector<double> vm_values;
};

Errors replicate(const AnalyticDensity& p, const AnalyticDensity& q, std::size_t n, int reps, bool plugin,
                 std::uint64_t seed)
{
  const double truth = kl_oracle(p, q, 1e-10);
  const KernelSpec k = make_kernel(kernel_order_for_smoothness(2.0), 1);
  EstimatorOptions o;
  Errors e;
  for (int r = 0; r < reps; ++r) {
    Rng rp = Rng::stream(seed, r, "p");
    Rng rq = Rng::stream(seed, r, "q");
    const PointSet xp = p.sample(rp, n);
    const PointSet xq = q.sample(rq, n);
    const double v = vm_estimate(xp, xq, k, p.domain(), o).value;
    e.vm_values.push_back(v);
    e.vm.push_back(std::abs(v - truth));
    if (plugin)
      e.plugin.push_back(std::abs(plugin_estimate(xp, xq, k, p.domain(), o).value - truth));
  }
  return e;
}

} // namespace

TEST_CASE("analytic densities integrate to one and respect their recorded bounds")
{
  for (const auto& name : harness::reference_pair_names()) {
    for (std::size_t dim : {1u, 2u}) {
      const auto pair = reference_pair(name, dim);
      for (const AnalyticDensity* d : {&pair.p, &pair.q}) {
        const auto mass = quad::romberg([&](std::span<const double> x) { return d->pdf(x); }, d->domain(), 1e-8);
        CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(d->p_min() > 0.0);
        Rng rng(3);
        for (int i = 0; i < 2000; ++i) {
          std::vector<double> x(dim);
          for (std::size_t j = 0; j < dim; ++j)
            x[j] = rng.uniform(d->domain().lower()[j], d->domain().upper()[j]);
          REQUIRE(d->pdf(x) >= d->p_min() * (1.0 - 1e-12));
          REQUIRE(d->pdf(x) <= d->p_max() * (1.0 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("analytic samplers stay in the domain and match the quadrature mean")
{
  const auto pair = reference_pair("mixture", 1);
  Rng rng(8);
  const std::size_t n = 100000;
  const PointSet xs = pair.p.sample(rng, n);
  CHECK(pair.p.domain().contains_all(xs));
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += xs[i][0];
    s2 += xs[i][0] * xs[i][0];
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - pair.p.mean()[0]) < 3.0 * se);

  const auto tg = gauss(-1.0, 2.0, 0.7, 0.4);
  const PointSet ys = tg.sample(rng, n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    t += ys[i][0];
  const auto exact = quad::adaptive([&](double x) { return x * tg.pdf(std::span<const double>(&x, 1)); }, -1.0, 2.0, 1e-12);
  CHECK(std::abs(t / n - exact.value) < 3.0 * 0.4 / std::sqrt(double(n)));
  CHECK(tg.mean()[0] == doctest::Approx(exact.value).epsilon(1e-9));
}

TEST_CASE("pushforward density normalizes a user density")
{
  const DomainBox box = DomainBox::cube(1, 0.0, 1.0);
  const auto d = AnalyticDensity::pushforward(
    box, [](std::span<const double> x) { return 1.0 + x[0]; },
    [](Rng& rng, std::span<double> out) { out[0] = (std::sqrt(1.0 + 3.0 * rng.uniform()) - 1.0); });
  const double x[1] = {0.5};
  CHECK(d.pdf(x) == doctest::Approx(1.5 / 1.5).epsilon(1e-9));
  CHECK(d.kind() == DensityKind::pushforward);
}

TEST_CASE("shared fit gives an exact zero")
{
  const auto pair = reference_pair("shift", 1);
  const KernelSpec k = make_kernel(2, 1);
  for (int trial = 0; trial < 25; ++trial) {
    Rng rng = Rng::stream(5, trial, "shared");
    const auto fit = kde_fit(pair.p.sample(rng, 64 + trial), k, 0.3 + 0.01 * trial, pair.p.domain(), 1e-3);
    const auto r = vm_estimate(fit, fit, pair.p.sample(rng, 50), pair.q.sample(rng, 70));
    CHECK(r.value == 0.0);
  }
}

TEST_CASE("estimate records totals, bandwidths and floor")
{
  const auto pair = reference_pair("shift", 1);
  Rng rng(1);
  const PointSet xp = pair.p.sample(rng, 501);
  const PointSet xq = pair.q.sample(rng, 300);
  EstimatorOptions o;
  o.bandwidth_scale = 1.5;
  const auto r = vm_estimate(xp, xq, make_kernel(1, 1), pair.p.domain(), o);
  CHECK(r.n == 501);
  CHECK(r.m == 300);
  CHECK(r.h_p == doctest::Approx(bandwidth_rule(501, 2.0, 1, 1.5)));
  CHECK(r.h_q == doctest::Approx(bandwidth_rule(300, 2.0, 1, 1.5)));
  CHECK(r.floor == doctest::Approx(default_floor(pair.p.domain())));
  // Odd counts put the extra sample in the fitting half.
  CHECK(r.evaluations == 2 * (250 + 150));
  CHECK(r.estimator == Estimator::vonMises);

  CHECK_THROWS_AS(vm_estimate(xp.slice(0, 3), xq, make_kernel(1, 1), pair.p.domain(), o), std::invalid_argument);
  CHECK_THROWS_AS(vm_estimate(xp, xq.slice(0, 3), make_kernel(1, 1), pair.p.domain(), o), std::invalid_argument);
}

TEST_CASE("all-clamped evaluation is reported as degenerate, not thrown")
{
  const DomainBox box = DomainBox::cube(1, 0.0, 10.0);
  const KernelSpec k = make_kernel(1, 1);
  const auto fit = kde_fit(PointSet(1, {0.1, 0.2, 0.3, 0.4}), k, 0.2, box, 1e-3);
  const auto r = vm_estimate(fit, fit, PointSet(1, {9.0, 9.5}), PointSet(1, {8.0, 8.5}));
  CHECK(r.degenerate);
  CHECK(r.clamped == r.evaluations);
}

TEST_CASE("VM on equal densities is near zero")
{
  const auto p = gauss(-3, 3, 0, 1);
  const auto e = replicate(p, p, 4096, 50, false, 301);
  CHECK(std::abs(median(e.vm_values)) <= 0.05);
}

TEST_CASE("VM on the shifted Gaussian pair is within 0.05 of the oracle")
{
  const auto e = replicate(gauss(-3, 3, 0, 1), gauss(-3, 3, 0.5, 1), 8192, 50, false, 302);
  const double truth = kl_oracle(gauss(-3, 3, 0, 1), gauss(-3, 3, 0.5, 1), 1e-10);
  CHECK(std::abs(median(e.vm_values) - truth) <= 0.05);
}

TEST_CASE("plug-in on identical fits is exactly zero and near the oracle on the shifted pair")
{
  const auto p = gauss(-3, 3, 0, 1);
  const auto q = gauss(-3, 3, 0.5, 1);
  Rng rng(6);
  const KernelSpec k = make_kernel(1, 1);
  const auto fit = kde_fit(p.sample(rng, 500), k, 0.4, p.domain(), 1e-3);
  CHECK(plugin_estimate(fit, fit, EstimatorOptions{}).value == 0.0);

  const PointSet xp = p.sample(rng, 8192);
  const PointSet xq = q.sample(rng, 8192);
  const auto r = plugin_estimate(xp, xq, k, p.domain(), EstimatorOptions{});
  CHECK(std::isfinite(r.value));
  CHECK(std::abs(r.value - kl_oracle(p, q)) <= 0.1);
  CHECK(r.estimator == Estimator::plugIn);
  CHECK(r.residual <= 1e-4);
}

TEST_CASE("plug-in reports an unresolved grid with its residual")
{
  const auto p = gauss(-3, 3, 0, 1);
  Rng rng(2);
  const KernelSpec k = make_kernel(1, 1);
  EstimatorOptions o;
  o.plugin_grid = 9;
  o.plugin_tolerance = 1e-12;
  try {
    plugin_estimate(p.sample(rng, 200), gauss(-3, 3, 1, 1).sample(rng, 200), k, p.domain(), o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 1e-12);
  }
}

TEST_CASE("VM has the smaller median error than plug-in on the shifted Gaussian pair at n = 4096"
          * doctest::may_fail())
{
  // Second-order VM bias is -1/2 E_p[(dp/p - dq/q)^2] <= 0; on this pair it
  // dominates and plug-in wins. Kept as a tracked expectation.
  const auto e = replicate(gauss(-3, 3, 0, 1), gauss(-3, 3, 0.5, 1), 4096, 50, true, 303);
  CHECK(median(e.vm) <= median(e.plugin));
}

TEST_CASE("VM bias on the shifted Gaussian pair is negative")
{
  const auto p = gauss(-3, 3, 0, 1);
  const auto q = gauss(-3, 3, 0.5, 1);
  const auto e = replicate(p, q, 4096, 50, false, 303);
  CHECK(median(e.vm_values) < kl_oracle(p, q, 1e-10));
}

TEST_CASE("oracle: zero on identical densities, closed form on a wide box, asymmetry")
{
  for (const auto& name : harness::reference_pair_names()) {
    const auto pair = reference_pair(name, 1);
    CHECK(kl_oracle(pair.p, pair.p, 1e-10) <= 1e-10);
    CHECK(kl_oracle(pair.q, pair.q, 1e-10) <= 1e-10);
    CHECK(kl_oracle(pair.p, pair.q, 1e-10) >= 0.0);
    if (name != "null")
      CHECK(kl_oracle(pair.p, pair.q, 1e-10) > 1e-4);
  }
  const auto wide = reference_pair("wide6", 1);
  CHECK(std::abs(wide.kl - 0.5 * 0.5 * 0.5) <= 1e-3);
  const auto mix = reference_pair("mixture", 1);
  CHECK(std::abs(kl_oracle(mix.p, mix.q) - kl_oracle(mix.q, mix.p)) > 1e-3);

  // Product densities add coordinate-wise.
  const auto wide2 = reference_pair("wide6", 2);
  CHECK(wide2.kl == doctest::Approx(wide.kl).epsilon(1e-5));
  const auto wide3 = reference_pair("shift", 3);
  CHECK(wide3.kl == doctest::Approx(reference_pair("shift", 1).kl).epsilon(1e-5));

  CHECK_THROWS_AS(kl_oracle(gauss(-3, 3, 0, 1), gauss(-2, 2, 0, 1)), std::invalid_argument);
  const auto r = kl_oracle_with_error(wide.p, wide.q, 1e-10);
  CHECK(r.error <= 1e-10);
}
