#include <doctest.h>

#include "vmkl/analytic_density.hpp"
#include "vmkl/kernel_density.hpp"
#include "vmkl/quadrature.hpp"
#include "vmkl/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace vmkl;

namespace {

// Moment of the product kernel for a multi-index, by quadrature on [-1, 1]^d.
double product_moment(const KernelSpec& k, const std::vector<int>& powers)
{
  const DomainBox box = DomainBox::cube(k.dim(), -1.0, 1.0);
  auto f = [&](std::span<const double> u) {
    double v = k(u);
    for (std::size_t i = 0; i < u.size(); ++i)
      v *= std::pow(u[i], powers[i]);
    return v;
  };
  return quad::romberg(f, box, 1e-9, 257).value;
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

TEST_CASE("order one is the Epanechnikov kernel")
{
  const KernelSpec k = make_kernel(1, 1);
  CHECK(k.univariate(0.0) == doctest::Approx(0.75));
  CHECK(k.univariate(0.5) == doctest::Approx(0.75 * 0.75));
  CHECK(k.univariate(1.0) == doctest::Approx(0.0));
  CHECK(k.univariate(1.2) == 0.0);
  CHECK(k.univariate(-3.0) == 0.0);
}

TEST_CASE("order two kernel: unit mass, vanishing first moment, closed-form coefficients")
{
  const KernelSpec k = make_kernel(2, 1);
  auto mass = quad::adaptive([&](double u) { return k.univariate(u); }, -1.0, 1.0, 1e-12);
  auto first = quad::adaptive([&](double u) { return u * k.univariate(u); }, -1.0, 1.0, 1e-12);
  CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(first.value) < 1e-10);
  // (1 - u^2)(a + b u^2) with zero second moment: a = 45/32, b = -105/32.
  CHECK(k.univariate(0.0) == doctest::Approx(45.0 / 32.0));
  CHECK(k.univariate(0.5) == doctest::Approx(0.75 * (45.0 - 105.0 * 0.25) / 32.0));
  CHECK(make_kernel(3, 1).univariate(0.3) == doctest::Approx(k.univariate(0.3)));
}

TEST_CASE("order four kernel has vanishing second moment by adaptive quadrature")
{
  const KernelSpec k = make_kernel(4, 1);
  for (int p = 1; p <= 4; ++p) {
    auto r = quad::adaptive([&](double u) { return std::pow(u, p) * k.univariate(u); }, -1.0, 1.0, 1e-12);
    CHECK(std::abs(r.value) < 1e-8);
  }
  auto sixth = quad::adaptive([&](double u) { return std::pow(u, 6) * k.univariate(u); }, -1.0, 1.0, 1e-12);
  CHECK(std::abs(sixth.value) > 1e-4);
}

TEST_CASE("every constructible kernel satisfies its moment identities")
{
  for (int order = 1; order <= kMaxKernelOrder; ++order) {
    const KernelSpec k1 = make_kernel(order, 1);
    for (int p = 0; p <= order; ++p) {
      auto r = quad::adaptive([&](double u) { return std::pow(u, p) * k1.univariate(u); }, -1.0, 1.0, 1e-12);
      CHECK(std::abs(r.value - (p == 0 ? 1.0 : 0.0)) < 1e-6);
      CHECK(std::abs(k1.univariate_moment(p) - r.value) < 1e-9);
    }
  }
  for (int order : {1, 2, 4}) {
    for (std::size_t dim : {2u, 3u}) {
      const KernelSpec k = make_kernel(order, dim);
      std::vector<int> s(dim, 0);
      CHECK(product_moment(k, s) == doctest::Approx(1.0).epsilon(1e-6));
      // All multi-indices with 1 <= |s| <= order.
      std::vector<int> idx(dim, 0);
      for (;;) {
        std::size_t pos = 0;
        while (pos < dim && ++idx[pos] > order)
          idx[pos++] = 0;
        if (pos == dim)
          break;
        int total = 0;
        for (int v : idx)
          total += v;
        if (total >= 1 && total <= order)
          CHECK(std::abs(product_moment(k, idx)) < 1e-6);
      }
    }
  }
}

TEST_CASE("kernel bounds and construction errors")
{
  Rng rng(5);
  for (int order = 1; order <= kMaxKernelOrder; ++order) {
    const KernelSpec k = make_kernel(order, 2);
    double seen = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double u[2] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      seen = std::max(seen, std::abs(k(u)));
    }
    CHECK(seen <= k.sup_bound() * (1.0 + 1e-12));
    CHECK(std::isfinite(k.sup_bound()));
  }
  CHECK_THROWS_AS(make_kernel(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(kMaxKernelOrder + 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(2, 0), std::invalid_argument);
}

TEST_CASE("default kernel order for a smoothness level")
{
  CHECK(kernel_order_for_smoothness(0.5) == 1);
  CHECK(kernel_order_for_smoothness(1.0) == 1);
  CHECK(kernel_order_for_smoothness(2.0) == 1);
  CHECK(kernel_order_for_smoothness(2.5) == 2);
  CHECK(kernel_order_for_smoothness(4.0) == 3);
  CHECK(kernel_order_for_smoothness(4.2) == 4);
}

TEST_CASE("bandwidth rule")
{
  CHECK(bandwidth_rule(1, 1.0, 1, 1.0) == doctest::Approx(1.0));
  CHECK(bandwidth_rule(4096, 1.0, 1, 1.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  CHECK(bandwidth_rule(4096, 1.0, 1, 3.0) == doctest::Approx(3.0 / 16.0).epsilon(1e-14));
  double prev = bandwidth_rule(2, 2.0, 2, 1.5);
  for (std::size_t n = 3; n < 5000; n += 7) {
    const double h = bandwidth_rule(n, 2.0, 2, 1.5);
    CHECK(h < prev);
    prev = h;
  }
  CHECK_THROWS_AS(bandwidth_rule(0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(bandwidth_rule(10, 0.0, 1), std::invalid_argument);
}

TEST_CASE("kde_fit validates its inputs")
{
  const DomainBox box = DomainBox::cube(1, 0.0, 1.0);
  const KernelSpec k = make_kernel(1, 1);
  CHECK_THROWS_AS(kde_fit(PointSet(1), k, 0.1, box, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kde_fit(PointSet(1, {0.5, 1.5}), k, 0.1, box, 0.0), std::out_of_range);
  CHECK_THROWS_AS(kde_fit(PointSet(1, {0.5}), k, 0.0, box, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kde_fit(PointSet(1, {0.5}), k, 0.1, box, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(kde_fit(PointSet(1, {0.5}), make_kernel(1, 2), 0.1, box, 0.0), std::invalid_argument);
  const auto est = kde_fit(PointSet(1, {0.5}), k, 0.1, box, 0.0);
  const double outside[1] = {1.1};
  CHECK_THROWS_AS(kde_eval(est, outside), std::out_of_range);
}

TEST_CASE("single sample evaluated at itself")
{
  const DomainBox box = DomainBox::cube(2, -1.0, 1.0);
  const KernelSpec k = make_kernel(2, 2);
  const double h = 0.3;
  const PointSet one(2, {0.1, -0.2});
  const auto est = kde_fit(one, k, h, box, 1e-3);
  const double zero[2] = {0.0, 0.0};
  CHECK(kde_eval(est, one[0]) == doctest::Approx(std::max(1e-3, k(zero) / (h * h))));
  const auto high_floor = kde_fit(one, k, h, box, 50.0);
  CHECK(kde_eval(high_floor, one[0]) == 50.0);
}

TEST_CASE("uniform samples give density one at the centre")
{
  const DomainBox box = DomainBox::cube(1, 0.0, 1.0);
  const KernelSpec k = make_kernel(2, 1);
  const std::size_t n = 10000;
  const double h = bandwidth_rule(n, 2.0, 1);
  double sum = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    Rng rng = Rng::stream(2024, rep, "uniform");
    PointSet xs(1);
    xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x[1] = {rng.uniform()};
      xs.push_back(x);
    }
    const double centre[1] = {0.5};
    sum += kde_eval(kde_fit(std::move(xs), k, h, box, default_floor(box)), centre);
  }
  CHECK(std::abs(sum / 50.0 - 1.0) <= 0.05);
}

TEST_CASE("far from every sample the estimate sits at the floor")
{
  const DomainBox box = DomainBox::cube(1, -10.0, 10.0);
  const KernelSpec k = make_kernel(4, 1);
  Rng rng(9);
  PointSet xs(1);
  for (int i = 0; i < 500; ++i) {
    const double x[1] = {rng.uniform(-1.0, 1.0)};
    xs.push_back(x);
  }
  const double rho = 0.0137;
  const auto est = kde_fit(xs, k, 0.5, box, rho);
  for (double x : {-9.9, -5.0, 4.0, 9.99}) {
    const double q[1] = {x};
    CHECK(kde_eval(est, q) == rho);
    CHECK(est.raw(q) == 0.0);
  }
}

TEST_CASE("two symmetric samples evaluated at the midpoint")
{
  const DomainBox box = DomainBox::cube(1, -1.0, 1.0);
  for (int order : {1, 2, 4}) {
    const KernelSpec k = make_kernel(order, 1);
    const double a = 0.17;
    const double h = 0.4;
    const auto est = kde_fit(PointSet(1, {-a, a}), k, h, box, 0.0);
    const double zero[1] = {0.0};
    const double u[1] = {a / h};
    CHECK(est.raw(zero) == doctest::Approx(k(u) / h).epsilon(1e-12));
    CHECK(kde_eval(est, zero) == doctest::Approx(std::max(0.0, k(u) / h)).epsilon(1e-12));
  }
}

TEST_CASE("higher-order kernels go negative but evaluation clamps at the floor")
{
  const DomainBox box = DomainBox::cube(1, 0.0, 1.0);
  const KernelSpec k = make_kernel(4, 1);
  Rng rng(1);
  PointSet xs(1);
  for (int i = 0; i < 300; ++i) {
    const double x[1] = {0.5 + 0.02 * rng.normal()};
    xs.push_back(x);
  }
  const double rho = 0.05;
  const auto est = kde_fit(xs, k, 0.3, box, rho);
  bool saw_negative = false;
  for (int i = 0; i <= 1000; ++i) {
    const double x[1] = {i / 1000.0};
    saw_negative = saw_negative || est.raw(x) < 0.0;
    REQUIRE(kde_eval(est, x) >= rho);
  }
  CHECK(saw_negative);
}

TEST_CASE("prefix-sum and windowed evaluation agree with the direct sum")
{
  const DomainBox box = DomainBox::cube(1, -3.0, 3.0);
  const auto p = AnalyticDensity::truncated_gaussian(box, {0.0}, {1.0});
  for (int order : {1, 2, 4, 6, 8}) {
    Rng rng(100 + order);
    const KernelSpec k = make_kernel(order, 1);
    for (double h : {0.05, 0.4, 2.0}) {
      const auto est = kde_fit(p.sample(rng, 2000), k, h, box, 1e-3);
      for (int i = 0; i <= 200; ++i) {
        const double x[1] = {-3.0 + 6.0 * i / 200.0};
        const double direct = est.raw_direct(x);
        REQUIRE(est.raw(x) == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
      }
    }
  }
  const DomainBox box2 = DomainBox::cube(2, -3.0, 3.0);
  const auto p2 = AnalyticDensity::truncated_gaussian(box2, {0.0, 0.0}, {1.0, 1.0});
  Rng rng(77);
  const auto est2 = kde_fit(p2.sample(rng, 1500), make_kernel(2, 2), 0.5, box2, 1e-3);
  for (int i = 0; i < 200; ++i) {
    const double x[2] = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    REQUIRE(est2.raw(x) == doctest::Approx(est2.raw_direct(x)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("evaluation is deterministic and continuous in x")
{
  const DomainBox box = DomainBox::cube(1, -3.0, 3.0);
  const auto p = AnalyticDensity::truncated_gaussian(box, {0.0}, {1.0});
  Rng rng(4);
  const auto est = kde_fit(p.sample(rng, 4000), make_kernel(2, 1), 0.3, box, 1e-3);
  double worst_small = 0.0;
  double worst_tiny = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double x0 = -2.9 + 5.8 * i / 500.0;
    const double x[1] = {x0};
    const double xs[1] = {x0 + 1e-4};
    const double xt[1] = {x0 + 1e-7};
    const double v = kde_eval(est, x);
    REQUIRE(v == kde_eval(est, x));
    worst_small = std::max(worst_small, std::abs(v - kde_eval(est, xs)));
    worst_tiny = std::max(worst_tiny, std::abs(v - kde_eval(est, xt)));
  }
  CHECK(worst_tiny < worst_small);
  CHECK(worst_tiny < 1e-5);
}

TEST_CASE("sup-norm error shrinks with n on a smooth truncated Gaussian")
{
  const DomainBox box = DomainBox::cube(1, -3.0, 3.0);
  const auto p = AnalyticDensity::truncated_gaussian(box, {0.0}, {1.0});
  const KernelSpec k = make_kernel(kernel_order_for_smoothness(2.0), 1);
  std::vector<double> medians;
  for (std::size_t n : {512u, 2048u, 8192u}) {
    std::vector<double> errs;
    for (int rep = 0; rep < 21; ++rep) {
      Rng rng = Rng::stream(31, n * 100 + rep, "supnorm");
      const auto est = kde_fit(p.sample(rng, n), k, bandwidth_rule(n, 2.0, 1), box, 0.0);
      double worst = 0.0;
      for (int i = 0; i <= 400; ++i) {
        // Interior grid: the estimator carries no boundary correction.
        const double x[1] = {-2.0 + 4.0 * i / 400.0};
        worst = std::max(worst, std::abs(kde_eval(est, x) - p.pdf(x)));
      }
      errs.push_back(worst);
    }
    medians.push_back(median(errs));
  }
  CHECK(medians[1] <= medians[0]);
  CHECK(medians[2] <= medians[1]);
}
