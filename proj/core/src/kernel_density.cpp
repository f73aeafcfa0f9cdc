#include "vmkl/kernel_density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vmkl {

namespace {

// int_{-1}^{1} u^p du
long double monomial_integral(int p)
{
  return (p % 2 == 1) ? 0.0L : 2.0L / static_cast<long double>(p + 1);
}

// Gaussian elimination with partial pivoting; the systems here are at most 5x5.
std::vector<long double> solve(std::vector<std::vector<long double>> a, std::vector<long double> b)
{
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
        pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c)
        a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<long double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c)
      s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

constexpr int kPrefixMaxDegree = 6;

double horner(const std::vector<double>& c, double u)
{
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;)
    v = v * u + c[i];
  return v;
}

} // namespace

double KernelSpec::univariate(double u) const
{
  if (u <= -1.0 || u >= 1.0)
    return 0.0;
  return horner(coeffs_, u);
}

double KernelSpec::operator()(std::span<const double> u) const
{
  if (u.size() != dim_)
    throw std::invalid_argument("kernel argument has wrong dimension");
  double v = 1.0;
  for (double ui : u) {
    v *= univariate(ui);
    if (v == 0.0)
      break;
  }
  return v;
}

double KernelSpec::univariate_moment(int power) const
{
  long double s = 0.0L;
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    s += static_cast<long double>(coeffs_[k]) * monomial_integral(power + static_cast<int>(k));
  return static_cast<double>(s);
}

KernelSpec make_kernel(int order, std::size_t dim)
{
  if (order < 1)
    throw std::invalid_argument("kernel order must be at least 1");
  if (order > kMaxKernelOrder)
    throw std::invalid_argument("kernel order " + std::to_string(order) + " exceeds the maximum of " +
                                std::to_string(kMaxKernelOrder));
  if (dim < 1)
    throw std::invalid_argument("kernel dimension must be at least 1");

  // k(u) = (1 - u^2) sum_i q_i u^(2i), i = 0..m. Odd moments vanish by symmetry,
  // so only the even moments 2, 4, ..., 2m <= order need explicit constraints.
  const std::size_t m = static_cast<std::size_t>(order / 2);
  std::vector<std::vector<long double>> a(m + 1, std::vector<long double>(m + 1));
  std::vector<long double> b(m + 1, 0.0L);
  b[0] = 1.0L;
  for (std::size_t j = 0; j <= m; ++j)
    for (std::size_t i = 0; i <= m; ++i) {
      const int p = static_cast<int>(2 * (i + j));
      a[j][i] = monomial_integral(p) - monomial_integral(p + 2);
    }
  const auto q = solve(std::move(a), std::move(b));

  KernelSpec spec;
  spec.order_ = order;
  spec.dim_ = dim;
  spec.coeffs_.assign(2 * m + 3, 0.0);
  for (std::size_t i = 0; i <= m; ++i) {
    spec.coeffs_[2 * i] += static_cast<double>(q[i]);
    spec.coeffs_[2 * i + 2] -= static_cast<double>(q[i]);
  }

  double sup = 0.0;
  constexpr int grid = 20000;
  for (int i = 0; i <= grid; ++i)
    sup = std::max(sup, std::abs(horner(spec.coeffs_, -1.0 + 2.0 * i / grid)));
  // Grid spacing 1e-4 against a polynomial with bounded derivative; the slack covers the gap.
  spec.univariate_sup_ = sup * (1.0 + 1e-6);
  spec.sup_bound_ = std::pow(spec.univariate_sup_, static_cast<double>(dim));
  return spec;
}

int kernel_order_for_smoothness(double beta)
{
  if (!(beta > 0.0))
    throw std::invalid_argument("smoothness must be positive");
  const int order = static_cast<int>(std::ceil(beta)) - 1;
  return std::clamp(order, 1, kMaxKernelOrder);
}

double bandwidth_rule(std::size_t n, double beta, std::size_t dim, double scale)
{
  if (n < 1)
    throw std::invalid_argument("bandwidth rule needs n >= 1");
  if (!(beta > 0.0) || dim < 1 || !(scale > 0.0))
    throw std::invalid_argument("bandwidth rule needs beta > 0, dim >= 1, scale > 0");
  return scale * std::pow(static_cast<double>(n), -1.0 / (2.0 * beta + static_cast<double>(dim)));
}

double default_floor(const DomainBox& domain)
{
  return 1e-3 / domain.volume();
}

KernelDensity kde_fit(PointSet samples, const KernelSpec& kernel, double bandwidth, const DomainBox& domain,
                      double floor)
{
  if (samples.empty())
    throw std::invalid_argument("kde_fit needs at least one sample");
  if (samples.dim() != kernel.dim() || domain.dim() != kernel.dim())
    throw std::invalid_argument("kde_fit dimension mismatch between samples, kernel and domain");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("bandwidth must be positive and finite");
  if (!(floor >= 0.0))
    throw std::invalid_argument("floor must be non-negative");
  if (!domain.contains_all(samples))
    throw std::out_of_range("kde_fit: sample outside the domain");
  return KernelDensity(std::move(samples), kernel, bandwidth, domain, floor);
}

KernelDensity::KernelDensity(PointSet samples, const KernelSpec& kernel, double bandwidth, const DomainBox& domain,
                             double floor)
  : samples_(std::move(samples))
  , kernel_(kernel)
  , bandwidth_(bandwidth)
  , domain_(domain)
  , floor_(floor)
{
  const std::size_t n = samples_.size();
  const std::size_t d = samples_.dim();
  norm_ = 1.0 / (static_cast<double>(n) * std::pow(bandwidth_, static_cast<double>(d)));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return samples_[a][0] < samples_[b][0]; });
  sorted_.reserve(n * d);
  sorted_first_.reserve(n);
  for (std::size_t i : perm) {
    const auto row = samples_[i];
    sorted_.insert(sorted_.end(), row.begin(), row.end());
    sorted_first_.push_back(row[0]);
  }

  if (d != 1)
    return;
  // Power sums lose digits to cancellation when samples sit many bandwidths from
  // the expansion centre; only take the fast path when that loss is harmless.
  const int degree = kernel_.degree();
  center_ = 0.5 * (sorted_first_.front() + sorted_first_.back());
  const double reach = 0.5 * (sorted_first_.back() - sorted_first_.front()) / bandwidth_ + 1.0;
  if (degree > kPrefixMaxDegree || std::pow(reach, degree) >= 1e8)
    return;
  prefix_.assign(static_cast<std::size_t>(degree) + 1, std::vector<long double>(n + 1, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    const long double y = static_cast<long double>(sorted_first_[i]) - center_;
    long double p = 1.0L;
    for (int j = 0; j <= degree; ++j) {
      prefix_[j][i + 1] = prefix_[j][i] + p;
      p *= y;
    }
  }
}

double KernelDensity::operator()(std::span<const double> x) const
{
  if (x.size() != domain_.dim())
    throw std::invalid_argument("evaluation point has wrong dimension");
  if (!domain_.contains(x))
    throw std::out_of_range("evaluation point outside the domain");
  return std::max(floor_, raw(x));
}

double KernelDensity::raw(std::span<const double> x) const
{
  if (x.size() != domain_.dim())
    throw std::invalid_argument("evaluation point has wrong dimension");
  if (!prefix_.empty())
    return raw_prefix(x[0]);
  return raw_window(x);
}

double KernelDensity::raw_direct(std::span<const double> x) const
{
  if (x.size() != domain_.dim())
    throw std::invalid_argument("evaluation point has wrong dimension");
  const std::size_t d = x.size();
  std::vector<double> u(d);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto row = samples_[i];
    for (std::size_t k = 0; k < d; ++k)
      u[k] = (row[k] - x[k]) / bandwidth_;
    sum += kernel_(u);
  }
  return sum * norm_;
}

double KernelDensity::raw_window(std::span<const double> x) const
{
  const std::size_t d = x.size();
  const auto lo = std::lower_bound(sorted_first_.begin(), sorted_first_.end(), x[0] - bandwidth_);
  const auto hi = std::upper_bound(lo, sorted_first_.end(), x[0] + bandwidth_);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - sorted_first_.begin());
    const double* row = sorted_.data() + i * d;
    double v = 1.0;
    for (std::size_t k = 0; k < d && v != 0.0; ++k)
      v *= kernel_.univariate((row[k] - x[k]) / bandwidth_);
    sum += v;
  }
  return sum * norm_;
}

double KernelDensity::raw_prefix(double x) const
{
  const auto lo = std::lower_bound(sorted_first_.begin(), sorted_first_.end(), x - bandwidth_);
  const auto hi = std::upper_bound(lo, sorted_first_.end(), x + bandwidth_);
  if (lo == hi)
    return 0.0;
  const std::size_t a = static_cast<std::size_t>(lo - sorted_first_.begin());
  const std::size_t b = static_cast<std::size_t>(hi - sorted_first_.begin());
  const int degree = kernel_.degree();

  // sum_i k((y_i - x) / h) with y_i - x = (y_i - c) - (x - c), expanded binomially.
  std::array<long double, kPrefixMaxDegree + 1> power_sum{};
  for (int j = 0; j <= degree; ++j)
    power_sum[j] = prefix_[j][b] - prefix_[j][a];
  std::array<long double, kPrefixMaxDegree + 1> shift_pow{};
  shift_pow[0] = 1.0L;
  for (int j = 1; j <= degree; ++j)
    shift_pow[j] = shift_pow[j - 1] * (center_ - static_cast<long double>(x));
  const long double inv_h = 1.0L / bandwidth_;
  const auto& c = kernel_.coefficients();
  long double total = 0.0L;
  long double h_pow = 1.0L;
  for (int k = 0; k <= degree; ++k, h_pow *= inv_h) {
    if (c[k] == 0.0)
      continue;
    long double inner = 0.0L;
    long double binom = 1.0L;
    for (int j = 0; j <= k; ++j) {
      inner += binom * power_sum[j] * shift_pow[k - j];
      binom = binom * (k - j) / (j + 1);
    }
    total += c[k] * h_pow * inner;
  }
  return static_cast<double>(total) * norm_;
}

} // namespace vmkl
