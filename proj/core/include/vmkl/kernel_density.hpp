#pragma once

#include "vmkl/point_set.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace vmkl {

/// Highest kernel order `make_kernel` will construct.
inline constexpr int kMaxKernelOrder = 8;

/// Product kernel K_d(u) = prod_i k(u_i) with a univariate polynomial k on [-1, 1].
///
/// `order` follows the vanishing-moment convention: a kernel of order l has
/// integral one and zero moments for every multi-index 1 <= |s| <= l. The
/// univariate factor is (1 - u^2) * Q(u^2) with the minimal-degree Q meeting
/// those moment conditions, so order 1 is the Epanechnikov kernel and orders 2
/// and 3 share the classical fourth-order Epanechnikov extension.
class KernelSpec
{
public:
  int order() const { return order_; }
  std::size_t dim() const { return dim_; }

  /// Coefficients of k in increasing powers of u.
  const std::vector<double>& coefficients() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  /// Univariate factor k(u); zero outside [-1, 1].
  double univariate(double u) const;
  double operator()(std::span<const double> u) const;

  /// Recorded bound kappa >= sup |K_d|.
  double sup_bound() const { return sup_bound_; }
  /// sup |k| of the univariate factor.
  double univariate_sup() const { return univariate_sup_; }

  /// Closed-form moment int u^p k(u) du.
  double univariate_moment(int power) const;

private:
  friend KernelSpec make_kernel(int order, std::size_t dim);
  int order_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coeffs_;
  double univariate_sup_ = 0.0;
  double sup_bound_ = 0.0;
};

/// Throws std::invalid_argument for order < 1, order > kMaxKernelOrder or dim < 1.
KernelSpec make_kernel(int order, std::size_t dim);

/// Smallest vanishing-moment order attaining the O(h^beta) bias bound on a
/// beta-Hoelder class: the largest integer strictly below beta, at least one.
int kernel_order_for_smoothness(double beta);

/// h = scale * n^(-1 / (2 beta + dim)).
double bandwidth_rule(std::size_t n, double beta, std::size_t dim, double scale = 1.0);

/// Default evaluation floor: 1e-3 of the uniform density on the box.
double default_floor(const DomainBox& domain);

/// Fitted kernel density estimate, immutable after construction.
///
/// Evaluation is thread-safe. In one dimension with low-degree kernels the sum
/// over samples is evaluated from prefix sums of sample powers, which costs
/// O(log n) per query. Otherwise it scans the samples whose first coordinate
/// lies within one bandwidth of the query.
class KernelDensity
{
public:
  const PointSet& samples() const { return samples_; }
  double bandwidth() const { return bandwidth_; }
  const KernelSpec& kernel() const { return kernel_; }
  const DomainBox& domain() const { return domain_; }
  double floor() const { return floor_; }
  std::size_t size() const { return samples_.size(); }

  /// max(floor, raw(x)); throws std::out_of_range outside the domain.
  double operator()(std::span<const double> x) const;
  double evaluate(std::span<const double> x) const { return (*this)(x); }

  /// Unclamped estimate (1/n) sum_i h^-d K_d((x_i - x) / h); may be negative.
  double raw(std::span<const double> x) const;

  /// Direct O(n) summation, independent of the accelerated path.
  double raw_direct(std::span<const double> x) const;

  bool uses_prefix_sums() const { return !prefix_.empty(); }

private:
  friend KernelDensity kde_fit(PointSet samples, const KernelSpec& kernel, double bandwidth,
                               const DomainBox& domain, double floor);
  KernelDensity(PointSet samples, const KernelSpec& kernel, double bandwidth, const DomainBox& domain,
                double floor);

  double raw_prefix(double x) const;
  double raw_window(std::span<const double> x) const;

  PointSet samples_;
  KernelSpec kernel_;
  double bandwidth_ = 0.0;
  DomainBox domain_;
  double floor_ = 0.0;
  double norm_ = 0.0;

  // Samples sorted by first coordinate (row-major copy).
  std::vector<double> sorted_;
  std::vector<double> sorted_first_;
  double center_ = 0.0;
  // prefix_[j][i] = sum_{r < i} (y_r - center)^j, for the 1-d fast path.
  std::vector<std::vector<long double>> prefix_;
};

/// Validates inputs (non-empty, inside the domain, h > 0, floor >= 0, matching dimensions).
KernelDensity kde_fit(PointSet samples, const KernelSpec& kernel, double bandwidth, const DomainBox& domain,
                      double floor);

inline double kde_eval(const KernelDensity& estimate, std::span<const double> x)
{
  return estimate(x);
}

} // namespace vmkl
