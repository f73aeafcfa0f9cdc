#pragma once

#include "vmkl/analytic_density.hpp"
#include "vmkl/kernel_density.hpp"
#include "vmkl/quadrature.hpp"

#include <cstddef>
#include <string>

namespace vmkl {

enum class Estimator
{
  vonMises,
  plugIn,
  oracle
};

std::string to_string(Estimator e);

struct KlEstimate
{
  double value = 0.0;
  Estimator estimator = Estimator::vonMises;
  /// Total sample counts before any split.
  std::size_t n = 0;
  std::size_t m = 0;
  double h_p = 0.0;
  double h_q = 0.0;
  double floor = 0.0;
  /// Evaluations that hit the floor, out of `evaluations`.
  std::size_t clamped = 0;
  std::size_t evaluations = 0;
  /// Every evaluation was clamped; the value carries no information.
  bool degenerate = false;
  /// Quadrature resolution residual (plug-in and oracle only).
  double residual = 0.0;
};

struct EstimatorOptions
{
  double beta = 2.0;
  /// Multiplier on the rate-optimal bandwidth.
  double bandwidth_scale = 1.0;
  /// Clamping floor; negative selects `default_floor(domain)`.
  double floor = -1.0;
  /// Plug-in Simpson grid nodes per axis (4k+1); zero picks a size from the dimension.
  std::size_t plugin_grid = 0;
  /// Plug-in fails with ConvergenceError when the grid residual exceeds this.
  double plugin_tolerance = 1e-4;
};

/// Data-split Von Mises estimate of KL(p || q).
///
/// The first ceil(n/2) p-samples fit p-hat and the first ceil(m/2) q-samples fit
/// q-hat, with bandwidths from `bandwidth_rule` at the total counts n and m. The
/// estimate is mean log(p-hat/q-hat) over the remaining p-samples plus
/// 1 - mean(p-hat/q-hat) over the remaining q-samples, with floor-clamped
/// evaluations. The signed value is returned untruncated.
KlEstimate vm_estimate(const PointSet& samples_p, const PointSet& samples_q, const KernelSpec& kernel,
                       const DomainBox& domain, const EstimatorOptions& options);

/// Von Mises estimate from already fitted densities, averaging over the given
/// evaluation sets. Passing the same fit twice yields exactly zero.
KlEstimate vm_estimate(const KernelDensity& p_hat, const KernelDensity& q_hat, const PointSet& eval_p,
                       const PointSet& eval_q);

/// Plug-in estimate: integral of p-hat log(p-hat/q-hat) over the domain on a
/// Simpson grid, with both fits using every sample.
KlEstimate plugin_estimate(const PointSet& samples_p, const PointSet& samples_q, const KernelSpec& kernel,
                           const DomainBox& domain, const EstimatorOptions& options);

/// Plug-in integral for given fits.
KlEstimate plugin_estimate(const KernelDensity& p_hat, const KernelDensity& q_hat, const EstimatorOptions& options);

/// KL(p || q) by adaptive Gauss-Kronrod (d = 1) or tensor Romberg (d <= 3),
/// with estimated absolute error <= tol. Throws ConvergenceError otherwise.
quad::Result kl_oracle_with_error(const AnalyticDensity& p, const AnalyticDensity& q, double tol = 1e-8);

/// Non-negative KL(p || q); quadrature noise below zero is reported as zero.
double kl_oracle(const AnalyticDensity& p, const AnalyticDensity& q, double tol = 1e-8);

} // namespace vmkl
