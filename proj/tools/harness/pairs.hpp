#pragma once

#include "vmkl/analytic_density.hpp"

#include <string>
#include <vector>

namespace vmkl::harness {

/// Known pair of densities with its quadrature KL(p || q).
struct ReferencePair
{
  std::string name;
  AnalyticDensity p;
  AnalyticDensity q;
  double kl = 0.0;
};

/// Names accepted by `reference_pair`.
std::vector<std::string> reference_pair_names();

/// Reference pairs in `dim` dimensions (products of truncated normals; only the
/// first coordinate differs between p and q).
///   null       p = q = N(0, 1) on [-2, 2]
///   alt        N(0, 1) vs N(mu, 1) on [-2, 2] with mu chosen so that KL = 0.5
///   separated  as alt with KL = 4
///   shift      N(0, 1) vs N(0.5, 1) on [-3, 3]
///   rate       N(0, 0.5^2) vs N(0, 1) on [-1.5, 1.5]
///   wide6      N(0, 1) vs N(0.5, 1) on [-6, 6]
///   mixture    0.5 N(-1, 0.5^2) + 0.5 N(1, 0.5^2) vs N(0, 1) on [-3, 3]
ReferencePair reference_pair(const std::string& name, std::size_t dim = 1);

/// Mean shift mu of N(mu, sd^2) against N(0, sd^2), both truncated to [lo, hi], with KL = target.
double solve_shift_for_kl(double lo, double hi, double sd, double target);

} // namespace vmkl::harness
