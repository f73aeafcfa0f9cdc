#pragma once

#include "vmkl/point_set.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vmkl::quad {

struct Result
{
  double value = 0.0;
  double error = 0.0;
};

struct GaussRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b]. Exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Adaptive Gauss-Kronrod on [a, b] with absolute error estimate <= abs_tol.
/// Throws ConvergenceError when the tolerance cannot be met.
Result adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol);

/// Tensor-product Romberg extrapolation of the trapezoid rule over a box,
/// refining up to `max_points_per_axis` (a power of two plus one).
/// Throws ConvergenceError when the estimated error stays above abs_tol.
Result romberg(const std::function<double(std::span<const double>)>& f, const DomainBox& box,
               double abs_tol, std::size_t max_points_per_axis = 257);

/// Composite Simpson over a tensor grid with `points_per_axis` (odd) nodes per axis.
/// `error` holds |S(points) - S(points/2)|, the resolution residual.
Result simpson_grid(const std::function<double(std::span<const double>)>& f, const DomainBox& box,
                    std::size_t points_per_axis);

/// Simpson quadrature of values already tabulated on an equispaced tensor grid.
double simpson_tabulated(std::span<const double> values, std::size_t dim, std::size_t points_per_axis,
                         const DomainBox& box, std::size_t stride = 1);

} // namespace vmkl::quad
