#include "vmkl/quadrature.hpp"

#include "vmkl/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vmkl::quad {

GaussRule gauss_legendre(std::size_t n, double a, double b)
{
  if (n == 0)
    throw std::invalid_argument("gauss_legendre needs at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

Result adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol)
{
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (!(abs_tol > 0.0))
    throw std::invalid_argument("quadrature tolerance must be positive");
  double error = 0.0;
  double l1 = 0.0;
  double value = GK::integrate(f, a, b, 5, 1e-6, &error, &l1);
  // Boost's stopping rule is relative to the L1 norm; convert to an absolute target.
  double rel = abs_tol / std::max(l1, std::numeric_limits<double>::min());
  for (int attempt = 0; attempt < 4; ++attempt) {
    value = GK::integrate(f, a, b, 20, std::max(rel, 1e-15), &error, &l1);
    if (error <= abs_tol)
      return {value, error};
    rel *= 0.1;
  }
  throw ConvergenceError("adaptive quadrature did not reach tolerance", error);
}

namespace {

std::size_t grid_size(std::size_t dim, std::size_t points)
{
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i)
    total *= points;
  return total;
}

// Sum of w(index) * f(node) over an equispaced tensor grid.
template <class Weight>
double tensor_sum(const std::function<double(std::span<const double>)>& f, const DomainBox& box,
                  std::size_t points, Weight weight)
{
  const std::size_t dim = box.dim();
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim);
  std::vector<double> step(dim);
  for (std::size_t i = 0; i < dim; ++i)
    step[i] = box.width(i) / static_cast<double>(points - 1);
  const std::size_t total = grid_size(dim, points);
  double sum = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double w = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = idx[i] + 1 == points ? box.upper(i) : box.lower(i) + step[i] * static_cast<double>(idx[i]);
      w *= weight(idx[i], points) * step[i];
    }
    sum += w * f(x);
    for (std::size_t i = 0; i < dim; ++i) {
      if (++idx[i] < points)
        break;
      idx[i] = 0;
    }
  }
  return sum;
}

double trapezoid_weight(std::size_t i, std::size_t n)
{
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

double simpson_weight(std::size_t i, std::size_t n)
{
  if (i == 0 || i + 1 == n)
    return 1.0 / 3.0;
  return (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
}

} // namespace

Result romberg(const std::function<double(std::span<const double>)>& f, const DomainBox& box, double abs_tol,
               std::size_t max_points_per_axis)
{
  if (!(abs_tol > 0.0))
    throw std::invalid_argument("quadrature tolerance must be positive");
  std::vector<std::vector<double>> table;
  double error = std::numeric_limits<double>::infinity();
  for (std::size_t points = 3; points <= max_points_per_axis; points = 2 * points - 1) {
    std::vector<double> row{tensor_sum(f, box, points, trapezoid_weight)};
    if (!table.empty()) {
      const auto& prev = table.back();
      double factor = 4.0;
      for (std::size_t k = 1; k <= prev.size(); ++k) {
        row.push_back(row[k - 1] + (row[k - 1] - prev[k - 1]) / (factor - 1.0));
        factor *= 4.0;
      }
      error = std::abs(row.back() - prev.back());
      if (table.size() >= 2 && error <= abs_tol)
        return {row.back(), error};
    }
    table.push_back(std::move(row));
  }
  throw ConvergenceError("tensor Romberg quadrature did not reach tolerance", error);
}

double simpson_tabulated(std::span<const double> values, std::size_t dim, std::size_t points_per_axis,
                         const DomainBox& box, std::size_t stride)
{
  if ((points_per_axis - 1) % (2 * stride) != 0)
    throw std::invalid_argument("Simpson grid needs an even number of intervals at the given stride");
  const std::size_t coarse = (points_per_axis - 1) / stride + 1;
  std::vector<std::size_t> idx(dim, 0);
  const std::size_t total = grid_size(dim, coarse);
  double sum = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double w = 1.0;
    std::size_t offset = 0;
    std::size_t mult = 1;
    for (std::size_t i = 0; i < dim; ++i) {
      w *= simpson_weight(idx[i], coarse) * box.width(i) / static_cast<double>(coarse - 1);
      offset += idx[i] * stride * mult;
      mult *= points_per_axis;
    }
    sum += w * values[offset];
    for (std::size_t i = 0; i < dim; ++i) {
      if (++idx[i] < coarse)
        break;
      idx[i] = 0;
    }
  }
  return sum;
}

Result simpson_grid(const std::function<double(std::span<const double>)>& f, const DomainBox& box,
                    std::size_t points_per_axis)
{
  if (points_per_axis < 5 || (points_per_axis - 1) % 4 != 0)
    throw std::invalid_argument("Simpson grid size must be 4k+1 with k >= 1");
  const std::size_t dim = box.dim();
  const std::size_t total = grid_size(dim, points_per_axis);
  std::vector<double> values(total);
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t i = 0; i < dim; ++i)
      x[i] = idx[i] + 1 == points_per_axis
               ? box.upper(i)
               : box.lower(i) + box.width(i) * static_cast<double>(idx[i]) / static_cast<double>(points_per_axis - 1);
    values[flat] = f(x);
    for (std::size_t i = 0; i < dim; ++i) {
      if (++idx[i] < points_per_axis)
        break;
      idx[i] = 0;
    }
  }
  const double fine = simpson_tabulated(values, dim, points_per_axis, box, 1);
  const double coarse = simpson_tabulated(values, dim, points_per_axis, box, 2);
  return {fine, std::abs(fine - coarse)};
}

} // namespace vmkl::quad
