#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vmkl {

/// Row-major set of d-dimensional points.
class PointSet
{
public:
  PointSet() = default;
  explicit PointSet(std::size_t dim);
  PointSet(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> point);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void append(const PointSet& other);

  /// Rows [first, first + count).
  PointSet slice(std::size_t first, std::size_t count) const;

  const std::vector<double>& coords() const { return coords_; }

private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Axis-aligned compact box, the support of every density in this library.
class DomainBox
{
public:
  DomainBox() = default;
  DomainBox(std::vector<double> lower, std::vector<double> upper);

  /// [lo, hi]^dim.
  static DomainBox cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  double width(std::size_t i) const { return upper_[i] - lower_[i]; }
  double volume() const { return volume_; }
  std::vector<double> midpoint() const;

  bool contains(std::span<const double> x) const;
  bool contains_all(const PointSet& points) const;

  bool operator==(const DomainBox&) const = default;

private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double volume_ = 0.0;
};

} // namespace vmkl
