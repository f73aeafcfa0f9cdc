#include "vmkl/point_set.hpp"

#include <stdexcept>

namespace vmkl {

PointSet::PointSet(std::size_t dim)
  : dim_(dim)
{
  if (dim == 0)
    throw std::invalid_argument("PointSet dimension must be positive");
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
  : dim_(dim)
  , coords_(std::move(coords))
{
  if (dim == 0)
    throw std::invalid_argument("PointSet dimension must be positive");
  if (coords_.size() % dim != 0)
    throw std::invalid_argument("PointSet coordinate count is not a multiple of the dimension");
}

void PointSet::push_back(std::span<const double> point)
{
  if (point.size() != dim_)
    throw std::invalid_argument("point dimension mismatch");
  coords_.insert(coords_.end(), point.begin(), point.end());
}

void PointSet::append(const PointSet& other)
{
  if (other.empty())
    return;
  if (other.dim_ != dim_)
    throw std::invalid_argument("point dimension mismatch");
  coords_.insert(coords_.end(), other.coords_.begin(), other.coords_.end());
}

PointSet PointSet::slice(std::size_t first, std::size_t count) const
{
  if (first + count > size())
    throw std::out_of_range("PointSet slice out of range");
  const auto begin = coords_.begin() + static_cast<std::ptrdiff_t>(first * dim_);
  return PointSet(dim_, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * dim_)));
}

DomainBox::DomainBox(std::vector<double> lower, std::vector<double> upper)
  : lower_(std::move(lower))
  , upper_(std::move(upper))
{
  if (lower_.empty() || lower_.size() != upper_.size())
    throw std::invalid_argument("DomainBox bounds must be non-empty and of equal length");
  volume_ = 1.0;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i]))
      throw std::invalid_argument("DomainBox requires lower < upper in every coordinate");
    volume_ *= upper_[i] - lower_[i];
  }
}

DomainBox DomainBox::cube(std::size_t dim, double lo, double hi)
{
  return DomainBox(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

std::vector<double> DomainBox::midpoint() const
{
  std::vector<double> mid(dim());
  for (std::size_t i = 0; i < dim(); ++i)
    mid[i] = 0.5 * (lower_[i] + upper_[i]);
  return mid;
}

bool DomainBox::contains(std::span<const double> x) const
{
  if (x.size() != dim())
    return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i]))
      return false;
  return true;
}

bool DomainBox::contains_all(const PointSet& points) const
{
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!contains(points[i]))
      return false;
  return true;
}

} // namespace vmkl
