#pragma once

#include <stdexcept>
#include <string>

namespace vmkl {

/// Numerical routine did not reach its tolerance; `residual` is the last error estimate.
class ConvergenceError : public std::runtime_error
{
public:
  ConvergenceError(const std::string& what, double residual)
    : std::runtime_error(what + " (residual " + std::to_string(residual) + ")")
    , residual_(residual)
  {
  }
  double residual() const { return residual_; }

private:
  double residual_;
};

/// A synthetic model whose certified dependence is too weak to be usable.
class SeparationError : public std::runtime_error
{
public:
  SeparationError(const std::string& what, double epsilon_star)
    : std::runtime_error(what)
    , epsilon_star_(epsilon_star)
  {
  }
  double epsilon_star() const { return epsilon_star_; }

private:
  double epsilon_star_;
};

} // namespace vmkl
