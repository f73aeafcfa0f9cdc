#include "pairs.hpp"

#include "vmkl/divergence.hpp"

#include <stdexcept>

namespace vmkl::harness {

namespace {

AnalyticDensity gaussian(std::size_t dim, double lo, double hi, double mu0, double sd0)
{
  std::vector<double> mean(dim, 0.0);
  std::vector<double> sd(dim, 1.0);
  mean[0] = mu0;
  sd[0] = sd0;
  return AnalyticDensity::truncated_gaussian(DomainBox::cube(dim, lo, hi), mean, sd);
}

ReferencePair finish(std::string name, AnalyticDensity p, AnalyticDensity q)
{
  const double kl = kl_oracle(p, q, p.dim() == 1 ? 1e-10 : 1e-7);
  return {std::move(name), std::move(p), std::move(q), kl};
}

} // namespace

std::vector<std::string> reference_pair_names()
{
  return {"null", "alt", "separated", "shift", "rate", "wide6", "mixture"};
}

double solve_shift_for_kl(double lo, double hi, double sd, double target)
{
  const DomainBox box = DomainBox::cube(1, lo, hi);
  const auto p = AnalyticDensity::truncated_gaussian(box, {0.0}, {sd});
  auto kl_at = [&](double mu) { return kl_oracle(p, AnalyticDensity::truncated_gaussian(box, {mu}, {sd}), 1e-12); };
  double a = 0.0;
  double b = sd;
  while (kl_at(b) < target) {
    b *= 2.0;
    if (b > 1e3 * sd)
      throw std::runtime_error("KL target out of reach for the shifted pair");
  }
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    (kl_at(mid) < target ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

ReferencePair reference_pair(const std::string& name, std::size_t dim)
{
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("reference pairs exist for dimensions 1 to 3");
  if (name == "null")
    return finish(name, gaussian(dim, -2, 2, 0, 1), gaussian(dim, -2, 2, 0, 1));
  if (name == "alt") {
    static const double mu = solve_shift_for_kl(-2, 2, 1, 0.5);
    return finish(name, gaussian(dim, -2, 2, 0, 1), gaussian(dim, -2, 2, mu, 1));
  }
  if (name == "separated") {
    static const double mu = solve_shift_for_kl(-2, 2, 1, 4.0);
    return finish(name, gaussian(dim, -2, 2, 0, 1), gaussian(dim, -2, 2, mu, 1));
  }
  if (name == "shift")
    return finish(name, gaussian(dim, -3, 3, 0, 1), gaussian(dim, -3, 3, 0.5, 1));
  if (name == "rate")
    return finish(name, gaussian(dim, -1.5, 1.5, 0, 0.5), gaussian(dim, -1.5, 1.5, 0, 1));
  if (name == "wide6")
    return finish(name, gaussian(dim, -6, 6, 0, 1), gaussian(dim, -6, 6, 0.5, 1));
  if (name == "mixture") {
    auto p = AnalyticDensity::mixture({0.5, 0.5}, {gaussian(dim, -3, 3, -1, 0.5), gaussian(dim, -3, 3, 1, 0.5)});
    return finish(name, std::move(p), gaussian(dim, -3, 3, 0, 1));
  }
  throw std::invalid_argument("unknown reference pair '" + name + "'");
}

} // namespace vmkl::harness
