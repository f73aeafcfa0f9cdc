#include "vmkl/scm.hpp"

#include "vmkl/errors.hpp"
#include "vmkl/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace vmkl {

std::string to_string(Structure s)
{
  switch (s) {
    case Structure::AtoB:
      return "AtoB";
    case Structure::BtoA:
      return "BtoA";
    case Structure::Confounded:
      return "Confounded";
  }
  return "unknown";
}

std::string to_string(Variable v)
{
  return v == Variable::A ? "A" : "B";
}

std::string to_string(Edge e)
{
  return e == Edge::AtoB ? "AtoB" : "BtoA";
}

std::string to_string(TestMode m)
{
  return m == TestMode::withObs ? "withObs" : "intervOnly";
}

std::string to_string(DmaxRule r)
{
  return r == DmaxRule::supremumKl ? "supremumKl" : "logRatio";
}

Structure parse_structure(const std::string& text)
{
  if (text == "AtoB")
    return Structure::AtoB;
  if (text == "BtoA")
    return Structure::BtoA;
  if (text == "Confounded")
    return Structure::Confounded;
  throw std::invalid_argument("unknown structure '" + text + "' (expected AtoB, BtoA or Confounded)");
}

TestMode parse_mode(const std::string& text)
{
  if (text == "withObs")
    return TestMode::withObs;
  if (text == "intervOnly")
    return TestMode::intervOnly;
  throw std::invalid_argument("unknown mode '" + text + "' (expected withObs or intervOnly)");
}

DmaxRule parse_dmax_rule(const std::string& text)
{
  if (text == "supremumKl")
    return DmaxRule::supremumKl;
  if (text == "logRatio")
    return DmaxRule::logRatio;
  throw std::invalid_argument("unknown D_max rule '" + text + "' (expected supremumKl or logRatio)");
}

namespace {

double root_pdf(double x)
{
  return 0.5 + 3.0 * x * (1.0 - x);
}

double sample_root(Rng& rng)
{
  // Equal mixture of U(0, 1) and Beta(2, 2).
  return rng.uniform() < 0.5 ? rng.uniform() : rng.beta(2.0, 2.0);
}

} // namespace

namespace detail {

// Joint table of one coordinate on Gauss-Legendre nodes: J[i][j] = p(a_i, b_j).
struct Table
{
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<std::vector<double>> joint;
  std::vector<double> pa;
  std::vector<double> pb;

  double mutual_information() const
  {
    double mi = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j)
        mi += weights[i] * weights[j] * joint[i][j] * std::log(joint[i][j] / (pa[i] * pb[j]));
    return mi;
  }
};

} // namespace detail

using detail::Table;

struct ScmInstance::Coordinate
{
  Coordinate(Structure s, const Mechanism& mech, std::size_t nodes)
    : structure(s)
    , m(mech)
  {
    norm = std::pow(2.0, 2.0 * m.sharpness + 1.0) * boost::math::beta(m.sharpness + 1.0, m.sharpness + 1.0);
    const auto rule = quad::gauss_legendre(nodes, 0.0, 1.0);
    u_nodes = rule.nodes;
    u_weights.resize(nodes);
    u_mass_plus.resize(nodes);
    u_mass_minus.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
      u_weights[k] = rule.weights[k] * root_pdf(rule.nodes[k]);
      u_mass_plus[k] = bump_mass(centre(u_nodes[k], 1.0));
      u_mass_minus[k] = bump_mass(centre(u_nodes[k], -1.0));
    }
  }

  Structure structure;
  Mechanism m;
  double norm = 1.0;
  std::vector<double> u_nodes;
  std::vector<double> u_weights;
  // Bump masses at the latent nodes, one vector per sign.
  std::vector<double> u_mass_plus;
  std::vector<double> u_mass_minus;

  // c(y | u_k) for a latent or cause node.
  double node_effect(double y, std::size_t k, double sign) const
  {
    if (y < 0.0 || y > 1.0)
      return 0.0;
    return effect_with_mass(y, centre(u_nodes[k], sign), sign > 0.0 ? u_mass_plus[k] : u_mass_minus[k]);
  }

  double centre(double x, double sign) const
  {
    return 0.5 + m.amplitude * std::tanh(sign * m.strength * (x - 0.5));
  }

  // int_0^1 (1 - ((y - g)/width)^2)^s dy through the regularized incomplete beta function.
  double bump_mass(double g) const
  {
    const double t0 = std::clamp(-g / m.width, -1.0, 1.0);
    const double t1 = std::clamp((1.0 - g) / m.width, -1.0, 1.0);
    const double a = m.sharpness + 1.0;
    return m.width * norm *
           (boost::math::ibeta(a, a, 0.5 * (1.0 + t1)) - boost::math::ibeta(a, a, 0.5 * (1.0 + t0)));
  }

  double effect_pdf(double y, double x, double sign) const
  {
    if (y < 0.0 || y > 1.0)
      return 0.0;
    const double g = centre(x, sign);
    return effect_with_mass(y, g, bump_mass(g));
  }

  double effect_with_mass(double y, double g, double mass) const
  {
    const double t = (y - g) / m.width;
    const double core = std::abs(t) < 1.0 ? std::pow(1.0 - t * t, m.sharpness) : 0.0;
    return m.eta + (1.0 - m.eta) * core / mass;
  }

  // Conditional density of the effect on the table nodes given an arbitrary cause value,
  // normalized by the same quadrature as the table.
  std::vector<std::vector<double>> conditional_grid(Edge edge, const std::vector<double>& causes) const
  {
    const auto& y = certified.nodes;
    const auto& w = certified.weights;
    const std::size_t n = y.size();
    const bool a_is_cause = edge == Edge::AtoB;
    const double cause_sign = structure == Structure::Confounded && !a_is_cause ? -1.0 : 1.0;
    const double effect_sign = structure == Structure::Confounded && a_is_cause ? -1.0 : 1.0;
    const auto& cause_mass = cause_sign > 0.0 ? u_mass_plus : u_mass_minus;
    std::vector<std::vector<double>> effect_given_latent;
    if (structure == Structure::Confounded) {
      effect_given_latent.assign(n, std::vector<double>(n));
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          effect_given_latent[k][j] = node_effect(y[j], k, effect_sign);
    }
    const bool cause_is_parent = (structure == Structure::AtoB) == a_is_cause;
    std::vector<std::vector<double>> rows(causes.size(), std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < causes.size(); ++i) {
      const double x = causes[i];
      auto& row = rows[i];
      if (structure == Structure::Confounded) {
        for (std::size_t k = 0; k < n; ++k) {
          const double v = u_weights[k] * effect_with_mass(x, centre(u_nodes[k], cause_sign), cause_mass[k]);
          for (std::size_t j = 0; j < n; ++j)
            row[j] += v * effect_given_latent[k][j];
        }
      } else if (cause_is_parent) {
        const double g = centre(x, 1.0);
        const double mass = bump_mass(g);
        for (std::size_t j = 0; j < n; ++j)
          row[j] = effect_with_mass(y[j], g, mass);
      } else {
        for (std::size_t j = 0; j < n; ++j)
          row[j] = root_pdf(y[j]) * effect_with_mass(x, centre(y[j], 1.0), cause_mass[j]);
      }
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        total += w[j] * row[j];
      for (double& v : row)
        v /= total;
    }
    return rows;
  }

  // Supremum of the KL term over cause values: the table nodes plus a uniform grid with the endpoints.
  double supremum_kl(Edge edge, TestMode mode) const
  {
    std::call_once(sup_once, [&] {
      std::vector<double> causes = certified.nodes;
      for (int i = 0; i <= 256; ++i)
        causes.push_back(i / 256.0);
      const std::size_t n = certified.nodes.size();
      const auto& w = certified.weights;
      for (Edge e : {Edge::AtoB, Edge::BtoA}) {
        const auto rows = conditional_grid(e, causes);
        const auto& reference = e == Edge::AtoB ? certified.pb : certified.pa;
        std::vector<std::vector<double>> logs(rows.size(), std::vector<double>(n));
        std::vector<double> self(rows.size(), 0.0);
        double obs = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          double kl = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            logs[i][j] = std::log(rows[i][j]);
            self[i] += w[j] * rows[i][j] * logs[i][j];
            kl += w[j] * rows[i][j] * (logs[i][j] - std::log(reference[j]));
          }
          obs = std::max(obs, kl);
        }
        double interv = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i)
          for (std::size_t k = 0; k < rows.size(); ++k) {
            double cross = 0.0;
            for (std::size_t j = 0; j < n; ++j)
              cross += w[j] * rows[i][j] * logs[k][j];
            interv = std::max(interv, self[i] - cross);
          }
        const std::size_t slot = e == Edge::AtoB ? 0 : 2;
        sup_cache[slot] = obs;
        sup_cache[slot + 1] = interv;
      }
    });
    return sup_cache[(edge == Edge::AtoB ? 0 : 2) + (mode == TestMode::withObs ? 0 : 1)];
  }

  double sample_effect(Rng& rng, double x, double sign) const
  {
    if (rng.uniform() < m.eta)
      return rng.uniform();
    const double g = centre(x, sign);
    for (;;) {
      const double t = 2.0 * rng.beta(m.sharpness + 1.0, m.sharpness + 1.0) - 1.0;
      const double y = g + m.width * t;
      if (y >= 0.0 && y <= 1.0)
        return y;
    }
  }

  // Mixture over the root law of the latent or cause coordinate.
  double mixed_effect(double y, double sign) const
  {
    double v = 0.0;
    for (std::size_t k = 0; k < u_nodes.size(); ++k)
      v += u_weights[k] * node_effect(y, k, sign);
    return v;
  }

  double marginal_a(double a) const
  {
    return structure == Structure::AtoB ? root_pdf(a) : mixed_effect(a, 1.0);
  }

  double marginal_b(double b) const
  {
    switch (structure) {
      case Structure::AtoB:
        return mixed_effect(b, 1.0);
      case Structure::BtoA:
        return root_pdf(b);
      case Structure::Confounded:
        return mixed_effect(b, -1.0);
    }
    return 0.0;
  }

  double joint(double a, double b) const
  {
    switch (structure) {
      case Structure::AtoB:
        return root_pdf(a) * effect_pdf(b, a, 1.0);
      case Structure::BtoA:
        return root_pdf(b) * effect_pdf(a, b, 1.0);
      case Structure::Confounded: {
        double v = 0.0;
        for (std::size_t k = 0; k < u_nodes.size(); ++k)
          v += u_weights[k] * node_effect(a, k, 1.0) * node_effect(b, k, -1.0);
        return v;
      }
    }
    return 0.0;
  }

  double interventional(Variable target, double value, double y) const
  {
    if (target == Variable::A)
      return structure == Structure::AtoB ? effect_pdf(y, value, 1.0) : marginal_b(y);
    return structure == Structure::BtoA ? effect_pdf(y, value, 1.0) : marginal_a(y);
  }

  void sample_joint(Rng& rng, double& a, double& b) const
  {
    switch (structure) {
      case Structure::AtoB:
        a = sample_root(rng);
        b = sample_effect(rng, a, 1.0);
        return;
      case Structure::BtoA:
        b = sample_root(rng);
        a = sample_effect(rng, b, 1.0);
        return;
      case Structure::Confounded: {
        const double u = sample_root(rng);
        a = sample_effect(rng, u, 1.0);
        b = sample_effect(rng, u, -1.0);
        return;
      }
    }
  }

  double sample_interventional(Rng& rng, Variable target, double value) const
  {
    if (target == Variable::A && structure == Structure::AtoB)
      return sample_effect(rng, value, 1.0);
    if (target == Variable::B && structure == Structure::BtoA)
      return sample_effect(rng, value, 1.0);
    // The intervention cuts nothing the other variable depends on: draw it from its marginal.
    return sample_marginal(rng, target == Variable::A ? Variable::B : Variable::A);
  }

  double sample_marginal(Rng& rng, Variable v) const
  {
    if ((v == Variable::A && structure == Structure::AtoB) || (v == Variable::B && structure == Structure::BtoA))
      return sample_root(rng);
    const double parent = sample_root(rng);
    const double sign = (v == Variable::B && structure == Structure::Confounded) ? -1.0 : 1.0;
    return sample_effect(rng, parent, sign);
  }

  Table table(std::size_t n) const
  {
    const auto rule = quad::gauss_legendre(n, 0.0, 1.0);
    Table t;
    t.nodes = rule.nodes;
    t.weights = rule.weights;
    t.joint.assign(n, std::vector<double>(n, 0.0));
    // effect[k][j] = c(x_j | x_k) for both signs.
    std::vector<std::vector<double>> plus;
    std::vector<std::vector<double>> minus;
    auto fill = [&](std::vector<std::vector<double>>& out, double sign) {
      out.assign(n, std::vector<double>(n));
      for (std::size_t k = 0; k < n; ++k) {
        const double g = centre(rule.nodes[k], sign);
        const double mass = bump_mass(g);
        for (std::size_t j = 0; j < n; ++j)
          out[k][j] = effect_with_mass(rule.nodes[j], g, mass);
      }
    };
    fill(plus, 1.0);
    if (structure == Structure::Confounded)
      fill(minus, -1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        switch (structure) {
          case Structure::AtoB:
            t.joint[i][j] = root_pdf(rule.nodes[i]) * plus[i][j];
            break;
          case Structure::BtoA:
            t.joint[i][j] = root_pdf(rule.nodes[j]) * plus[j][i];
            break;
          case Structure::Confounded:
            break;
        }
      }
    if (structure == Structure::Confounded) {
      for (std::size_t k = 0; k < n; ++k) {
        const double wk = rule.weights[k] * root_pdf(rule.nodes[k]);
        for (std::size_t i = 0; i < n; ++i) {
          const double left = wk * plus[k][i];
          auto& row = t.joint[i];
          for (std::size_t j = 0; j < n; ++j)
            row[j] += left * minus[k][j];
        }
      }
    }
    t.pa.assign(n, 0.0);
    t.pb.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        t.pa[i] += rule.weights[j] * t.joint[i][j];
        t.pb[j] += rule.weights[i] * t.joint[i][j];
      }
    return t;
  }

  double max_effect_pdf() const
  {
    double zmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i)
      zmin = std::min(zmin, bump_mass(0.5 - m.amplitude + 2.0 * m.amplitude * i / 200.0));
    return m.eta + (1.0 - m.eta) / zmin;
  }

  Table certified;
  mutable std::once_flag sup_once;
  mutable std::array<double, 4> sup_cache{};
};

namespace {

void validate(const Mechanism& m)
{
  if (!(m.strength >= 0.0) || !(m.sharpness >= 1.0) || !(m.eta > 0.0 && m.eta < 1.0))
    throw std::invalid_argument("mechanism needs strength >= 0, sharpness >= 1 and 0 < eta < 1");
  if (!(m.amplitude >= 0.0 && m.amplitude < 0.5) || !(m.width >= 0.5 + m.amplitude))
    throw std::invalid_argument("mechanism needs 0 <= amplitude < 1/2 and width >= 1/2 + amplitude");
}

// Rows are conditional densities of the second table axis given the first.
std::vector<std::vector<double>> conditional_rows(const Table& t, Edge edge)
{
  const std::size_t n = t.nodes.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      rows[i][j] = edge == Edge::AtoB ? t.joint[i][j] / t.pa[i] : t.joint[j][i] / t.pb[i];
  return rows;
}

double log_ratio_dmax(const Table& t, Edge edge, TestMode mode)
{
  const auto rows = conditional_rows(t, edge);
  const auto& reference = edge == Edge::AtoB ? t.pb : t.pa;
  double sup = 0.0;
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& row : rows)
    for (double v : row) {
      sup = std::max(sup, v);
      inf = std::min(inf, v);
    }
  if (mode == TestMode::withObs)
    inf = *std::min_element(reference.begin(), reference.end());
  return std::log(sup / inf);
}

template <class F>
double product_over(std::size_t d, F f)
{
  double v = 1.0;
  for (std::size_t i = 0; i < d; ++i)
    v *= f(i);
  return v;
}

void check_point(std::span<const double> x, std::size_t d, const char* what)
{
  if (x.size() != d)
    throw std::invalid_argument(std::string(what) + " has wrong dimension");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::out_of_range(std::string(what) + " outside the unit box");
}

} // namespace

ScmInstance::ScmInstance(Structure structure, std::vector<Mechanism> mechanisms, std::uint64_t seed,
                         const ScmOptions& options)
  : structure_(structure)
  , mechanisms_(std::move(mechanisms))
  , seed_(seed)
{
  if (mechanisms_.empty() || mechanisms_.size() > 3)
    throw std::invalid_argument("SCM dimension must be 1, 2 or 3");
  if (options.quadrature_nodes < 16)
    throw std::invalid_argument("SCM certification needs at least 16 quadrature nodes");
  domain_ = DomainBox::cube(mechanisms_.size(), 0.0, 1.0);
  const std::size_t fine = options.quadrature_nodes + options.quadrature_nodes / 2;
  for (const auto& m : mechanisms_) {
    validate(m);
    auto c = std::make_shared<Coordinate>(structure_, m, options.quadrature_nodes);
    c->certified = c->table(options.quadrature_nodes);
    const double coarse_mi = c->certified.mutual_information();
    const double fine_mi = c->table(fine).mutual_information();
    mutual_information_ += fine_mi;
    certification_error_ += std::abs(fine_mi - coarse_mi);
    coords_.push_back(std::move(c));
  }
  epsilon_star_ = std::max(0.0, mutual_information_ - certification_error_);
  if (epsilon_star_ < options.min_separation) {
    std::ostringstream msg;
    msg << "certified dependence epsilon* = " << epsilon_star_ << " is below the minimum usable separation "
        << options.min_separation;
    throw SeparationError(msg.str(), epsilon_star_);
  }
}

double ScmInstance::density_lower_bound() const
{
  // Effects and their mixtures are >= eta and causes >= 1/2; the reverse conditional
  // r(x) c(y|x) / p(y) is then >= eta / (2 sup c).
  return product_over(dim(), [&](std::size_t i) {
    return 0.5 * mechanisms_[i].eta / std::max(1.0, coords_[i]->max_effect_pdf());
  });
}

double ScmInstance::density_upper_bound() const
{
  return product_over(dim(), [&](std::size_t i) { return std::max(1.25, coords_[i]->max_effect_pdf()); });
}

double ScmInstance::marginal_pdf(Variable v, std::span<const double> x) const
{
  check_point(x, dim(), "marginal point");
  return product_over(dim(), [&](std::size_t i) {
    return v == Variable::A ? coords_[i]->marginal_a(x[i]) : coords_[i]->marginal_b(x[i]);
  });
}

double ScmInstance::joint_pdf(std::span<const double> a, std::span<const double> b) const
{
  check_point(a, dim(), "joint point");
  check_point(b, dim(), "joint point");
  return product_over(dim(), [&](std::size_t i) { return coords_[i]->joint(a[i], b[i]); });
}

double ScmInstance::conditional_pdf(Variable effect, std::span<const double> given, std::span<const double> y) const
{
  check_point(given, dim(), "conditioning value");
  check_point(y, dim(), "conditional point");
  return product_over(dim(), [&](std::size_t i) {
    const auto& c = *coords_[i];
    return effect == Variable::B ? c.joint(given[i], y[i]) / c.marginal_a(given[i])
                                 : c.joint(y[i], given[i]) / c.marginal_b(given[i]);
  });
}

double ScmInstance::interventional_pdf(Variable target, std::span<const double> value, std::span<const double> y) const
{
  check_point(value, dim(), "intervention value");
  check_point(y, dim(), "interventional point");
  return product_over(dim(), [&](std::size_t i) { return coords_[i]->interventional(target, value[i], y[i]); });
}

void ScmInstance::sample_joint(Rng& rng, std::span<double> a, std::span<double> b) const
{
  for (std::size_t i = 0; i < dim(); ++i)
    coords_[i]->sample_joint(rng, a[i], b[i]);
}

void ScmInstance::sample_marginal(Rng& rng, Variable v, std::span<double> out) const
{
  for (std::size_t i = 0; i < dim(); ++i)
    out[i] = coords_[i]->sample_marginal(rng, v);
}

void ScmInstance::sample_interventional(Rng& rng, Variable target, std::span<const double> value,
                                        std::span<double> out) const
{
  check_point(value, dim(), "intervention value");
  for (std::size_t i = 0; i < dim(); ++i)
    out[i] = coords_[i]->sample_interventional(rng, target, value[i]);
}

double ScmInstance::d_max(Edge edge, TestMode mode, DmaxRule rule) const
{
  double total = 0.0;
  for (const auto& c : coords_)
    total += rule == DmaxRule::logRatio ? log_ratio_dmax(c->certified, edge, mode) : c->supremum_kl(edge, mode);
  return total;
}

std::string ScmInstance::to_config() const
{
  std::ostringstream out;
  out << std::setprecision(17);
  out << "structure=" << to_string(structure_) << '\n';
  out << "dim=" << dim() << '\n';
  out << "seed=" << seed_ << '\n';
  out << "quadrature_nodes=" << coords_.front()->u_nodes.size() << '\n';
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto& m = mechanisms_[i];
    const std::string p = "coord" + std::to_string(i) + ".";
    out << p << "strength=" << m.strength << '\n';
    out << p << "sharpness=" << m.sharpness << '\n';
    out << p << "eta=" << m.eta << '\n';
    out << p << "amplitude=" << m.amplitude << '\n';
    out << p << "width=" << m.width << '\n';
  }
  out << "# derived\n";
  out << "epsilon_star=" << epsilon_star_ << '\n';
  out << "mutual_information=" << mutual_information_ << '\n';
  out << "density_lower_bound=" << density_lower_bound() << '\n';
  return out.str();
}

ScmInstance make_scm(Structure structure, std::size_t dim, double strength, std::uint64_t seed,
                     const ScmOptions& options)
{
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("SCM dimension must be 1, 2 or 3");
  std::vector<Mechanism> mechanisms;
  for (std::size_t i = 0; i < dim; ++i) {
    Mechanism m = options.base;
    m.strength = strength;
    if (i > 0 && options.jitter > 0.0) {
      Rng rng = Rng::stream(seed, i, "mechanism");
      m.strength *= 1.0 + options.jitter * (2.0 * rng.uniform() - 1.0);
      m.sharpness *= 1.0 + options.jitter * (2.0 * rng.uniform() - 1.0);
      m.amplitude = std::min(0.45, m.amplitude * (1.0 + options.jitter * (2.0 * rng.uniform() - 1.0)));
      m.width = std::max(m.width, 0.5 + m.amplitude);
    }
    mechanisms.push_back(m);
  }
  return ScmInstance(structure, std::move(mechanisms), seed, options);
}

ScmInstance scm_from_config(const std::string& text)
{
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#')
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed SCM config line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw std::invalid_argument("SCM config is missing key '" + key + "'");
    return it->second;
  };
  const Structure structure = parse_structure(get("structure"));
  const std::size_t dim = std::stoul(get("dim"));
  ScmOptions options;
  options.min_separation = 0.0;
  if (kv.count("quadrature_nodes"))
    options.quadrature_nodes = std::stoul(get("quadrature_nodes"));
  std::vector<Mechanism> mechanisms(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string p = "coord" + std::to_string(i) + ".";
    mechanisms[i].strength = std::stod(get(p + "strength"));
    mechanisms[i].sharpness = std::stod(get(p + "sharpness"));
    mechanisms[i].eta = std::stod(get(p + "eta"));
    mechanisms[i].amplitude = std::stod(get(p + "amplitude"));
    mechanisms[i].width = std::stod(get(p + "width"));
  }
  return ScmInstance(structure, std::move(mechanisms), std::stoull(get("seed")), options);
}

DensityAudit ScmInstance::audit_density_floor(std::size_t points) const
{
  if (points < 2)
    throw std::invalid_argument("density audit needs at least two grid points");
  DensityAudit audit;
  audit.recorded_bound = density_lower_bound();
  audit.min_marginal_a = audit.min_marginal_b = audit.min_conditional = audit.min_interventional = 1.0;
  // Every density is a product over coordinates, so its minimum is the product of per-coordinate minima.
  for (const auto& c : coords_) {
    double ma = std::numeric_limits<double>::infinity();
    double mb = ma;
    double mc = ma;
    double mi = ma;
    for (std::size_t k = 0; k < points; ++k) {
      const double x = static_cast<double>(k) / static_cast<double>(points - 1);
      const double pa = c->marginal_a(x);
      const double pb = c->marginal_b(x);
      ma = std::min(ma, pa);
      mb = std::min(mb, pb);
      for (std::size_t l = 0; l < points; ++l) {
        const double y = static_cast<double>(l) / static_cast<double>(points - 1);
        mc = std::min({mc, c->joint(x, y) / pa, c->joint(y, x) / pb});
        mi = std::min({mi, c->interventional(Variable::A, x, y), c->interventional(Variable::B, x, y)});
      }
    }
    audit.min_marginal_a *= ma;
    audit.min_marginal_b *= mb;
    audit.min_conditional *= mc;
    audit.min_interventional *= mi;
  }
  audit.passed = audit.min_marginal_a >= audit.recorded_bound && audit.min_marginal_b >= audit.recorded_bound &&
                 audit.min_conditional >= audit.recorded_bound && audit.min_interventional >= audit.recorded_bound;
  return audit;
}

DensityAudit audit_density_floor(const ScmInstance& scm, std::size_t points)
{
  return scm.audit_density_floor(points);
}

SamplingOracle::SamplingOracle(std::shared_ptr<const ScmInstance> scm, std::uint64_t seed, std::uint64_t trial)
  : scm_(std::move(scm))
  , joint_rng_(Rng::stream(seed, trial, "obs_joint"))
  , obs_a_rng_(Rng::stream(seed, trial, "obs_A"))
  , obs_b_rng_(Rng::stream(seed, trial, "obs_B"))
  , interv_a_rng_(Rng::stream(seed, trial, "do_A"))
  , interv_b_rng_(Rng::stream(seed, trial, "do_B"))
{
  if (!scm_)
    throw std::invalid_argument("sampling oracle needs a model");
}

PointSet SamplingOracle::sample_obs_joint(std::size_t count)
{
  const std::size_t d = scm_->dim();
  std::vector<double> coords(count * 2 * d);
  for (std::size_t r = 0; r < count; ++r) {
    double* row = coords.data() + r * 2 * d;
    scm_->sample_joint(joint_rng_, std::span<double>(row, d), std::span<double>(row + d, d));
  }
  counters_.joint += count;
  return PointSet(2 * d, std::move(coords));
}

PointSet SamplingOracle::sample_obs_marginal(Variable which, std::size_t count)
{
  const std::size_t d = scm_->dim();
  Rng& rng = which == Variable::A ? obs_a_rng_ : obs_b_rng_;
  std::vector<double> coords(count * d);
  for (std::size_t r = 0; r < count; ++r)
    scm_->sample_marginal(rng, which, std::span<double>(coords.data() + r * d, d));
  (which == Variable::A ? counters_.obs_a : counters_.obs_b) += count;
  return PointSet(d, std::move(coords));
}

PointSet SamplingOracle::sample_interventional(Variable target, std::span<const double> value, std::size_t count)
{
  const std::size_t d = scm_->dim();
  if (!scm_->domain().contains(value))
    throw std::out_of_range("intervention value outside the domain");
  Rng& rng = target == Variable::A ? interv_a_rng_ : interv_b_rng_;
  std::vector<double> coords(count * d);
  for (std::size_t r = 0; r < count; ++r)
    scm_->sample_interventional(rng, target, value, std::span<double>(coords.data() + r * d, d));
  counters_.interventional += count;
  return PointSet(d, std::move(coords));
}

} // namespace vmkl
