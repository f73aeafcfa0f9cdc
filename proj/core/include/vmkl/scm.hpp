#pragma once

#include "vmkl/point_set.hpp"
#include "vmkl/random.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vmkl {

enum class Structure
{
  AtoB,
  BtoA,
  Confounded
};

enum class Variable
{
  A,
  B
};

/// Candidate directed edge under test.
enum class Edge
{
  AtoB,
  BtoA
};

/// withObs pairs an intervention with observational draws; intervOnly compares two interventions.
enum class TestMode
{
  withObs,
  intervOnly
};

/// How D_max, the normalizer that maps the KL statistic into [0, 1], is obtained.
enum class DmaxRule
{
  /// Supremum of the observational KL analogue, computed by quadrature.
  supremumKl,
  /// log(sup density / inf density) from the certified density bounds.
  logRatio
};

std::string to_string(Structure s);
std::string to_string(Variable v);
std::string to_string(Edge e);
std::string to_string(TestMode m);
std::string to_string(DmaxRule r);
Structure parse_structure(const std::string& text);
TestMode parse_mode(const std::string& text);
DmaxRule parse_dmax_rule(const std::string& text);

/// Parameters of one coordinate's mechanism.
///
/// Causes follow the root density r(x) = 1/2 + 3x(1-x) on [0, 1]. An effect y of
/// a cause x has density eta + (1-eta) (1-t^2)^s / Z(x) with t = (y - g(x)) / width
/// and g(x) = 1/2 + amplitude tanh(sign * strength * (x - 1/2)): a beta-shaped
/// bump riding a saturated nonlinearity, mixed with a uniform floor.
struct Mechanism
{
  double strength = 12.0;
  double sharpness = 24.0;
  double eta = 0.02;
  double amplitude = 0.4;
  double width = 1.0;
};

struct ScmOptions
{
  Mechanism base;
  /// Relative jitter applied to coordinates after the first, drawn from the seed.
  double jitter = 0.1;
  /// Instances with certified epsilon* below this are rejected.
  double min_separation = 0.01;
  /// Gauss-Legendre nodes per axis for certification; a finer rule bounds the error.
  std::size_t quadrature_nodes = 160;
};

struct DensityAudit
{
  double recorded_bound = 0.0;
  double min_marginal_a = 0.0;
  double min_marginal_b = 0.0;
  double min_conditional = 0.0;
  double min_interventional = 0.0;
  bool passed = false;
};

/// Ground-truth model over A, B in [0, 1]^d, factorized across coordinates:
/// coordinate i of A and B depends only on coordinate i of the parents (and of U).
class ScmInstance
{
public:
  ScmInstance(Structure structure, std::vector<Mechanism> mechanisms, std::uint64_t seed, const ScmOptions& options);

  Structure structure() const { return structure_; }
  std::size_t dim() const { return mechanisms_.size(); }
  const std::vector<Mechanism>& mechanisms() const { return mechanisms_; }
  std::uint64_t seed() const { return seed_; }
  const DomainBox& domain(Variable) const { return domain_; }
  const DomainBox& domain() const { return domain_; }

  /// Certified lower bound on KL(P(A,B) || P(A)P(B)).
  double epsilon_star() const { return epsilon_star_; }
  /// Quadrature value before subtracting the refinement error.
  double mutual_information() const { return mutual_information_; }
  double certification_error() const { return certification_error_; }
  /// Lower bound for every marginal, conditional and interventional density.
  double density_lower_bound() const;
  /// Upper bound for every such density.
  double density_upper_bound() const;

  double marginal_pdf(Variable v, std::span<const double> x) const;
  double joint_pdf(std::span<const double> a, std::span<const double> b) const;
  /// Observational P(effect | other = given).
  double conditional_pdf(Variable effect, std::span<const double> given, std::span<const double> y) const;
  /// Law of the non-target variable under do(target = value).
  double interventional_pdf(Variable target, std::span<const double> value, std::span<const double> y) const;

  void sample_joint(Rng& rng, std::span<double> a, std::span<double> b) const;
  void sample_marginal(Rng& rng, Variable v, std::span<double> out) const;
  void sample_interventional(Rng& rng, Variable target, std::span<const double> value, std::span<double> out) const;

  /// Normalizer for the edge statistic: the worst case over the observational analogue of
  /// the compared laws, so that it does not depend on the unknown structure.
  double d_max(Edge edge, TestMode mode, DmaxRule rule = DmaxRule::supremumKl) const;

  /// Plain-text key=value description; `scm_from_config` rebuilds the identical instance.
  std::string to_config() const;

  struct Coordinate;

private:
  friend DensityAudit audit_density_floor(const ScmInstance& scm, std::size_t points);
  DensityAudit audit_density_floor(std::size_t points) const;

  Structure structure_;
  std::vector<Mechanism> mechanisms_;
  std::uint64_t seed_;
  DomainBox domain_;
  std::vector<std::shared_ptr<const Coordinate>> coords_;
  double epsilon_star_ = 0.0;
  double mutual_information_ = 0.0;
  double certification_error_ = 0.0;
};

/// Reference model family; throws SeparationError when epsilon* < options.min_separation.
ScmInstance make_scm(Structure structure, std::size_t dim, double strength, std::uint64_t seed,
                     const ScmOptions& options = {});

ScmInstance scm_from_config(const std::string& text);

/// Minimum of each density family over a uniform grid of `points` per axis and coordinate.
DensityAudit audit_density_floor(const ScmInstance& scm, std::size_t points = 101);

struct SampleCounters
{
  std::uint64_t obs_a = 0;
  std::uint64_t obs_b = 0;
  std::uint64_t joint = 0;
  std::uint64_t interventional = 0;

  std::uint64_t observational() const { return obs_a + obs_b + joint; }
  std::uint64_t total() const { return observational() + interventional; }
};

/// Sample access to one model for one trial. Each query type draws from its own
/// named random stream, so the sequence of one query type does not depend on how
/// the other types are interleaved. Single consumer.
class SamplingOracle
{
public:
  SamplingOracle(std::shared_ptr<const ScmInstance> scm, std::uint64_t seed, std::uint64_t trial);

  const ScmInstance& scm() const { return *scm_; }
  const SampleCounters& counters() const { return counters_; }

  /// Rows are (a, b) concatenated: dimension 2d.
  PointSet sample_obs_joint(std::size_t count);
  PointSet sample_obs_marginal(Variable which, std::size_t count);
  /// Draws of the non-target variable under do(target = value).
  PointSet sample_interventional(Variable target, std::span<const double> value, std::size_t count);

private:
  std::shared_ptr<const ScmInstance> scm_;
  SampleCounters counters_;
  Rng joint_rng_;
  Rng obs_a_rng_;
  Rng obs_b_rng_;
  Rng interv_a_rng_;
  Rng interv_b_rng_;
};

} // namespace vmkl
