#pragma once

#include "vmkl/closeness.hpp"
#include "vmkl/scm.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmkl {

/// Per-level parameters of the geometric (Levin) sampling schedule, j = 1..k.
struct LevinSchedule
{
  double epsilon = 0.0;
  double c = 0.0;
  double beta = 0.0;
  std::size_t dim = 0;
  double kappa = 0.0;
  double tau = 0.0;
  int k = 0;
  std::vector<double> eps;
  std::vector<double> r;
  std::vector<double> delta;
  std::vector<std::uint64_t> l;
  std::vector<std::uint64_t> n;
  std::vector<std::uint64_t> m;

  /// sum_j l_j delta_j, the union bound on any test going wrong.
  double error_budget() const;
  /// sum_j l_j n_j: interventional samples of an exhaustive withObs edge test.
  std::uint64_t exhaustive_interventional() const;
};

/// k is the smallest integer with 2^k >= 2/epsilon. Throws std::invalid_argument
/// for epsilon outside (0, 1] or c <= 0, std::logic_error if the budget exceeds 0.1.
LevinSchedule build_schedule(double epsilon, double c, double beta, std::size_t dim, double kappa);

/// c / epsilon^tau, the order of the interventional sample count of one edge test.
double sample_order(double epsilon, double c, double tau);

struct DiscoveryConfig
{
  TestMode mode = TestMode::withObs;
  double epsilon = 0.5;
  double c = 3.0;
  double beta = 2.0;
  double kappa = 8.0;
  double bandwidth_scale = 2.0;
  /// Negative selects the default floor of the domain.
  double floor = -1.0;
  DmaxRule dmax_rule = DmaxRule::supremumKl;
  /// Positive values override the model-derived D_max.
  double dmax_override = 0.0;
  /// Intervention value on the other variable used to emulate P(cause) in intervOnly mode;
  /// empty selects the domain midpoint.
  std::vector<double> reference;
  /// Hard cap on samples of all kinds consumed by one discovery run; zero disables it.
  std::uint64_t budget = 0;
  /// Test hook: draw a single intervention value and compare it with itself (intervOnly).
  bool force_equal = false;
};

struct Witness
{
  int level = 0;
  std::uint64_t index = 0;
  std::vector<double> value;
  /// Second intervention value in intervOnly mode.
  std::vector<double> value_tilde;
  double statistic = 0.0;
  double threshold = 0.0;

  double relative_margin() const { return (statistic - threshold) / threshold; }
};

struct EdgeVerdict
{
  Edge edge = Edge::AtoB;
  bool present = false;
  std::optional<Witness> witness;
  SampleCounters samples_used;
  std::uint64_t tests_run = 0;
  int levels_run = 0;
  double d_max = 0.0;
};

struct StructureVerdict
{
  Structure structure = Structure::Confounded;
  std::vector<EdgeVerdict> edges;
  /// Replicate count when boosted, zero otherwise.
  std::size_t boosted = 0;
  /// Vote counts for AtoB, BtoA, Confounded when boosted.
  std::array<std::size_t, 3> votes{};
  bool tie = false;
  /// Both directed structures collected votes in a tie resolved by witness margin.
  bool conflict = false;
  SampleCounters samples_used;
};

/// Thrown when a run would exceed `DiscoveryConfig::budget`; carries the state reached.
class BudgetExceeded : public std::runtime_error
{
public:
  BudgetExceeded(const std::string& what, EdgeVerdict partial, std::vector<EdgeVerdict> completed = {})
    : std::runtime_error(what)
    , partial_(std::move(partial))
    , completed_(std::move(completed))
  {
  }
  const EdgeVerdict& partial() const { return partial_; }
  const std::vector<EdgeVerdict>& completed() const { return completed_; }

private:
  EdgeVerdict partial_;
  std::vector<EdgeVerdict> completed_;
};

/// Edge test pairing interventions on the candidate cause with observational draws of the effect.
EdgeVerdict test_edge_obs(SamplingOracle& oracle, Edge edge, const LevinSchedule& schedule,
                          const DiscoveryConfig& config);

/// Edge test comparing two interventions on the candidate cause, with values drawn
/// under a fixed intervention on the candidate effect.
EdgeVerdict test_edge_interv(SamplingOracle& oracle, Edge edge, const LevinSchedule& schedule,
                             const DiscoveryConfig& config);

/// Tests A -> B, then B -> A if absent; Confounded when both are absent.
StructureVerdict discover_structure(SamplingOracle& oracle, const DiscoveryConfig& config);

/// Runs `inner(replicate)` for replicate = 0..replicates-1 and returns the modal structure.
/// Ties involving Confounded resolve to Confounded; a tie between the directed structures
/// goes to the one holding the largest witness margin and is flagged as a conflict.
StructureVerdict boost_median(const std::function<StructureVerdict(std::size_t)>& inner, std::size_t replicates);

/// Aggregation step of `boost_median` over already computed verdicts.
StructureVerdict aggregate_verdicts(const std::vector<StructureVerdict>& verdicts);

} // namespace vmkl
