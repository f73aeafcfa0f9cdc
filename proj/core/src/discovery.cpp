#include "vmkl/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vmkl {

double LevinSchedule::error_budget() const
{
  double total = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j)
    total += static_cast<double>(l[j]) * delta[j];
  return total;
}

std::uint64_t LevinSchedule::exhaustive_interventional() const
{
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < l.size(); ++j)
    total += l[j] * n[j];
  return total;
}

LevinSchedule build_schedule(double epsilon, double c, double beta, std::size_t dim, double kappa)
{
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("schedule needs 0 < epsilon <= 1");
  if (!(c > 0.0))
    throw std::invalid_argument("schedule needs c > 0");
  LevinSchedule s;
  s.epsilon = epsilon;
  s.c = c;
  s.beta = beta;
  s.dim = dim;
  s.kappa = kappa;
  const SampleSizeRule rule(beta, dim, kappa);
  s.tau = rule.tau;
  s.k = 1;
  while (std::ldexp(1.0, s.k) * epsilon < 2.0)
    ++s.k;
  for (int j = 1; j <= s.k; ++j) {
    const double gap = static_cast<double>(s.k + 5 - j);
    const double eps_j = std::ldexp(1.0, -j);
    const double r_j = std::ldexp(epsilon, j) / (gap * gap);
    const double delta_j = std::ldexp(1.0, j - s.k) / ((2.0 * c + 2.0) * std::pow(gap, 4));
    // (2c+2)/r_j written without the intermediate quotient, so exact cases floor exactly.
    const double l_real = (2.0 * c + 2.0) * gap * gap / std::ldexp(epsilon, j);
    const auto l_j = static_cast<std::uint64_t>(std::floor(l_real * (1.0 + 1e-12)));
    const auto [n_j, m_j] = required_samples(eps_j, delta_j, rule);
    s.eps.push_back(eps_j);
    s.r.push_back(r_j);
    s.delta.push_back(delta_j);
    s.l.push_back(std::max<std::uint64_t>(l_j, 1));
    s.n.push_back(std::max<std::uint64_t>(n_j, 4));
    s.m.push_back(std::max<std::uint64_t>(m_j, 4));
  }
  if (s.error_budget() > 0.1)
    throw std::logic_error("schedule error budget exceeds 0.1");
  return s;
}

double sample_order(double epsilon, double c, double tau)
{
  return c / std::pow(epsilon, tau);
}

namespace {

struct EdgeRoles
{
  Variable cause;
  Variable effect;
};

EdgeRoles roles(Edge edge)
{
  return edge == Edge::AtoB ? EdgeRoles{Variable::A, Variable::B} : EdgeRoles{Variable::B, Variable::A};
}

SampleCounters difference(const SampleCounters& after, const SampleCounters& before)
{
  return {after.obs_a - before.obs_a, after.obs_b - before.obs_b, after.joint - before.joint,
          after.interventional - before.interventional};
}

class Budget
{
public:
  Budget(const SamplingOracle& oracle, std::uint64_t cap, std::uint64_t run_start)
    : oracle_(oracle)
    , cap_(cap)
    , start_(run_start)
  {
  }

  bool allows(std::uint64_t count) const
  {
    return cap_ == 0 || oracle_.counters().total() - start_ + count <= cap_;
  }

private:
  const SamplingOracle& oracle_;
  std::uint64_t cap_;
  std::uint64_t start_;
};

EdgeVerdict run_edge_test(SamplingOracle& oracle, Edge edge, const LevinSchedule& schedule,
                          const DiscoveryConfig& config, TestMode mode, std::uint64_t run_start,
                          const std::vector<EdgeVerdict>& completed)
{
  const ScmInstance& scm = oracle.scm();
  if (schedule.dim != scm.dim())
    throw std::invalid_argument("schedule dimension does not match the model");
  const auto [cause, effect] = roles(edge);
  const SampleCounters before = oracle.counters();

  ClosenessConfig test = make_closeness_config(scm.domain(), config.beta, config.bandwidth_scale);
  test.estimator.floor = config.floor;
  const double d_max = config.dmax_override > 0.0 ? config.dmax_override : scm.d_max(edge, mode, config.dmax_rule);
  test.statistic_scale = d_max;

  std::vector<double> reference = config.reference.empty() ? scm.domain().midpoint() : config.reference;
  if (mode == TestMode::intervOnly && !scm.domain().contains(reference))
    throw std::out_of_range("reference intervention value outside the domain");

  EdgeVerdict verdict;
  verdict.edge = edge;
  verdict.d_max = d_max;
  const Budget budget(oracle, config.budget, run_start);

  auto exceed = [&](int level, std::uint64_t index) {
    verdict.samples_used = difference(oracle.counters(), before);
    std::ostringstream msg;
    msg << "sample budget " << config.budget << " exceeded while testing " << to_string(edge) << " at level "
        << level << ", test " << index;
    throw BudgetExceeded(msg.str(), verdict, completed);
  };

  for (int j = 1; j <= schedule.k; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j - 1);
    verdict.levels_run = j;
    const std::uint64_t n_j = schedule.n[idx];
    const std::uint64_t m_j = schedule.m[idx];
    for (std::uint64_t i = 1; i <= schedule.l[idx]; ++i) {
      const std::uint64_t draws = mode == TestMode::withObs ? 1 : (config.force_equal ? 1 : 2);
      if (!budget.allows(draws + n_j + m_j))
        exceed(j, i);
      PointSet x;
      PointSet y;
      std::vector<double> value;
      std::vector<double> value_tilde;
      if (mode == TestMode::withObs) {
        const PointSet a = oracle.sample_obs_marginal(cause, 1);
        value.assign(a[0].begin(), a[0].end());
        x = oracle.sample_interventional(cause, value, n_j);
        y = oracle.sample_obs_marginal(effect, m_j);
      } else {
        const PointSet a = oracle.sample_interventional(effect, reference, draws);
        value.assign(a[0].begin(), a[0].end());
        value_tilde.assign(a[draws - 1].begin(), a[draws - 1].end());
        x = oracle.sample_interventional(cause, value, n_j);
        y = oracle.sample_interventional(cause, value_tilde, m_j);
      }
      const TestOutcome outcome = closeness_test(x, y, schedule.eps[idx], schedule.delta[idx], test);
      ++verdict.tests_run;
      if (outcome.decision == Decision::H1) {
        verdict.present = true;
        verdict.witness = Witness{j, i, std::move(value), std::move(value_tilde), outcome.statistic, outcome.threshold};
        verdict.samples_used = difference(oracle.counters(), before);
        return verdict;
      }
    }
  }
  verdict.samples_used = difference(oracle.counters(), before);
  return verdict;
}

} // namespace

EdgeVerdict test_edge_obs(SamplingOracle& oracle, Edge edge, const LevinSchedule& schedule,
                          const DiscoveryConfig& config)
{
  return run_edge_test(oracle, edge, schedule, config, TestMode::withObs, oracle.counters().total(), {});
}

EdgeVerdict test_edge_interv(SamplingOracle& oracle, Edge edge, const LevinSchedule& schedule,
                             const DiscoveryConfig& config)
{
  return run_edge_test(oracle, edge, schedule, config, TestMode::intervOnly, oracle.counters().total(), {});
}

StructureVerdict discover_structure(SamplingOracle& oracle, const DiscoveryConfig& config)
{
  const LevinSchedule schedule =
    build_schedule(config.epsilon, config.c, config.beta, oracle.scm().dim(), config.kappa);
  const SampleCounters before = oracle.counters();
  const std::uint64_t start = before.total();
  StructureVerdict verdict;
  verdict.edges.push_back(run_edge_test(oracle, Edge::AtoB, schedule, config, config.mode, start, {}));
  if (verdict.edges.back().present) {
    verdict.structure = Structure::AtoB;
  } else {
    verdict.edges.push_back(run_edge_test(oracle, Edge::BtoA, schedule, config, config.mode, start, verdict.edges));
    verdict.structure = verdict.edges.back().present ? Structure::BtoA : Structure::Confounded;
  }
  verdict.samples_used = difference(oracle.counters(), before);
  return verdict;
}

namespace {

std::size_t slot(Structure s)
{
  return static_cast<std::size_t>(s);
}

double best_margin(const std::vector<StructureVerdict>& verdicts, Structure s)
{
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : verdicts) {
    if (v.structure != s)
      continue;
    for (const auto& e : v.edges)
      if (e.present && e.witness)
        best = std::max(best, e.witness->relative_margin());
  }
  return best;
}

} // namespace

StructureVerdict aggregate_verdicts(const std::vector<StructureVerdict>& verdicts)
{
  if (verdicts.empty())
    throw std::invalid_argument("cannot aggregate zero verdicts");
  if (verdicts.size() == 1) {
    StructureVerdict single = verdicts.front();
    single.boosted = 1;
    single.votes = {};
    single.votes[slot(single.structure)] = 1;
    return single;
  }
  StructureVerdict out;
  out.boosted = verdicts.size();
  for (const auto& v : verdicts) {
    ++out.votes[slot(v.structure)];
    out.samples_used.obs_a += v.samples_used.obs_a;
    out.samples_used.obs_b += v.samples_used.obs_b;
    out.samples_used.joint += v.samples_used.joint;
    out.samples_used.interventional += v.samples_used.interventional;
  }
  const std::size_t top = *std::max_element(out.votes.begin(), out.votes.end());
  std::vector<Structure> leaders;
  for (Structure s : {Structure::AtoB, Structure::BtoA, Structure::Confounded})
    if (out.votes[slot(s)] == top)
      leaders.push_back(s);
  if (leaders.size() == 1) {
    out.structure = leaders.front();
  } else {
    out.tie = true;
    if (std::find(leaders.begin(), leaders.end(), Structure::Confounded) != leaders.end()) {
      out.structure = Structure::Confounded;
    } else {
      out.conflict = true;
      out.structure = best_margin(verdicts, Structure::AtoB) >= best_margin(verdicts, Structure::BtoA)
                        ? Structure::AtoB
                        : Structure::BtoA;
    }
  }
  // Report the edge evidence of the first replicate that agrees with the aggregate.
  for (const auto& v : verdicts)
    if (v.structure == out.structure) {
      out.edges = v.edges;
      break;
    }
  return out;
}

StructureVerdict boost_median(const std::function<StructureVerdict(std::size_t)>& inner, std::size_t replicates)
{
  if (replicates == 0 || replicates % 2 == 0)
    throw std::invalid_argument("boosting needs an odd, positive replicate count");
  std::vector<StructureVerdict> verdicts;
  verdicts.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r)
    verdicts.push_back(inner(r));
  return aggregate_verdicts(verdicts);
}

} // namespace vmkl
