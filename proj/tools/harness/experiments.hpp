#pragma once

#include "config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace vmkl::harness {

/// Output of one harness run. `summary` always embeds the resolved config.
struct ExperimentReport
{
  std::string name;
  nlohmann::json summary;
  /// One record per trial.
  std::vector<nlohmann::json> trials;
  /// One CSV table per sweep.
  std::string csv;
  bool passed = false;
};

/// Writes <dir>/<name>.json, <dir>/<name>.csv and <dir>/<name>.trials.jsonl.
void write_report(const ExperimentReport& report, const std::string& dir);

/// Sweep of Von Mises (and optionally plug-in) error against n on a reference pair,
/// with a log-log slope fit of the median absolute error.
///
/// Keys: pair, dim, beta, bandwidth_scale, kernel_order (0 = default for beta),
/// floor, n_grid, replicates, seed, threads, compare_plugin, slope_max.
ExperimentReport run_rate_experiment(const Config& config);

/// Shipped closeness-test constant, from `vmkl calibrate` at (eps, delta) = (0.4, 0.1),
/// 200 trials, seed 7.
inline constexpr double calibrated_kappa = 18.0;

/// Empirical type-I / type-II rates of the closeness test at a fixed kappa.
///
/// Keys: epsilon, delta, kappa (default calibrated_kappa), beta, dim, bandwidth_scale, null_pair, alt_pair,
/// trials, seed, threads. Passes when both rates are <= delta + 3 SE(delta).
ExperimentReport run_closeness_check(const Config& config);

/// Smallest kappa (doubling, then bisection) at which both empirical error rates
/// are <= delta. `summary["kappa"]` holds the result.
///
/// Keys: as run_closeness_check plus kappa_start, kappa_max, refine_steps.
ExperimentReport run_test_calibration(const Config& config);

/// Structure identification over ground-truth structures and seeds, with a
/// confusion matrix, success rates and interventional sample accounting.
///
/// Keys: structures, mode, epsilon (or epsilons for a sweep), c, replicates (odd,
/// boosting), trials, seed, budget, kappa, kappa_prime, beta, dim, strength,
/// scm_seed, bandwidth_scale, floor, dmax_rule, dmax, reference, success_min,
/// edge_rate_min, threads.
ExperimentReport run_discovery_experiment(const Config& config);

/// One estimate of each kind on a reference pair. Keys: pair, dim, n, m, beta,
/// bandwidth_scale, kernel_order, floor, estimator (vm, plugin, oracle or all), seed.
/// A `check` key runs run_estimator_check instead.
ExperimentReport run_estimate(const Config& config);

/// Deterministic estimator checks, selected by `check`:
///  - kernel_moments: int K = 1 and vanishing moments by quadrature (orders, dims, tolerance);
///  - shared_fit_zero: |VM| with one fit on both sides over random inputs (inputs, seed, tolerance);
///  - oracle: KL oracle against mu^2/2 on a shifted pair (pair, shift, dim, tolerance).
ExperimentReport run_estimator_check(const Config& config);

/// Schedule arithmetic without sampling: sum_j l_j delta_j for every epsilon in
/// `epsilons` and c in `c` (both comma lists). Reached through discover with dry_run = true.
ExperimentReport run_schedule_check(const Config& config);

/// Model description and optional joint sample dump. Keys: structure, dim, strength,
/// seed, samples.
ExperimentReport run_scm_dump(const Config& config);

/// kappa' default: the documented multiple of kappa bounding sum_j l_j n_j by kappa' c / eps^tau.
double default_kappa_prime(double kappa);

} // namespace vmkl::harness
