#include "config.hpp"
#include "experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using vmkl::harness::Config;
using vmkl::harness::ExperimentReport;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

/// Flags bound to config keys. A flag given on the command line overrides the
/// same key from --config.
struct Overrides
{
  std::map<std::string, std::string> values;

  template <class T>
  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
  {
    app->add_option_function<T>(
      flag, [this, key](const T& v) { values[key] = to_text(v); }, help);
  }

  static std::string to_text(const std::string& v) { return v; }
  static std::string to_text(double v) { return vmkl::harness::format_double(v); }
  static std::string to_text(std::uint64_t v) { return std::to_string(v); }
};

struct Common
{
  std::vector<std::string> config_files;
  std::vector<std::string> sets;
  std::string output_dir;
  std::size_t threads = 0;
  bool threads_given = false;
};

void add_common(CLI::App* app, Common& common)
{
  app->add_option("--config", common.config_files, "key = value config file (repeatable, later files win)")
    ->check(CLI::ExistingFile);
  app->add_option("--set", common.sets, "extra key=value override (repeatable)");
  app->add_option("--output-dir", common.output_dir, "directory for <name>.json, .csv and .trials.jsonl");
  app->add_option_function<std::size_t>(
    "--threads",
    [&common](const std::size_t& t) {
      common.threads = t;
      common.threads_given = true;
    },
    "worker threads (0 = all cores)");
}

Config resolve(const Common& common, const Overrides& overrides)
{
  Config config;
  for (const auto& path : common.config_files)
    config.merge(Config::load(path));
  for (const auto& kv : common.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    Config one = Config::parse(kv);
    config.merge(one);
  }
  for (const auto& [k, v] : overrides.values)
    config.set(k, v);
  if (common.threads_given)
    config.set("threads", static_cast<std::int64_t>(common.threads));
  return config;
}

int emit(const ExperimentReport& report, const Common& common, bool trials_to_stdout)
{
  if (!common.output_dir.empty())
    vmkl::harness::write_report(report, common.output_dir);
  // A dry run has no trials; its summary is the result.
  if (trials_to_stdout && !report.trials.empty()) {
    for (const auto& t : report.trials)
      std::cout << t.dump() << '\n';
    std::cout << report.csv;
  } else {
    std::cout << report.summary.dump(2) << '\n';
  }
  std::cout.flush();
  return report.passed ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Von Mises KL estimation, closeness testing and two-variable causal discovery"};
  app.require_subcommand(1);

  struct Command
  {
    CLI::App* app;
    Common common;
    Overrides overrides;
    ExperimentReport (*run)(const Config&);
    bool trials_to_stdout = false;
  };
  std::vector<Command> commands;
  commands.reserve(6);

  auto make = [&](const std::string& name, const std::string& help, ExperimentReport (*run)(const Config&)) -> Command& {
    commands.push_back({app.add_subcommand(name, help), {}, {}, run});
    Command& c = commands.back();
    add_common(c.app, c.common);
    return c;
  };

  {
    Command& c = make("estimate-kl", "estimate KL on a reference pair", vmkl::harness::run_estimate);
    c.overrides.bind<std::string>(c.app, "--pair", "pair", "reference pair name");
    c.overrides.bind<std::uint64_t>(c.app, "--n", "n", "samples from p");
    c.overrides.bind<std::uint64_t>(c.app, "--m", "m", "samples from q");
    c.overrides.bind<std::uint64_t>(c.app, "--dim", "dim", "dimension");
    c.overrides.bind<double>(c.app, "--beta", "beta", "smoothness");
    c.overrides.bind<std::string>(c.app, "--estimator", "estimator", "vm, plugin, oracle or all");
    c.overrides.bind<std::uint64_t>(c.app, "--seed", "seed", "seed");
  }
  {
    Command& c = make("closeness-test", "empirical error rates of the closeness test", vmkl::harness::run_closeness_check);
    c.overrides.bind<double>(c.app, "--epsilon", "epsilon", "separation");
    c.overrides.bind<double>(c.app, "--delta", "delta", "error budget");
    c.overrides.bind<double>(c.app, "--beta", "beta", "smoothness");
    c.overrides.bind<std::uint64_t>(c.app, "--dim", "dim", "dimension");
    c.overrides.bind<double>(c.app, "--kappa", "kappa", "sample-size constant");
    c.overrides.bind<std::uint64_t>(c.app, "--seed", "seed", "seed");
    c.overrides.bind<std::uint64_t>(c.app, "--trials", "trials", "trials per hypothesis");
  }
  {
    Command& c = make("calibrate", "find the smallest kappa meeting the error budget", vmkl::harness::run_test_calibration);
    c.overrides.bind<double>(c.app, "--epsilon", "epsilon", "separation");
    c.overrides.bind<double>(c.app, "--delta", "delta", "error budget");
    c.overrides.bind<double>(c.app, "--kappa-max", "kappa_max", "largest kappa tried");
    c.overrides.bind<std::uint64_t>(c.app, "--seed", "seed", "seed");
    c.overrides.bind<std::uint64_t>(c.app, "--trials", "trials", "trials per hypothesis");
  }
  {
    Command& c = make("discover", "structure identification experiment", vmkl::harness::run_discovery_experiment);
    c.trials_to_stdout = true;
    c.overrides.bind<std::string>(c.app, "--structure-under-test", "structures", "AtoB, BtoA, Confounded or a comma list");
    c.overrides.bind<std::string>(c.app, "--mode", "mode", "withObs or intervOnly");
    c.overrides.bind<std::string>(c.app, "--epsilon", "epsilons", "separation (comma list for a sweep)");
    c.overrides.bind<double>(c.app, "--c", "c", "confidence parameter");
    c.overrides.bind<std::uint64_t>(c.app, "--replicates", "replicates", "odd replicate count for the median trick");
    c.overrides.bind<std::uint64_t>(c.app, "--seed", "seed", "seed");
    c.overrides.bind<std::uint64_t>(c.app, "--budget", "budget", "cap on samples of all kinds per discovery run (0 = none)");
    c.overrides.bind<std::uint64_t>(c.app, "--trials", "trials", "trials per structure");
  }
  {
    Command& c = make("rates", "error against sample size sweep", vmkl::harness::run_rate_experiment);
    c.overrides.bind<std::string>(c.app, "--pair", "pair", "reference pair name");
    c.overrides.bind<std::string>(c.app, "--n-grid", "n_grid", "comma list of sample sizes");
    c.overrides.bind<std::uint64_t>(c.app, "--replicates", "replicates", "seeds per sample size");
    c.overrides.bind<std::uint64_t>(c.app, "--seed", "seed", "seed");
  }
  {
    Command& c = make("scm-dump", "describe a synthetic model", vmkl::harness::run_scm_dump);
    c.overrides.bind<std::string>(c.app, "--structure", "structure", "AtoB, BtoA or Confounded");
    c.overrides.bind<std::uint64_t>(c.app, "--dim", "dim", "dimension");
    c.overrides.bind<std::uint64_t>(c.app, "--seed", "seed", "model seed");
    c.overrides.bind<std::uint64_t>(c.app, "--samples", "samples", "joint samples written to the CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    for (auto& c : commands) {
      if (!c.app->parsed())
        continue;
      const Config config = resolve(c.common, c.overrides);
      return emit(c.run(config), c.common, c.trials_to_stdout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
