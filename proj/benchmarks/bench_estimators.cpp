#include "vmkl/analytic_density.hpp"
#include "vmkl/divergence.hpp"
#include "vmkl/kernel_density.hpp"
#include "vmkl/random.hpp"
#include "vmkl/scm.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

const vmkl::DomainBox kBox = vmkl::DomainBox::cube(1, -3.0, 3.0);

vmkl::PointSet gaussian_samples(std::size_t n, double mu, std::uint64_t seed)
{
  vmkl::Rng rng(seed);
  return vmkl::AnalyticDensity::truncated_gaussian(kBox, {mu}, {1.0}).sample(rng, n);
}

// Evaluation of a 1-D fit: prefix sums (low-degree kernels) vs the direct sum.
void BM_KdeEval(benchmark::State& state, bool direct)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto fit = vmkl::kde_fit(gaussian_samples(n, 0.0, 1), vmkl::make_kernel(static_cast<int>(state.range(1)), 1),
                                 vmkl::bandwidth_rule(n, 2.0, 1, 2.0), kBox, 1e-3);
  vmkl::Rng rng(2);
  for (auto _ : state) {
    const double x[1] = {rng.uniform(-3.0, 3.0)};
    benchmark::DoNotOptimize(direct ? fit.raw_direct(x) : fit.raw(x));
  }
  state.SetLabel(fit.uses_prefix_sums() && !direct ? "prefix" : direct ? "direct" : "window");
}
BENCHMARK_CAPTURE(BM_KdeEval, fast, false)->ArgsProduct({{1024, 8192, 65536}, {1, 4}});
BENCHMARK_CAPTURE(BM_KdeEval, direct, true)->ArgsProduct({{1024, 8192}, {1}});

void BM_KdeEval2d(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto box = vmkl::DomainBox::cube(2, -3.0, 3.0);
  vmkl::Rng rng(3);
  const auto samples = vmkl::AnalyticDensity::truncated_gaussian(box, {0.0, 0.0}, {1.0, 1.0}).sample(rng, n);
  const auto fit = vmkl::kde_fit(samples, vmkl::make_kernel(1, 2), vmkl::bandwidth_rule(n, 2.0, 2, 2.0), box, 1e-3);
  for (auto _ : state) {
    const double x[2] = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    benchmark::DoNotOptimize(fit(x));
  }
}
BENCHMARK(BM_KdeEval2d)->Arg(1024)->Arg(8192);

void BM_VonMises(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto xp = gaussian_samples(n, 0.0, 4);
  const auto xq = gaussian_samples(n, 0.5, 5);
  const auto kernel = vmkl::make_kernel(1, 1);
  vmkl::EstimatorOptions o;
  o.bandwidth_scale = 2.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(vmkl::vm_estimate(xp, xq, kernel, kBox, o).value);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n));
}
BENCHMARK(BM_VonMises)->RangeMultiplier(4)->Range(512, 32768)->Unit(benchmark::kMicrosecond);

void BM_PlugIn(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto xp = gaussian_samples(n, 0.0, 4);
  const auto xq = gaussian_samples(n, 0.5, 5);
  const auto kernel = vmkl::make_kernel(1, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(vmkl::plugin_estimate(xp, xq, kernel, kBox, vmkl::EstimatorOptions{}).value);
}
BENCHMARK(BM_PlugIn)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_ScmInterventional(benchmark::State& state)
{
  auto scm = std::make_shared<const vmkl::ScmInstance>(vmkl::make_scm(vmkl::Structure::AtoB, 1, 12.0, 1));
  vmkl::SamplingOracle oracle(scm, 1, 0);
  const double a[1] = {0.4};
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle.sample_interventional(vmkl::Variable::A, a, count).size());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}
BENCHMARK(BM_ScmInterventional)->Arg(4096)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
