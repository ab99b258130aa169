// Microbenchmarks for the numerical hot paths: the separable and stacked
// filters, one simulation-smoother pass, and one full Gibbs iteration at the
// scale of the synthetic study (d=2, trend + weekly seasonal, t* = 366).

#include <benchmark/benchmark.h>

#include "mbsts/components.hpp"
#include "mbsts/gibbs.hpp"
#include "mbsts/priors.hpp"
#include "mbsts/simulation_study.hpp"
#include "mbsts/statespace.hpp"

namespace {

using namespace mbsts;

struct Fixture {
  StateSpaceSystem system;
  Matrix y;
  StackedModel stacked;

  static Fixture make() {
    SimulationDesign design = default_simulation_design();
    Rng rng = make_rng(7);
    auto data = generate_synthetic_panel(design, {1.0, 1.0}, rng);
    StateSpaceSystem sys = assemble_system(
        {LocalLevelTrend{3.0}, Seasonal{7, 2.0}}, 2, design.sigma, 1.0);
    Matrix y = data.panel.pre_outcomes();
    std::vector<Matrix> sigma_r = {3.0 * design.sigma, 2.0 * design.sigma};
    StackedModel stacked(sys, design.sigma, sigma_r, &design.sigma);
    return Fixture{std::move(sys), std::move(y), std::move(stacked)};
  }
};

void BM_SeparableFilter(benchmark::State& state) {
  const Fixture f = Fixture::make();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kalman_filter(f.system, f.y).loglik);
  }
}
BENCHMARK(BM_SeparableFilter);

void BM_StackedFilter(benchmark::State& state) {
  const Fixture f = Fixture::make();
  for (auto _ : state) {
    benchmark::DoNotOptimize(stacked_filter(f.stacked, f.y).loglik);
  }
}
BENCHMARK(BM_StackedFilter);

void BM_SimulationSmoother(benchmark::State& state) {
  const Fixture f = Fixture::make();
  Rng rng = make_rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        stacked_simulation_smoother(f.stacked, f.y, nullptr, rng, true).sum());
  }
}
BENCHMARK(BM_SimulationSmoother);

void BM_GibbsIteration(benchmark::State& state) {
  SimulationDesign design = default_simulation_design();
  Rng rng = make_rng(7);
  auto data = generate_synthetic_panel(design, {1.0, 1.0}, rng);
  PriorConfig prior = default_priors(data.panel, -0.8, 0.2, 0.2);
  prior.g = design.t_star();
  const std::vector<ComponentSpec> specs = {LocalLevelTrend{}, Seasonal{7, 1.0},
                                            Regression{2, SelectionMode::kSpikeSlab}};
  // Amortizes setup across iterations: one retained draw per sampler call.
  McmcConfig config;
  config.niter = 1;
  config.burn_in = 0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    config.seed = seed++;
    benchmark::DoNotOptimize(run_gibbs(data.panel, specs, prior, config).size());
  }
}
BENCHMARK(BM_GibbsIteration);

}  // namespace

BENCHMARK_MAIN();
