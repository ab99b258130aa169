#ifndef MBSTS_PIPELINE_HPP_
#define MBSTS_PIPELINE_HPP_

#include <string>
#include <vector>

#include "mbsts/config.hpp"
#include "mbsts/effects.hpp"
#include "mbsts/geweke.hpp"
#include "mbsts/gibbs.hpp"
#include "mbsts/ppc.hpp"

namespace mbsts {

// Per-group fit products shared by the pipeline and the sensitivity sweep.
struct PairFit {
  std::string group_id;
  TimeSeriesPanel panel;
  StateSpaceSystem structure;
  McmcDraws draws;
  PathDraws counterfactual;  // draws x kmax x d
  EffectDraws effects;       // observed post-period vs counterfactual
  std::uint64_t chain_seed = 0;
  std::uint64_t forecast_seed = 0;
};

PairFit fit_pair(const TimeSeriesPanel& panel, const ModelConfig& model,
                 const PriorSettings& prior_settings, const McmcSettings& mcmc, int kmax,
                 std::uint64_t chain_seed, std::uint64_t forecast_seed, bool store_states);

struct PipelineResult {
  std::vector<std::string> output_files;
  std::vector<EffectSummary> pair_summaries;  // temporal-average per pair
  EffectSummary meta_summary;                 // pooled across pairs
};

struct PipelineStages {
  bool fit = true;      // run the sampler (false: reuse draws_<pair>.bin in output_dir)
  bool effects = true;  // effect tables, plot data, meta-analysis
  bool ppc = true;      // posterior predictive checks and convergence table
};

// Full per-config run: fit each pair, forecast the counterfactual, emit
// effect tables (temporal average at the configured horizons), plot data,
// posterior predictive checks, convergence diagnostics, the meta-analysis
// summary, serialized draws, and a manifest with seeds and the config hash.
// Reruns with the identical config are byte-identical.
PipelineResult run_pipeline(const RunConfig& config, const PipelineStages& stages = {});

struct SweepGrid {
  std::vector<double> h = {1.0};
  std::vector<double> k = {1.0};
  std::vector<double> rho = {0.0};
  std::vector<double> sr_multiplier = {1.0};
};

// Refits every pair under the cross product of the grid, with the same seed
// at every point so differences are attributable to the priors. Writes one
// stacked effect-summary table tagged by hyperparameters.
std::string sensitivity_sweep(const RunConfig& base, const SweepGrid& grid);

}  // namespace mbsts

#endif  // MBSTS_PIPELINE_HPP_
