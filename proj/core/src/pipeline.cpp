#include "mbsts/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mbsts/draws_io.hpp"
#include "mbsts/forecast.hpp"
#include "mbsts/parallel.hpp"
#include "mbsts/priors.hpp"

namespace mbsts {

namespace {

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char ch : id) {
    out.push_back(std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
  }
  return out.empty() ? "pair" : out;
}

PriorConfig build_prior(const TimeSeriesPanel& panel, const PriorSettings& settings) {
  PriorConfig prior = default_priors(panel, settings.rho, settings.h, settings.k);
  prior.g = settings.g;
  prior.pi = settings.pi;
  prior.S_r = settings.sr_multiplier * prior.S_eps;
  return prior;
}

std::string series_name(const TimeSeriesPanel& panel, int j) {
  return j < static_cast<int>(panel.outcome_names.size()) ? panel.outcome_names[j]
                                                          : "y" + std::to_string(j + 1);
}

}  // namespace

namespace {

void complete_pair(PairFit& fit, const ModelConfig& model, int kmax) {
  const TimeSeriesPanel& panel = fit.panel;
  if (panel.post_length() < kmax) {
    throw invalid_argument("pipeline: post-period has " + std::to_string(panel.post_length()) +
                           " rows, horizon needs " + std::to_string(kmax));
  }
  const std::vector<ComponentSpec> specs = model.component_specs(panel.num_covariates());
  fit.structure = assemble_system(specs, panel.d(), Matrix::Identity(panel.d(), panel.d()), 1.0);
  const Matrix x_future = panel.X.middleRows(panel.t_star, kmax);
  fit.counterfactual =
      forecast_counterfactual(fit.draws, fit.structure, x_future, kmax, fit.forecast_seed);
  fit.effects =
      effect_draws(panel.Y.middleRows(panel.t_star, kmax), fit.counterfactual, panel.t_star);
  fit.effects.assignment = "(observed)";
  fit.effects.baseline = assignment_label(std::vector<int>(panel.d(), 0));
}

}  // namespace

PairFit fit_pair(const TimeSeriesPanel& panel, const ModelConfig& model,
                 const PriorSettings& prior_settings, const McmcSettings& mcmc, int kmax,
                 std::uint64_t chain_seed, std::uint64_t forecast_seed, bool store_states) {
  panel.validate();
  PairFit fit;
  fit.group_id = panel.group_id;
  fit.panel = panel;
  fit.chain_seed = chain_seed;
  fit.forecast_seed = forecast_seed;

  const std::vector<ComponentSpec> specs = model.component_specs(panel.num_covariates());
  const PriorConfig prior = build_prior(panel, prior_settings);
  McmcConfig config;
  config.niter = mcmc.niter;
  config.burn_in = mcmc.burn_in;
  config.seed = chain_seed;
  config.store_states = store_states;

  fit.draws = run_gibbs(panel, specs, prior, config);
  complete_pair(fit, model, kmax);
  return fit;
}

PipelineResult run_pipeline(const RunConfig& config, const PipelineStages& stages) {
  validate_run_config(config);
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const auto out_path = [&](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };

  const int kmax = config.horizons.back();
  const int num_pairs = static_cast<int>(config.pairs.size());
  const Rng seed_stream = make_rng(config.mcmc.seed);

  // Load panels up front so validation errors precede any computation.
  std::vector<TimeSeriesPanel> panels;
  panels.reserve(num_pairs);
  for (const auto& pair : config.pairs) {
    panels.push_back(load_panel_csv(pair.path, pair.schema, pair.group_id));
  }

  std::vector<PairFit> fits(num_pairs);
  parallel_for(num_pairs, resolve_threads(config.threads), [&](int i) {
    const std::uint64_t chain_seed = seed_stream.substream(2 * i + 1).seed();
    const std::uint64_t forecast_seed = seed_stream.substream(2 * i + 2).seed();
    if (stages.fit) {
      fits[i] = fit_pair(panels[i], config.model, config.prior, config.mcmc, kmax, chain_seed,
                         forecast_seed, /*store_states=*/true);
    } else {
      PairFit fit;
      fit.group_id = panels[i].group_id;
      fit.panel = panels[i];
      fit.chain_seed = chain_seed;
      fit.forecast_seed = forecast_seed;
      const std::string draws_file =
          (fs::path(config.output_dir) / ("draws_" + sanitize_id(fit.group_id) + ".bin")).string();
      fit.draws = load_draws(draws_file);
      complete_pair(fit, config.model, kmax);
      fits[i] = std::move(fit);
    }
  });

  PipelineResult result;

  // --- Effect tables -------------------------------------------------------
  if (stages.effects) {
  CsvTable effects;
  effects.header = {"pair", "horizon_days", "series", "mean", "lower_2.5", "upper_97.5",
                    "significant"};
  for (const auto& fit : fits) {
    const EffectSummary summary = summarize_paths(fit.effects.temporal_average, config.horizons);
    result.pair_summaries.push_back(summary);
    for (const auto& row : summary.rows) {
      effects.rows.push_back({fit.group_id, std::to_string(row.horizon),
                              series_name(fit.panel, row.series), format_double(row.mean),
                              format_double(row.lower), format_double(row.upper),
                              row.significant ? "1" : "0"});
    }
  }
  write_csv(out_path("effects.csv"), effects);
  result.output_files.push_back(out_path("effects.csv"));

  // Pointwise effect paths with bands plus observed vs counterfactual.
  CsvTable pointwise;
  pointwise.header = {"pair", "date", "series", "mean", "lower_2.5", "upper_97.5"};
  CsvTable ovc;
  ovc.header = {"pair", "date", "series", "observed", "cf_mean", "cf_lower_2.5", "cf_upper_97.5"};
  std::vector<int> all_horizons(kmax);
  for (int h = 1; h <= kmax; ++h) all_horizons[h - 1] = h;
  for (const auto& fit : fits) {
    const EffectSummary pw = summarize_paths(fit.effects.pointwise, all_horizons);
    const EffectSummary cf = summarize_paths(fit.counterfactual, all_horizons);
    for (size_t idx = 0; idx < pw.rows.size(); ++idx) {
      const auto& row = pw.rows[idx];
      const std::string date = fit.panel.dates[fit.panel.t_star + row.horizon - 1].to_string();
      pointwise.rows.push_back({fit.group_id, date, series_name(fit.panel, row.series),
                                format_double(row.mean), format_double(row.lower),
                                format_double(row.upper)});
      const auto& cfr = cf.rows[idx];
      const double observed =
          fit.panel.Y(fit.panel.t_star + row.horizon - 1, row.series);
      ovc.rows.push_back({fit.group_id, date, series_name(fit.panel, row.series),
                          format_double(observed), format_double(cfr.mean),
                          format_double(cfr.lower), format_double(cfr.upper)});
    }
  }
  write_csv(out_path("effects_pointwise.csv"), pointwise);
  write_csv(out_path("observed_vs_counterfactual.csv"), ovc);
  result.output_files.push_back(out_path("effects_pointwise.csv"));
  result.output_files.push_back(out_path("observed_vs_counterfactual.csv"));

  // --- Meta-analysis across pairs ------------------------------------------
  {
    std::vector<EffectDraws> pooled_input;
    pooled_input.reserve(num_pairs);
    for (const auto& fit : fits) pooled_input.push_back(fit.effects);
    const EffectDraws pooled = meta_analysis_summary(pooled_input);
    result.meta_summary = summarize_paths(pooled.temporal_average, config.horizons);
    CsvTable meta;
    meta.header = {"horizon_days", "series", "mean", "lower_2.5", "upper_97.5", "significant"};
    for (const auto& row : result.meta_summary.rows) {
      meta.rows.push_back({std::to_string(row.horizon), series_name(fits[0].panel, row.series),
                           format_double(row.mean), format_double(row.lower),
                           format_double(row.upper), row.significant ? "1" : "0"});
    }
    write_csv(out_path("meta_analysis.csv"), meta);
    result.output_files.push_back(out_path("meta_analysis.csv"));
  }
  }

  // --- Posterior predictive checks ------------------------------------------
  if (stages.ppc) {
  CsvTable pvals, density, residuals, qq, acf;
  pvals.header = {"pair", "series", "statistic", "p_value"};
  density.header = {"pair", "date", "series", "observed", "replicated_mean"};
  residuals.header = {"pair", "date", "series", "std_residual"};
  qq.header = {"pair", "series", "theoretical", "empirical"};
  acf.header = {"pair", "series", "lag", "acf", "band"};
  for (int i = 0; i < num_pairs; ++i) {
    const PairFit& fit = fits[i];
    const std::uint64_t replicate_seed = seed_stream.substream(1000 + i).seed();
    const PathDraws replicates = replicate_insample(
        fit.draws, fit.structure, fit.panel.pre_covariates(), replicate_seed);
    PpcOptions options;
    options.max_lag = config.ppc_max_lag;
    if (config.ppc_extra_statistics) {
      options.statistics = {TestStatistic::kMax, TestStatistic::kMean, TestStatistic::kStdDev};
    }
    const PpcReport report = ppc_report(fit.panel.pre_outcomes(), replicates, options);
    for (int j = 0; j < fit.panel.d(); ++j) {
      for (const auto& [stat, p] : report.p_values[j]) {
        pvals.rows.push_back({fit.group_id, series_name(fit.panel, j), stat, format_double(p)});
      }
      for (int t = 0; t < fit.panel.t_star; ++t) {
        const std::string date = fit.panel.dates[t].to_string();
        density.rows.push_back({fit.group_id, date, series_name(fit.panel, j),
                                format_double(report.observed(t, j)),
                                format_double(report.replicated_mean(t, j))});
        residuals.rows.push_back({fit.group_id, date, series_name(fit.panel, j),
                                  format_double(report.standardized_residuals(t, j))});
        qq.rows.push_back({fit.group_id, series_name(fit.panel, j),
                           format_double(report.qq[j](t, 0)), format_double(report.qq[j](t, 1))});
      }
      for (int lag = 0; lag <= config.ppc_max_lag; ++lag) {
        acf.rows.push_back({fit.group_id, series_name(fit.panel, j), std::to_string(lag),
                            format_double(report.acf(lag, j)), format_double(report.acf_band)});
      }
    }
  }
  write_csv(out_path("ppc_pvalues.csv"), pvals);
  write_csv(out_path("ppc_density.csv"), density);
  write_csv(out_path("ppc_residuals.csv"), residuals);
  write_csv(out_path("ppc_qq.csv"), qq);
  write_csv(out_path("ppc_acf.csv"), acf);
  for (const char* name : {"ppc_pvalues.csv", "ppc_density.csv", "ppc_residuals.csv",
                           "ppc_qq.csv", "ppc_acf.csv"}) {
    result.output_files.push_back(out_path(name));
  }

  // --- Convergence diagnostics ----------------------------------------------
  CsvTable geweke;
  geweke.header = {"pair", "parameter", "z", "p"};
  for (const auto& fit : fits) {
    if (fit.draws.size() < 100) continue;  // diagnostic needs a real chain
    const auto block_names = disturbance_block_names(fit.structure);
    for (const auto& chain : covariance_chains(fit.draws, block_names)) {
      const GewekeResult g = geweke_diagnostic(chain.values);
      geweke.rows.push_back(
          {fit.group_id, chain.name, format_double(g.z), format_double(g.p)});
    }
  }
  write_csv(out_path("geweke.csv"), geweke);
  result.output_files.push_back(out_path("geweke.csv"));
  }

  // --- Serialized draws and manifest ----------------------------------------
  if (!stages.fit) return result;
  nlohmann::json manifest;
  manifest["config"] = nlohmann::json::parse(canonical_config_json(config));
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  manifest["config_hash"] = hash_hex;
  nlohmann::json pair_meta = nlohmann::json::array();
  for (const auto& fit : fits) {
    const std::string draws_file = "draws_" + sanitize_id(fit.group_id) + ".bin";
    save_draws(out_path(draws_file), fit.draws);
    result.output_files.push_back(out_path(draws_file));
    pair_meta.push_back({{"group_id", fit.group_id},
                         {"chain_seed", fit.chain_seed},
                         {"forecast_seed", fit.forecast_seed},
                         {"draws_file", draws_file}});
  }
  manifest["pairs"] = pair_meta;
  {
    nlohmann::json names = nlohmann::json::array();
    for (const auto& file : result.output_files) {
      names.push_back(fs::path(file).filename().string());
    }
    names.push_back("manifest.json");
    manifest["outputs"] = names;
  }
  std::ofstream manifest_out(out_path("manifest.json"), std::ios::binary);
  manifest_out << manifest.dump(2) << "\n";
  result.output_files.push_back(out_path("manifest.json"));
  return result;
}

std::string sensitivity_sweep(const RunConfig& base, const SweepGrid& grid) {
  validate_run_config(base);
  if (grid.h.empty() || grid.k.empty() || grid.rho.empty() || grid.sr_multiplier.empty()) {
    throw invalid_argument("sensitivity_sweep: empty grid dimension");
  }
  for (double v : grid.h) {
    if (v <= 0) throw invalid_argument("sensitivity_sweep: h must be positive");
  }
  for (double v : grid.k) {
    if (v <= 0) throw invalid_argument("sensitivity_sweep: k must be positive");
  }
  for (double v : grid.rho) {
    if (!(std::abs(v) < 1)) throw invalid_argument("sensitivity_sweep: |rho| < 1 required");
  }
  for (double v : grid.sr_multiplier) {
    if (v <= 0) throw invalid_argument("sensitivity_sweep: S_r multiplier must be positive");
  }

  namespace fs = std::filesystem;
  fs::create_directories(base.output_dir);
  const int kmax = base.horizons.back();

  std::vector<TimeSeriesPanel> panels;
  for (const auto& pair : base.pairs) {
    panels.push_back(load_panel_csv(pair.path, pair.schema, pair.group_id));
  }

  struct GridPoint {
    double h, k, rho, sr;
  };
  std::vector<GridPoint> points;
  for (double h : grid.h) {
    for (double k : grid.k) {
      for (double rho : grid.rho) {
        for (double sr : grid.sr_multiplier) points.push_back({h, k, rho, sr});
      }
    }
  }

  const Rng seed_stream = make_rng(base.mcmc.seed);
  const int num_pairs = static_cast<int>(panels.size());
  struct SweepRow {
    GridPoint point;
    std::string pair;
    EffectSummary summary;
  };
  std::vector<SweepRow> rows(points.size() * num_pairs);

  parallel_for(static_cast<int>(rows.size()), resolve_threads(base.threads), [&](int idx) {
    const int point_idx = idx / num_pairs;
    const int pair_idx = idx % num_pairs;
    const GridPoint& point = points[point_idx];
    PriorSettings prior = base.prior;
    prior.h = point.h;
    prior.k = point.k;
    prior.rho = point.rho;
    prior.sr_multiplier = point.sr;
    // Identical seeds across grid points: differences are attributable to the
    // prior alone.
    const std::uint64_t chain_seed = seed_stream.substream(2 * pair_idx + 1).seed();
    const std::uint64_t forecast_seed = seed_stream.substream(2 * pair_idx + 2).seed();
    const PairFit fit = fit_pair(panels[pair_idx], base.model, prior, base.mcmc, kmax, chain_seed,
                                 forecast_seed, /*store_states=*/false);
    rows[idx] = {point, fit.group_id, summarize_paths(fit.effects.temporal_average, base.horizons)};
  });

  CsvTable table;
  table.header = {"h",    "k",     "rho",  "sr_multiplier", "pair",        "horizon_days",
                  "series", "mean", "lower_2.5", "upper_97.5",  "significant"};
  for (const auto& row : rows) {
    for (const auto& s : row.summary.rows) {
      table.rows.push_back({format_double(row.point.h), format_double(row.point.k),
                            format_double(row.point.rho), format_double(row.point.sr), row.pair,
                            std::to_string(s.horizon),
                            series_name(panels[0], s.series), format_double(s.mean),
                            format_double(s.lower), format_double(s.upper),
                            s.significant ? "1" : "0"});
    }
  }
  const std::string path = (fs::path(base.output_dir) / "sweep.csv").string();
  write_csv(path, table);
  return path;
}

}  // namespace mbsts
