// Command line interface: model fitting, causal-effect estimation,
// posterior predictive checks, synthetic-data generation, the coverage
// study, DTW control pre-selection, and prior sensitivity sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mbsts/config.hpp"
#include "mbsts/csv.hpp"
#include "mbsts/dtw.hpp"
#include "mbsts/panel.hpp"
#include "mbsts/pipeline.hpp"
#include "mbsts/simulation_study.hpp"

namespace {

using namespace mbsts;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  int threads = 0;
};

RunConfig load_config_with_overrides(const CommonOptions& options) {
  RunConfig config = load_run_config(options.config_path);
  if (options.seed) config.mcmc.seed = *options.seed;
  if (options.output_dir) config.output_dir = *options.output_dir;
  if (options.threads > 0) config.threads = options.threads;
  return config;
}

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("-c,--config", options.config_path, "JSON run configuration")->required();
  cmd->add_option("--seed", options.seed, "Override the configured MCMC seed");
  cmd->add_option("--output-dir", options.output_dir, "Override the configured output directory");
  cmd->add_option("--threads", options.threads,
                  "Worker threads (0: MBSTS_THREADS env var or hardware)");
}

void report_outputs(const PipelineResult& result) {
  for (const auto& file : result.output_files) std::cout << file << "\n";
}

std::vector<double> parse_grid(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string field =
        csv.substr(pos, comma == std::string::npos ? csv.size() - pos : comma - pos);
    if (!field.empty()) out.push_back(parse_double(field, what));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw invalid_argument(what + ": empty grid");
  return out;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Multivariate Bayesian structural time-series causal inference"};
  app.require_subcommand(1);

  // fit: full pipeline (sampler, effects, diagnostics, manifest).
  CommonOptions fit_options;
  CLI::App* fit = app.add_subcommand("fit", "Fit each pair and emit the full artifact set");
  add_common(fit, fit_options);

  // effects: recompute effect tables from stored draws.
  CommonOptions effects_options;
  CLI::App* effects = app.add_subcommand("effects", "Recompute effect tables from stored draws");
  add_common(effects, effects_options);

  // ppc: recompute posterior predictive checks from stored draws.
  CommonOptions ppc_options;
  CLI::App* ppc =
      app.add_subcommand("ppc", "Recompute posterior predictive checks from stored draws");
  add_common(ppc, ppc_options);

  // simulate: write one synthetic panel plus its untreated truth.
  std::string sim_output = "synthetic";
  double factor1 = 1.0, factor2 = 1.0;
  std::uint64_t sim_seed = 1;
  double sim_level = 100.0;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic panel and its truth");
  simulate->add_option("--output", sim_output, "Output directory");
  simulate->add_option("--factor1", factor1, "Multiplicative post-period factor on series 1");
  simulate->add_option("--factor2", factor2, "Multiplicative post-period factor on series 2");
  simulate->add_option("--seed", sim_seed, "Generator seed");
  simulate->add_option("--initial-level", sim_level, "Starting trend level for both series");

  // coverage-study: the synthetic frequentist-performance table.
  std::string study_output = "coverage.csv";
  int study_datasets = 200, study_niter = 1000, study_threads = 0;
  std::uint64_t study_seed = 0;
  bool m2_drop_regression = false;
  CLI::App* study = app.add_subcommand("coverage-study",
                                       "Interval length / error / coverage / detection study");
  study->add_option("--output", study_output, "Report CSV path");
  study->add_option("--n-datasets", study_datasets, "Synthetic datasets per cell");
  study->add_option("--niter", study_niter, "Retained Gibbs draws per fit");
  study->add_option("--seed", study_seed, "Master seed (0: design default)");
  study->add_option("--threads", study_threads, "Worker threads");
  study->add_flag("--m2-drop-regression", m2_drop_regression,
                  "Fit M2 without the regression component");

  // dtw-select: rank candidate control series.
  std::string dtw_target, dtw_pool, dtw_output;
  std::string dtw_target_column;
  int dtw_top = 10, dtw_t_star = 0;
  CLI::App* dtw = app.add_subcommand("dtw-select", "Rank control candidates by DTW alignment");
  dtw->add_option("--target", dtw_target, "CSV holding the target series")->required();
  dtw->add_option("--target-column", dtw_target_column, "Target column name")->required();
  dtw->add_option("--pool", dtw_pool, "CSV of candidate series (every column is a candidate)")
      ->required();
  dtw->add_option("--top", dtw_top, "Number of candidates to keep");
  dtw->add_option("--t-star", dtw_t_star, "Pre-period rows to compare (0: all rows)");
  dtw->add_option("--output", dtw_output, "Ranked CSV (default: stdout)");

  // sweep: sensitivity analysis over prior hyperparameters.
  CommonOptions sweep_options;
  std::string grid_h = "1", grid_k = "1", grid_rho = "0", grid_sr = "1";
  CLI::App* sweep = app.add_subcommand("sweep", "Prior sensitivity sweep");
  add_common(sweep, sweep_options);
  sweep->add_option("--grid-h", grid_h, "Comma-separated grid for h");
  sweep->add_option("--grid-k", grid_k, "Comma-separated grid for k");
  sweep->add_option("--grid-rho", grid_rho, "Comma-separated grid for the prior correlation");
  sweep->add_option("--grid-sr", grid_sr, "Comma-separated grid of S_r multipliers");

  CLI11_PARSE(app, argc, argv);

  if (fit->parsed()) {
    report_outputs(run_pipeline(load_config_with_overrides(fit_options)));
    return kExitOk;
  }
  if (effects->parsed()) {
    PipelineStages stages;
    stages.fit = false;
    stages.ppc = false;
    report_outputs(run_pipeline(load_config_with_overrides(effects_options), stages));
    return kExitOk;
  }
  if (ppc->parsed()) {
    PipelineStages stages;
    stages.fit = false;
    stages.effects = false;
    report_outputs(run_pipeline(load_config_with_overrides(ppc_options), stages));
    return kExitOk;
  }
  if (simulate->parsed()) {
    SimulationDesign design = default_simulation_design();
    design.initial_level = Vector::Constant(2, sim_level);
    Rng rng = make_rng(sim_seed);
    const SyntheticPanel data = generate_synthetic_panel(design, {factor1, factor2}, rng);
    std::filesystem::create_directories(sim_output);
    const std::string panel_path = sim_output + "/panel.csv";
    write_panel_csv(panel_path, data.panel);
    TimeSeriesPanel truth = data.panel;
    truth.Y = data.counterfactual;
    truth.X.resize(truth.n(), 0);
    truth.covariate_names.clear();
    truth.frozen.clear();
    const std::string truth_path = sim_output + "/truth.csv";
    write_panel_csv(truth_path, truth);
    std::cout << panel_path << "\n" << truth_path << "\n";
    return kExitOk;
  }
  if (study->parsed()) {
    SimulationDesign design = default_simulation_design();
    design.n_datasets = study_datasets;
    design.mcmc.niter = study_niter;
    if (study_seed != 0) design.mcmc.seed = study_seed;
    design.m2_keep_regression = !m2_drop_regression;
    const CoverageReport report = run_coverage_study(design, resolve_threads(study_threads));
    write_coverage_report(study_output, report);
    std::cout << study_output << "\n";
    return kExitOk;
  }
  if (dtw->parsed()) {
    const CsvTable target_table = read_csv(dtw_target);
    const CsvTable pool_table = read_csv(dtw_pool);
    const int target_col = target_table.require_col(dtw_target_column);
    const int rows = dtw_t_star > 0
                         ? std::min<int>(dtw_t_star, static_cast<int>(target_table.rows.size()))
                         : static_cast<int>(target_table.rows.size());
    Vector target(rows);
    for (int i = 0; i < rows; ++i) {
      target[i] = parse_double(target_table.rows[i][target_col], "target");
    }
    std::vector<Vector> pool;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < pool_table.header.size(); ++c) {
      if (pool_table.header[c] == "date") continue;
      if (static_cast<int>(pool_table.rows.size()) < rows) {
        throw invalid_argument("dtw-select: pool has fewer rows than the target window");
      }
      Vector series(rows);
      for (int i = 0; i < rows; ++i) series[i] = parse_double(pool_table.rows[i][c], "pool");
      pool.push_back(std::move(series));
      names.push_back(pool_table.header[c]);
    }
    const DtwRanking ranking = dtw_preselect_controls(target, pool, dtw_top);
    CsvTable out;
    out.header = {"rank", "name", "pool_index", "dtw_cost"};
    for (std::size_t i = 0; i < ranking.indices.size(); ++i) {
      out.rows.push_back({std::to_string(i + 1), names[ranking.indices[i]],
                          std::to_string(ranking.indices[i]), format_double(ranking.costs[i])});
    }
    if (dtw_output.empty()) {
      std::cout << csv_to_string(out);
    } else {
      write_csv(dtw_output, out);
      std::cout << dtw_output << "\n";
    }
    return kExitOk;
  }
  if (sweep->parsed()) {
    SweepGrid grid;
    grid.h = parse_grid(grid_h, "--grid-h");
    grid.k = parse_grid(grid_k, "--grid-k");
    grid.rho = parse_grid(grid_rho, "--grid-rho");
    grid.sr_multiplier = parse_grid(grid_sr, "--grid-sr");
    std::cout << sensitivity_sweep(load_config_with_overrides(sweep_options), grid) << "\n";
    return kExitOk;
  }
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
