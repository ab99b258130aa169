#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mbsts/pipeline.hpp"
#include "mbsts/simulation_study.hpp"
#include "support.hpp"

using namespace mbsts;
using mbsts::testing::scratch_dir;

namespace {

// A small synthetic two-pair setup written to disk; returns the config.
RunConfig small_config(const std::string& dir, int num_pairs = 1) {
  SimulationDesign design = default_simulation_design();
  design.start = Date{2021, 1, 1};
  design.intervention = Date{2021, 5, 1};
  design.end = Date{2021, 5, 31};
  design.initial_level = Vector::Constant(2, 50.0);
  design.horizons = {7, 14, 30};
  design.mcmc.niter = 150;
  design.mcmc.burn_in = 30;
  design.prior.g = design.t_star();

  RunConfig config;
  for (int i = 0; i < num_pairs; ++i) {
    Rng rng = make_rng(100 + i);
    const SyntheticPanel data = generate_synthetic_panel(design, {1.3, 0.8}, rng);
    const std::string path = dir + "/pair" + std::to_string(i) + ".csv";
    write_panel_csv(path, data.panel);
    DataConfig pair;
    pair.group_id = "pair" + std::to_string(i);
    pair.path = path;
    pair.schema.date_column = "date";
    pair.schema.outcome_columns = data.panel.outcome_names;
    pair.schema.covariate_columns = data.panel.covariate_names;
    pair.schema.intervention_date = design.intervention;
    config.pairs.push_back(pair);
  }
  config.model.seasonal_period = 7;
  design.horizons = {7, 14, 30};
  config.prior = design.prior;
  config.mcmc = design.mcmc;
  config.mcmc.seed = 42;
  config.horizons = {7, 14, 30};
  config.ppc_max_lag = 10;
  config.output_dir = dir + "/out";
  config.threads = 2;
  return config;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("pipeline emits the full artifact set and is byte-identical on rerun") {
  const std::string dir = scratch_dir("pipeline");
  RunConfig config = small_config(dir, 2);

  const PipelineResult result = run_pipeline(config);
  REQUIRE(result.pair_summaries.size() == 2);
  for (const char* name :
       {"effects.csv", "effects_pointwise.csv", "observed_vs_counterfactual.csv",
        "meta_analysis.csv", "ppc_pvalues.csv", "ppc_density.csv", "ppc_residuals.csv",
        "ppc_qq.csv", "ppc_acf.csv", "geweke.csv", "manifest.json", "draws_pair0.bin",
        "draws_pair1.bin"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(config.output_dir) / name));
  }

  // Emitted tables parse back (round-trip property).
  const CsvTable effects = read_csv(config.output_dir + "/effects.csv");
  CHECK(effects.rows.size() == 2 * 3 * 2);  // pairs x horizons x series
  for (const auto& row : effects.rows) {
    CHECK(parse_double(row[3], "mean") == parse_double(row[3], "mean"));
  }
  const CsvTable geweke = read_csv(config.output_dir + "/geweke.csv");
  CHECK(geweke.rows.size() == 2 * (3 + 3 + 3));  // pairs x (obs + trend + seasonal entries)

  // Byte-identical rerun into a fresh directory.
  RunConfig rerun = config;
  rerun.output_dir = dir + "/out2";
  run_pipeline(rerun);
  for (const char* name :
       {"effects.csv", "effects_pointwise.csv", "observed_vs_counterfactual.csv",
        "meta_analysis.csv", "ppc_pvalues.csv", "ppc_qq.csv", "geweke.csv", "draws_pair0.bin",
        "draws_pair1.bin"}) {
    CHECK(slurp(config.output_dir + "/" + name) == slurp(rerun.output_dir + "/" + name));
  }
  CHECK(slurp(config.output_dir + "/manifest.json") ==
        slurp(rerun.output_dir + "/manifest.json"));
}

TEST_CASE("pipeline validation failures precede computation") {
  const std::string dir = scratch_dir("pipeline_bad");
  RunConfig config = small_config(dir, 1);
  config.pairs[0].path = dir + "/does_not_exist.csv";
  CHECK_THROWS_AS(run_pipeline(config), invalid_argument);

  RunConfig long_horizon = small_config(dir, 1);
  long_horizon.horizons = {2000};
  CHECK_THROWS_AS(run_pipeline(long_horizon), invalid_argument);
}

TEST_CASE("meta analysis of identical pairs equals the single-pair summary") {
  const std::string dir = scratch_dir("pipeline_meta");
  RunConfig config = small_config(dir, 1);
  const PipelineResult result = run_pipeline(config);
  REQUIRE(result.pair_summaries.size() == 1);
  for (size_t i = 0; i < result.meta_summary.rows.size(); ++i) {
    CHECK(result.meta_summary.rows[i].mean ==
          doctest::Approx(result.pair_summaries[0].rows[i].mean));
  }
}

TEST_CASE("sensitivity sweep: grid size, identical-to-base point, robustness flags") {
  const std::string dir = scratch_dir("sweep");
  RunConfig config = small_config(dir, 1);
  // Strong persistent effect so significance at the first horizon is stable
  // across the prior grid.
  SweepGrid grid;
  grid.h = {0.5, 1.0};
  grid.k = {0.5, 1.0};
  grid.rho = {-0.4};
  grid.sr_multiplier = {1.0};
  const std::string sweep_path = sensitivity_sweep(config, grid);
  const CsvTable sweep = read_csv(sweep_path);
  CHECK(sweep.rows.size() == 4 * 3 * 2);  // grid points x horizons x series

  // The sweep point matching the base config reproduces run_pipeline's table.
  RunConfig base = config;
  base.prior.h = 1.0;
  base.prior.k = 1.0;
  base.prior.rho = -0.4;
  base.output_dir = dir + "/base_out";
  const PipelineResult base_result = run_pipeline(base);
  for (const auto& row : sweep.rows) {
    if (row[0] == "1" && row[1] == "1") {
      const int horizon = std::stoi(row[5]);
      const std::string series = row[6];
      for (const auto& ref : base_result.pair_summaries[0].rows) {
        if (ref.horizon == horizon && ("y" + std::to_string(ref.series + 1)) == series) {
          CHECK(parse_double(row[7], "mean") == doctest::Approx(ref.mean));
        }
      }
    }
  }

  // Significance of the (strong) effect at the first horizon is identical
  // across the grid for series 1.
  std::set<std::string> flags;
  for (const auto& row : sweep.rows) {
    if (row[5] == "7" && row[6] == "y1") flags.insert(row[10]);
  }
  CHECK(flags.size() == 1);

  SweepGrid bad;
  bad.rho = {1.5};
  CHECK_THROWS_AS(sensitivity_sweep(config, bad), invalid_argument);
  SweepGrid empty;
  empty.h = {};
  CHECK_THROWS_AS(sensitivity_sweep(config, empty), invalid_argument);
}

TEST_CASE("synthetic panel generator contracts") {
  SimulationDesign design = default_simulation_design();
  Rng rng = make_rng(8);
  const SyntheticPanel null_panel = generate_synthetic_panel(design, {1.0, 1.0}, rng);
  CHECK((null_panel.panel.Y - null_panel.counterfactual).cwiseAbs().maxCoeff() == 0.0);
  CHECK(null_panel.panel.t_star == 366);
  CHECK(null_panel.panel.n() == 546);
  CHECK(null_panel.panel.dates[366].to_string() == "2019-01-02");

  Rng rng2 = make_rng(8);
  const SyntheticPanel effect_panel = generate_synthetic_panel(design, {1.10, 0.90}, rng2);
  for (int t = 0; t < effect_panel.panel.n(); ++t) {
    const double ratio0 = effect_panel.panel.Y(t, 0) / effect_panel.counterfactual(t, 0);
    const double expected = t < effect_panel.panel.t_star ? 1.0 : 1.10;
    CHECK(ratio0 == doctest::Approx(expected).epsilon(1e-12));
  }

  SimulationDesign bad = design;
  bad.intervention = bad.start;
  CHECK_THROWS_AS(generate_synthetic_panel(bad, {1.0, 1.0}, rng), invalid_argument);
  bad = design;
  bad.effect_factors = {{0.0, 1.0}};
  CHECK_THROWS_AS(bad.validate(), invalid_argument);
}

TEST_CASE("tiny coverage study: degenerate single-dataset aggregation") {
  SimulationDesign design = default_simulation_design();
  design.start = Date{2021, 1, 1};
  design.intervention = Date{2021, 4, 1};
  design.end = Date{2021, 4, 30};
  design.horizons = {7, 30};
  design.n_datasets = 1;
  design.effect_factors = {{1.0, 1.0}};
  design.mcmc.niter = 120;
  design.mcmc.burn_in = 20;
  design.prior.g = design.t_star();
  design.fit_m2 = false;

  const CoverageReport report = run_coverage_study(design, 1);
  CHECK(report.cells.size() == 1 * 1 * 2 * 2);  // models x factors x horizons x series
  for (const auto& cell : report.cells) {
    CHECK(cell.n_used == 1);
    CHECK(cell.n_failed == 0);
    // Single Bernoulli cell: the tau-bar coverage flag is 0 or 100.
    CHECK((cell.coverage_avg == 0.0 || cell.coverage_avg == 100.0));
    CHECK(cell.interval_length > 0.0);
  }

  const std::string dir = scratch_dir("study");
  write_coverage_report(dir + "/coverage.csv", report);
  const CsvTable table = read_csv(dir + "/coverage.csv");
  CHECK(table.rows.size() == report.cells.size());
}
