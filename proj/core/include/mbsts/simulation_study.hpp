#ifndef MBSTS_SIMULATION_STUDY_HPP_
#define MBSTS_SIMULATION_STUDY_HPP_

#include <utility>
#include <vector>

#include "mbsts/config.hpp"
#include "mbsts/panel.hpp"
#include "mbsts/rng.hpp"

namespace mbsts {

// Design of the synthetic coverage study: a bivariate trend + weekly-seasonal
// panel with two covariates, a persistent multiplicative intervention, and
// two inference models (M1 with trend, M2 without).
struct SimulationDesign {
  Date start{2018, 1, 1};
  Date end{2019, 6, 30};
  Date intervention{2019, 1, 2};  // first treated day

  double h = 1.0;   // observation variance
  double c1 = 3.0;  // trend disturbance scale
  double c2 = 2.0;  // seasonal disturbance scale
  int seasonal_period = 7;
  Matrix sigma;          // cross-series covariance (default [[1,-.3],[-.3,1]])
  Vector initial_level;  // trend start per series (default 100)

  // Covariates: x1 follows the alternating recursion x1(t) = 1 - x1(t-1) + noise,
  // x2 is i.i.d. normal. Coefficients are drawn per dataset from MN(0, I, sigma).
  double x1_noise_var = 0.5;
  double x2_mean = 2.0;
  double x2_var = 0.3;

  // Persistent multiplicative factors applied to (Y1, Y2) after t*.
  std::vector<std::pair<double, double>> effect_factors = {
      {1.01, 0.99}, {1.10, 0.90}, {1.25, 0.75}, {1.50, 0.50}, {2.00, 0.10}};

  std::vector<int> horizons = {30, 90, 180};
  int n_datasets = 200;
  bool fit_m1 = true;
  bool fit_m2 = true;
  bool m2_keep_regression = true;  // M2 drops the trend only

  PriorSettings prior;  // defaults set by default_simulation_design()
  McmcSettings mcmc;

  int d() const { return 2; }
  int n() const { return static_cast<int>(end.to_days() - start.to_days()) + 1; }
  int t_star() const { return static_cast<int>(intervention.to_days() - start.to_days()); }
  void validate() const;
};

SimulationDesign default_simulation_design();

struct SyntheticPanel {
  TimeSeriesPanel panel;   // observed outcomes (factors applied after t*)
  Matrix counterfactual;   // n x d untreated path, for truth scoring
  Matrix beta_true;        // P x d coefficients used in the generation
};

// One synthetic dataset under the given effect factors. Factors (1, 1)
// produce a null panel with observed == counterfactual.
SyntheticPanel generate_synthetic_panel(const SimulationDesign& design,
                                        std::pair<double, double> factors, Rng& rng);

struct CoverageCell {
  std::string model;
  double factor1 = 1.0, factor2 = 1.0;
  int horizon = 0;  // days after the intervention
  int series = 0;
  double interval_length = 0.0;  // mean width of the 95% temporal-average interval
  double ape = 0.0;              // mean absolute percentage estimation error
  double ape_2sem = 0.0;         // 2 standard errors of that mean
  double coverage = 0.0;         // % of true pointwise effects inside pointwise intervals
  double coverage_avg = 0.0;     // % of runs whose temporal-average interval covers the truth
  double detection = 0.0;        // % of runs whose temporal-average interval excludes zero
  int n_used = 0;
  int n_failed = 0;
};

struct CoverageReport {
  std::vector<CoverageCell> cells;

  const CoverageCell& cell(const std::string& model, double f1, int horizon, int series) const;
};

// Fits every dataset under M1/M2, forecasts the counterfactual, and scores
// interval length, absolute percentage error, coverage, and detection per
// (model, effect size, horizon, series). Deterministic given the design seed;
// dataset-level failures are counted and excluded, never silently dropped.
CoverageReport run_coverage_study(const SimulationDesign& design, int threads);

void write_coverage_report(const std::string& path, const CoverageReport& report);

}  // namespace mbsts

#endif  // MBSTS_SIMULATION_STUDY_HPP_
