#include "mbsts/simulation_study.hpp"

#include <algorithm>
#include <cmath>

#include "mbsts/components.hpp"
#include "mbsts/effects.hpp"
#include "mbsts/forecast.hpp"
#include "mbsts/gibbs.hpp"
#include "mbsts/parallel.hpp"
#include "mbsts/priors.hpp"

namespace mbsts {

SimulationDesign default_simulation_design() {
  SimulationDesign design;
  design.sigma.resize(2, 2);
  design.sigma << 1.0, -0.3, -0.3, 1.0;
  design.initial_level = Vector::Constant(2, 100.0);
  design.prior.rho = -0.8;
  design.prior.h = 0.2;
  design.prior.k = 0.2;
  design.prior.g = design.t_star();  // unit-information coefficient prior
  design.prior.pi = 0.5;
  design.mcmc.niter = 1000;
  design.mcmc.burn_in = -1;
  design.mcmc.seed = 20180101;
  return design;
}

void SimulationDesign::validate() const {
  if (!(start < intervention) || !(intervention <= end)) {
    throw invalid_argument("simulation design: intervention must lie strictly inside the calendar");
  }
  if (seasonal_period < 2) throw invalid_argument("simulation design: seasonal period >= 2");
  if (h < 0 || c1 < 0 || c2 < 0) throw invalid_argument("simulation design: negative variance scale");
  if (sigma.rows() != 2 || sigma.cols() != 2) {
    throw invalid_argument("simulation design: sigma must be 2 x 2");
  }
  if (initial_level.size() != 2) throw invalid_argument("simulation design: initial level per series");
  if (effect_factors.empty()) throw invalid_argument("simulation design: no effect factors");
  for (const auto& [f1, f2] : effect_factors) {
    if (f1 <= 0 || f2 <= 0) throw invalid_argument("simulation design: effect factors must be positive");
  }
  if (n_datasets < 1) throw invalid_argument("simulation design: n_datasets >= 1 required");
  const int post = n() - t_star();
  for (int horizon : horizons) {
    if (horizon < 1 || horizon > post) {
      throw invalid_argument("simulation design: horizon " + std::to_string(horizon) +
                             " exceeds the post-period length " + std::to_string(post));
    }
  }
  if (!fit_m1 && !fit_m2) throw invalid_argument("simulation design: nothing to fit");
  if (x1_noise_var < 0 || x2_var < 0) throw invalid_argument("simulation design: negative covariate variance");
}

SyntheticPanel generate_synthetic_panel(const SimulationDesign& design,
                                        std::pair<double, double> factors, Rng& rng) {
  design.validate();
  const int n = design.n();
  const int t_star = design.t_star();
  const int p = 2;

  // Covariates.
  Matrix x(n, p);
  x(0, 0) = 0.0;
  const double x1_sd = std::sqrt(design.x1_noise_var);
  const double x2_sd = std::sqrt(design.x2_var);
  for (int t = 1; t < n; ++t) x(t, 0) = 1.0 - x(t - 1, 0) + x1_sd * rng.normal();
  for (int t = 0; t < n; ++t) x(t, 1) = design.x2_mean + x2_sd * rng.normal();

  // Coefficients: beta ~ MN(0, I_P, sigma).
  const Matrix sigma_chol = cholesky(design.sigma, "simulation design sigma");
  const Matrix beta = rng.normal_matrix(p, 2) * sigma_chol.transpose();

  StateSpaceSystem system = assemble_system(
      {LocalLevelTrend{design.c1}, Seasonal{design.seasonal_period, design.c2}}, 2, design.sigma,
      design.h);
  system.a1.setZero();
  system.a1.row(0) = design.initial_level.transpose();
  system.P1.setZero();

  const SimulatedSeries sim = simulate_from_system(system, beta, x, n, rng);

  SyntheticPanel out;
  out.counterfactual = sim.y;
  out.beta_true = beta;
  out.panel.group_id = "synthetic";
  out.panel.Y = sim.y;
  for (int t = t_star; t < n; ++t) {
    out.panel.Y(t, 0) = sim.y(t, 0) * factors.first;
    out.panel.Y(t, 1) = sim.y(t, 1) * factors.second;
  }
  out.panel.X = x;
  out.panel.t_star = t_star;
  out.panel.dates.reserve(n);
  for (int t = 0; t < n; ++t) out.panel.dates.push_back(design.start.plus_days(t));
  out.panel.outcome_names = {"y1", "y2"};
  out.panel.covariate_names = {"x1", "x2"};
  out.panel.frozen.assign(p, false);
  out.panel.validate();
  return out;
}

namespace {

// Factor-independent per-(dataset, model) statistics of the counterfactual
// forecast; effect-size metrics derive from these plus the treated series.
struct ModelScores {
  // Indexed [horizon][series].
  Matrix avg_lo, avg_hi, avg_mean;  // quantiles/mean of window-averaged forecasts
  Matrix coverage_pw;               // share of window points with truth inside pointwise interval
  Matrix covered_avg;               // truth window-average inside the interval (0/1)
  Matrix truth_avg;                 // window average of the true counterfactual
};

ModelScores score_model(const SimulationDesign& design, const Matrix& counterfactual,
                        const PathDraws& forecast) {
  const int t_star = design.t_star();
  const int kmax = design.horizons.back();
  const int num_h = static_cast<int>(design.horizons.size());
  const int draws = static_cast<int>(forecast.size());

  ModelScores scores;
  scores.avg_lo.resize(num_h, 2);
  scores.avg_hi.resize(num_h, 2);
  scores.avg_mean.resize(num_h, 2);
  scores.coverage_pw.resize(num_h, 2);
  scores.covered_avg.resize(num_h, 2);
  scores.truth_avg.resize(num_h, 2);

  std::vector<double> values(draws);
  for (int j = 0; j < 2; ++j) {
    // Pointwise forecast intervals and truth hits per step.
    std::vector<int> hit(kmax);
    for (int t = 0; t < kmax; ++t) {
      for (int s = 0; s < draws; ++s) values[s] = forecast[s](t, j);
      const double lo = quantile(values, 0.025);
      const double hi = quantile(values, 0.975);
      const double truth = counterfactual(t_star + t, j);
      hit[t] = (truth >= lo && truth <= hi) ? 1 : 0;
    }

    // Window-averaged forecasts per horizon.
    std::vector<double> running(draws, 0.0);
    double truth_running = 0.0;
    int hits_running = 0;
    int next_h = 0;
    for (int t = 0; t < kmax && next_h < num_h; ++t) {
      for (int s = 0; s < draws; ++s) running[s] += forecast[s](t, j);
      truth_running += counterfactual(t_star + t, j);
      hits_running += hit[t];
      if (t + 1 == design.horizons[next_h]) {
        const double window = t + 1;
        for (int s = 0; s < draws; ++s) values[s] = running[s] / window;
        const double lo = quantile(values, 0.025);
        const double hi = quantile(values, 0.975);
        double mean = 0;
        for (double v : values) mean += v;
        mean /= draws;
        const double truth_mean = truth_running / window;
        scores.avg_lo(next_h, j) = lo;
        scores.avg_hi(next_h, j) = hi;
        scores.avg_mean(next_h, j) = mean;
        scores.truth_avg(next_h, j) = truth_mean;
        scores.covered_avg(next_h, j) = (truth_mean >= lo && truth_mean <= hi) ? 1.0 : 0.0;
        scores.coverage_pw(next_h, j) = static_cast<double>(hits_running) / window;
        ++next_h;
      }
    }
  }
  return scores;
}

struct DatasetResult {
  bool ok = false;
  std::string error;
  // Indexed [model][horizon][series] flattened; models in fit order.
  std::vector<ModelScores> scores;
  Matrix observed_avg;  // per (horizon, series) window average of the observed factor=1 path
};

}  // namespace

const CoverageCell& CoverageReport::cell(const std::string& model, double f1, int horizon,
                                         int series) const {
  for (const auto& c : cells) {
    if (c.model == model && c.factor1 == f1 && c.horizon == horizon && c.series == series) return c;
  }
  throw invalid_argument("CoverageReport: no such cell");
}

CoverageReport run_coverage_study(const SimulationDesign& design, int threads) {
  design.validate();
  const int t_star = design.t_star();
  const int kmax = design.horizons.back();
  const int num_h = static_cast<int>(design.horizons.size());

  std::vector<std::string> models;
  if (design.fit_m1) models.push_back("M1");
  if (design.fit_m2) models.push_back("M2");

  std::vector<DatasetResult> results(design.n_datasets);
  const Rng master = make_rng(design.mcmc.seed);

  parallel_for(design.n_datasets, threads, [&](int i) {
    DatasetResult& result = results[i];
    try {
      Rng dataset_stream = master.substream(static_cast<std::uint64_t>(i));
      Rng data_rng = dataset_stream.substream(0);
      const SyntheticPanel data = generate_synthetic_panel(design, {1.0, 1.0}, data_rng);

      result.observed_avg.resize(num_h, 2);
      for (int hdx = 0; hdx < num_h; ++hdx) {
        for (int j = 0; j < 2; ++j) {
          double sum = 0;
          for (int t = 0; t < design.horizons[hdx]; ++t) sum += data.counterfactual(t_star + t, j);
          result.observed_avg(hdx, j) = sum / design.horizons[hdx];
        }
      }

      PriorConfig prior = default_priors(data.panel, design.prior.rho, design.prior.h,
                                         design.prior.k);
      prior.g = design.prior.g;
      prior.pi = design.prior.pi;
      prior.S_r = design.prior.sr_multiplier * prior.S_eps;

      int stream = 1;
      for (const std::string& model : models) {
        const bool use_regression = (model == "M1") || design.m2_keep_regression;
        std::vector<ComponentSpec> specs;
        if (model == "M1") specs.push_back(LocalLevelTrend{});
        specs.push_back(Seasonal{design.seasonal_period, 1.0});
        if (use_regression) specs.push_back(Regression{2, SelectionMode::kSpikeSlab});

        McmcConfig mcmc;
        mcmc.niter = design.mcmc.niter;
        mcmc.burn_in = design.mcmc.burn_in;
        mcmc.seed = dataset_stream.substream(stream++).seed();
        mcmc.store_states = false;

        TimeSeriesPanel panel = data.panel;
        if (!use_regression) {
          panel.X = Matrix(panel.n(), 0);
          panel.covariate_names.clear();
          panel.frozen.clear();
        }
        const McmcDraws draws = run_gibbs(panel, specs, prior, mcmc);

        const StateSpaceSystem structure =
            assemble_system(specs, 2, Matrix::Identity(2, 2), 1.0);
        const Matrix x_future = panel.X.middleRows(t_star, kmax);
        const PathDraws forecast = forecast_counterfactual(
            draws, structure, x_future, kmax, dataset_stream.substream(stream++).seed());

        result.scores.push_back(score_model(design, data.counterfactual, forecast));
      }
      result.ok = true;
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = e.what();
    }
  });

  // Deterministic reduce in dataset order.
  CoverageReport report;
  int failed = 0;
  for (const auto& result : results) {
    if (!result.ok) ++failed;
  }

  for (size_t mdx = 0; mdx < models.size(); ++mdx) {
    for (const auto& [f1, f2] : design.effect_factors) {
      for (int hdx = 0; hdx < num_h; ++hdx) {
        for (int j = 0; j < 2; ++j) {
          const double factor = (j == 0) ? f1 : f2;
          CoverageCell cell;
          cell.model = models[mdx];
          cell.factor1 = f1;
          cell.factor2 = f2;
          cell.horizon = design.horizons[hdx];
          cell.series = j;
          cell.n_failed = failed;

          double sum_len = 0, sum_cov = 0, sum_cov_avg = 0, sum_detect = 0;
          double sum_ape = 0, sumsq_ape = 0;
          int used = 0;
          for (const auto& result : results) {
            if (!result.ok) continue;
            const ModelScores& s = result.scores[mdx];
            const double obs_avg = factor * result.observed_avg(hdx, j);
            const double truth_effect = obs_avg - s.truth_avg(hdx, j);
            const double est_effect = obs_avg - s.avg_mean(hdx, j);
            const double eff_lo = obs_avg - s.avg_hi(hdx, j);
            const double eff_hi = obs_avg - s.avg_lo(hdx, j);

            sum_len += s.avg_hi(hdx, j) - s.avg_lo(hdx, j);
            sum_cov += s.coverage_pw(hdx, j);
            sum_cov_avg += s.covered_avg(hdx, j);
            sum_detect += (eff_lo > 0.0 || eff_hi < 0.0) ? 1.0 : 0.0;
            const double ape = std::abs(est_effect - truth_effect) / std::abs(truth_effect);
            sum_ape += ape;
            sumsq_ape += ape * ape;
            ++used;
          }
          cell.n_used = used;
          if (used > 0) {
            cell.interval_length = sum_len / used;
            cell.coverage = 100.0 * sum_cov / used;
            cell.coverage_avg = 100.0 * sum_cov_avg / used;
            cell.detection = 100.0 * sum_detect / used;
            cell.ape = sum_ape / used;
            const double var = std::max(0.0, sumsq_ape / used - cell.ape * cell.ape);
            cell.ape_2sem = 2.0 * std::sqrt(var / used);
          }
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }
  return report;
}

void write_coverage_report(const std::string& path, const CoverageReport& report) {
  CsvTable table;
  table.header = {"model",     "effect_y1",    "effect_y2", "horizon_days", "series",
                  "interval_length", "ape",    "ape_2sem",  "coverage",     "coverage_avg",
                  "detection", "n_used",       "n_failed"};
  for (const auto& c : report.cells) {
    table.rows.push_back({c.model, format_double(c.factor1), format_double(c.factor2),
                          std::to_string(c.horizon), std::to_string(c.series + 1),
                          format_double(c.interval_length), format_double(c.ape),
                          format_double(c.ape_2sem), format_double(c.coverage),
                          format_double(c.coverage_avg), format_double(c.detection),
                          std::to_string(c.n_used), std::to_string(c.n_failed)});
  }
  write_csv(path, table);
}

}  // namespace mbsts
