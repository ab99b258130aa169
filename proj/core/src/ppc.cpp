#include "mbsts/ppc.hpp"

#include <algorithm>
#include <cmath>

namespace mbsts {

double bayesian_p_value(double observed_stat, const std::vector<double>& replicated_stats) {
  if (replicated_stats.empty()) throw invalid_argument("bayesian_p_value: no replicated statistics");
  std::size_t at_least = 0;
  for (double v : replicated_stats) {
    if (v >= observed_stat) ++at_least;
  }
  return static_cast<double>(at_least) / static_cast<double>(replicated_stats.size());
}

std::string statistic_name(TestStatistic stat) {
  switch (stat) {
    case TestStatistic::kMax: return "max";
    case TestStatistic::kMean: return "mean";
    case TestStatistic::kStdDev: return "sd";
  }
  return "unknown";
}

double evaluate_statistic(TestStatistic stat, const Vector& values) {
  switch (stat) {
    case TestStatistic::kMax: return values.maxCoeff();
    case TestStatistic::kMean: return values.mean();
    case TestStatistic::kStdDev: {
      const double mean = values.mean();
      return std::sqrt((values.array() - mean).square().sum() /
                       std::max<Eigen::Index>(1, values.size() - 1));
    }
  }
  throw invalid_argument("evaluate_statistic: unknown statistic");
}

PpcReport ppc_report(const Matrix& y_pre, const PathDraws& replicates, const PpcOptions& options) {
  if (replicates.empty()) throw invalid_argument("ppc_report: no replicates");
  const int t_star = static_cast<int>(y_pre.rows());
  const int d = static_cast<int>(y_pre.cols());
  if (replicates[0].rows() != t_star || replicates[0].cols() != d) {
    throw invalid_argument("ppc_report: replicate shape does not match the observed record");
  }
  if (options.max_lag < 1) throw invalid_argument("ppc_report: max_lag >= 1 required");
  if (t_star < options.max_lag + 2) {
    throw invalid_argument("ppc_report: pre-period too short for lag " +
                           std::to_string(options.max_lag));
  }

  PpcReport report;
  report.observed = y_pre;
  report.p_values.resize(d);

  // Posterior-predictive mean and variance per time point.
  Matrix sum = Matrix::Zero(t_star, d), sumsq = Matrix::Zero(t_star, d);
  for (const auto& rep : replicates) {
    sum += rep;
    sumsq += rep.cwiseProduct(rep);
  }
  const double n_rep = static_cast<double>(replicates.size());
  report.replicated_mean = sum / n_rep;
  Matrix var = sumsq / n_rep - report.replicated_mean.cwiseProduct(report.replicated_mean);

  report.standardized_residuals.resize(t_star, d);
  for (int t = 0; t < t_star; ++t) {
    for (int j = 0; j < d; ++j) {
      if (var(t, j) <= 0.0) {
        throw numerical_error("ppc_report: degenerate posterior-predictive variance at t=" +
                              std::to_string(t + 1));
      }
      report.standardized_residuals(t, j) =
          (y_pre(t, j) - report.replicated_mean(t, j)) / std::sqrt(var(t, j));
    }
  }

  // Test statistics per series.
  for (TestStatistic stat : options.statistics) {
    std::vector<double> rep_stats(replicates.size());
    for (int j = 0; j < d; ++j) {
      const double observed = evaluate_statistic(stat, y_pre.col(j));
      for (size_t s = 0; s < replicates.size(); ++s) {
        rep_stats[s] = evaluate_statistic(stat, replicates[s].col(j));
      }
      report.p_values[j][statistic_name(stat)] = bayesian_p_value(observed, rep_stats);
    }
  }

  // Normal QQ pairs of the standardized residuals.
  report.qq.reserve(d);
  for (int j = 0; j < d; ++j) {
    std::vector<double> sorted(t_star);
    for (int t = 0; t < t_star; ++t) sorted[t] = report.standardized_residuals(t, j);
    std::sort(sorted.begin(), sorted.end());
    Matrix qq(t_star, 2);
    for (int t = 0; t < t_star; ++t) {
      qq(t, 0) = normal_quantile((t + 0.5) / t_star);
      qq(t, 1) = sorted[t];
    }
    report.qq.push_back(std::move(qq));
  }

  // Residual autocorrelations with the white-noise band.
  report.acf.resize(options.max_lag + 1, d);
  report.acf_band = 1.96 / std::sqrt(static_cast<double>(t_star));
  for (int j = 0; j < d; ++j) {
    const Vector resid = report.standardized_residuals.col(j);
    const double mean = resid.mean();
    const double denom = (resid.array() - mean).square().sum();
    if (denom <= 0.0) throw numerical_error("ppc_report: zero-variance residuals");
    report.acf(0, j) = 1.0;
    for (int lag = 1; lag <= options.max_lag; ++lag) {
      double num = 0.0;
      for (int t = 0; t + lag < t_star; ++t) {
        num += (resid[t] - mean) * (resid[t + lag] - mean);
      }
      report.acf(lag, j) = num / denom;
    }
  }
  return report;
}

}  // namespace mbsts
