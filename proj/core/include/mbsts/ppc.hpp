#ifndef MBSTS_PPC_HPP_
#define MBSTS_PPC_HPP_

#include <map>
#include <string>
#include <vector>

#include "mbsts/forecast.hpp"

namespace mbsts {

// Posterior-predictive tail probability: share of replicated statistics at
// least as extreme as (i.e. >=) the observed one.
double bayesian_p_value(double observed_stat, const std::vector<double>& replicated_stats);

enum class TestStatistic { kMax, kMean, kStdDev };
std::string statistic_name(TestStatistic stat);
double evaluate_statistic(TestStatistic stat, const Vector& values);

struct PpcOptions {
  // The maximum is the headline tail-fit check; mean and standard deviation
  // can be added on top.
  std::vector<TestStatistic> statistics = {TestStatistic::kMax};
  int max_lag = 20;
};

struct PpcReport {
  // p_values[series][statistic name]
  std::vector<std::map<std::string, double>> p_values;
  Matrix observed;                // t* x d (echoed for the density overlay)
  Matrix replicated_mean;         // t* x d posterior-predictive mean path
  Matrix standardized_residuals;  // t* x d
  std::vector<Matrix> qq;         // per series: t* x 2, theoretical vs empirical
  Matrix acf;                     // (max_lag + 1) x d, row 0 = lag 0 = 1
  double acf_band = 0.0;          // +-1.96 / sqrt(t*)
};

// Compares the pre-intervention record against in-sample replicates:
// Bayesian p-values per registered statistic, the density-overlay table,
// posterior-predictive standardized residuals, normal QQ pairs, and residual
// autocorrelations with a white-noise band.
PpcReport ppc_report(const Matrix& y_pre, const PathDraws& replicates,
                     const PpcOptions& options = {});

}  // namespace mbsts

#endif  // MBSTS_PPC_HPP_
