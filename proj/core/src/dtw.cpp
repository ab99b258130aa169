#include "mbsts/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mbsts {

double dtw_distance(const Vector& a, const Vector& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (n < 1 || m < 1) throw invalid_argument("dtw_distance: empty series");

  constexpr double inf = std::numeric_limits<double>::infinity();
  // Rolling two-row dynamic program over monotone warping paths with steps
  // (1,0), (0,1), (1,1).
  std::vector<double> prev(m, inf), cur(m, inf);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double diff = a[i] - b[j];
      const double cost = diff * diff;
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = inf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, cur[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      cur[j] = cost + best;
    }
    std::swap(prev, cur);
  }
  return std::sqrt(prev[m - 1]);
}

Vector standardize_series(const Vector& x) {
  if (x.size() < 2) throw invalid_argument("standardize_series: series too short");
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / (x.size() - 1));
  if (sd <= 0.0) throw invalid_argument("standardize_series: constant series");
  return (x.array() - mean) / sd;
}

DtwRanking dtw_preselect_controls(const Vector& target, const std::vector<Vector>& pool,
                                  int top_n) {
  if (pool.empty()) throw invalid_argument("dtw_preselect_controls: empty candidate pool");
  if (top_n < 1 || top_n > static_cast<int>(pool.size())) {
    throw invalid_argument("dtw_preselect_controls: top_n outside [1, pool size]");
  }
  for (const auto& series : pool) {
    if (series.size() != target.size()) {
      throw invalid_argument("dtw_preselect_controls: pool series length differs from target");
    }
  }

  const Vector t_std = standardize_series(target);
  std::vector<double> costs(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    costs[i] = dtw_distance(t_std, standardize_series(pool[i]));
  }

  std::vector<int> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int lhs, int rhs) { return costs[lhs] < costs[rhs]; });

  DtwRanking out;
  out.indices.assign(order.begin(), order.begin() + top_n);
  out.costs.reserve(top_n);
  for (int idx : out.indices) out.costs.push_back(costs[idx]);
  return out;
}

}  // namespace mbsts
