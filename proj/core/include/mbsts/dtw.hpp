#ifndef MBSTS_DTW_HPP_
#define MBSTS_DTW_HPP_

#include <vector>

#include "mbsts/linalg.hpp"

namespace mbsts {

// Dynamic-time-warping alignment cost with a full warping window and squared
// pointwise distance; returns sqrt of the optimal path cost so that for
// equal-length series the value is bounded above by the Euclidean distance.
double dtw_distance(const Vector& a, const Vector& b);

// Series standardized to zero mean, unit variance. Throws on constant input.
Vector standardize_series(const Vector& x);

struct DtwRanking {
  std::vector<int> indices;  // candidate positions, best match first
  std::vector<double> costs;
};

// Ranks candidate control series by DTW cost against the target over the
// pre-period; all series are standardized first. Ties break by pool index.
DtwRanking dtw_preselect_controls(const Vector& target, const std::vector<Vector>& pool,
                                  int top_n);

}  // namespace mbsts

#endif  // MBSTS_DTW_HPP_
