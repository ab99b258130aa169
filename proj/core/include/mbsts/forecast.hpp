#ifndef MBSTS_FORECAST_HPP_
#define MBSTS_FORECAST_HPP_

#include <cstdint>
#include <vector>

#include "mbsts/gibbs.hpp"
#include "mbsts/statespace.hpp"

namespace mbsts {

// One matrix per posterior draw; each matrix is horizon x d.
using PathDraws = std::vector<Matrix>;

// Posterior-predictive replication of the pre-intervention record: for each
// stored draw, regenerates y_t = Z alpha_t + X_t beta + eps with fresh
// observation noise at that draw's parameters and states.
PathDraws replicate_insample(const McmcDraws& draws, const StateSpaceSystem& structure,
                             const Matrix& covariates, std::uint64_t seed);

// Counterfactual forecast: per draw, the state path is propagated forward
// from alpha_{t*} through the state equation with fresh disturbances, and
// observations are completed with that draw's beta and fresh observation
// noise. Rows of covariates_future align with horizons t*+1 .. t*+k.
PathDraws forecast_counterfactual(const McmcDraws& draws, const StateSpaceSystem& structure,
                                  const Matrix& covariates_future, int horizon,
                                  std::uint64_t seed);

// Pointwise mean across draws (used by predictive-mean diagnostics).
Matrix path_mean(const PathDraws& paths);

}  // namespace mbsts

#endif  // MBSTS_FORECAST_HPP_
