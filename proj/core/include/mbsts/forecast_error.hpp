#ifndef MBSTS_FORECAST_ERROR_HPP_
#define MBSTS_FORECAST_ERROR_HPP_

#include <vector>

#include "mbsts/statespace.hpp"

namespace mbsts {

// Conditional-on-parameters forecast-error covariances. The system's a1/P1
// are read as the predicted moments of the state at the first forecast step
// (alpha_{t*+1} | data up to t*).
struct ForecastErrorCovariances {
  std::vector<Matrix> pointwise;   // d x d, horizons 1..k
  std::vector<Matrix> cumulative;  // d x d, cumulative error over horizons 1..K
};

// Pointwise: (Z P_j Z' + H) Sigma with P propagated through the state
// equation. Cumulative: the backward weight recursion D_K = Z,
// D_j = Z + D_{j+1} T, giving
//   (D_1 P_1 D_1' + sum_{j=2..K} D_j R C R' D_j' + K H) Sigma.
ForecastErrorCovariances analytic_forecast_error(const StateSpaceSystem& system, int k);

}  // namespace mbsts

#endif  // MBSTS_FORECAST_ERROR_HPP_
