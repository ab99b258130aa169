#include "mbsts/forecast_error.hpp"

namespace mbsts {

ForecastErrorCovariances analytic_forecast_error(const StateSpaceSystem& system, int k) {
  system.validate();
  if (k < 1) throw invalid_argument("analytic_forecast_error: k >= 1 required");
  if (system.time_varying()) {
    throw invalid_argument("analytic_forecast_error: time-varying systems are not supported");
  }

  const Matrix rcr = system.state_noise_row_cov(0);
  ForecastErrorCovariances out;
  out.pointwise.reserve(k);
  out.cumulative.reserve(k);

  // Predicted row covariances P_{t*+j}, no data updates after the origin.
  std::vector<Matrix> p_seq;
  p_seq.reserve(k);
  Matrix p = system.P1;
  for (int j = 0; j < k; ++j) {
    p_seq.push_back(p);
    out.pointwise.push_back(((system.Z * p * system.Z.transpose()).value() + system.H) *
                            system.Sigma);
    p = system.T * p * system.T.transpose() + rcr;
    symmetrize(p);
  }

  // Cumulative covariance for each terminal horizon K.
  for (int terminal = 1; terminal <= k; ++terminal) {
    // D_j backwards from D_K = Z.
    std::vector<RowVector> d_seq(terminal + 1, RowVector::Zero(system.m));
    d_seq[terminal] = system.Z;
    for (int j = terminal - 1; j >= 1; --j) d_seq[j] = system.Z + d_seq[j + 1] * system.T;

    double row_var = (d_seq[1] * p_seq[0] * d_seq[1].transpose()).value();
    for (int j = 2; j <= terminal; ++j) {
      row_var += (d_seq[j] * rcr * d_seq[j].transpose()).value();
    }
    row_var += terminal * system.H;
    out.cumulative.push_back(row_var * system.Sigma);
  }
  return out;
}

}  // namespace mbsts
