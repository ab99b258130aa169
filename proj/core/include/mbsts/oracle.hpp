#ifndef MBSTS_ORACLE_HPP_
#define MBSTS_ORACLE_HPP_

#include <vector>

#include "mbsts/statespace.hpp"

namespace mbsts {

// Reference implementations used to cross-check the Kalman recursions: the
// full joint Gaussian of (states, observations) is assembled by accumulating
// noise loadings and conditioned by dense block arithmetic. Cubic in n*m*d,
// intended for small test problems only.

struct JointGaussian {
  int n = 0;
  int nx = 0;  // stacked state dimension per time
  int ny = 0;  // observation dimension per time
  Vector mean;  // states t=1..n first (row-major per time), then observations
  Matrix cov;

  int state_offset(int t) const { return t * nx; }
  int obs_offset(int t) const { return n * nx + t * ny; }
};

JointGaussian build_joint_gaussian(const StateSpaceSystem& system, int n,
                                   const Matrix* offsets = nullptr);
JointGaussian build_joint_gaussian(const StackedModel& model, int n,
                                   const Matrix* offsets = nullptr);

struct OracleMoments {
  double loglik = 0.0;
  Matrix smoothed_mean;  // n x nx
  Matrix smoothed_cov;   // (n*nx) x (n*nx)
};

// Condition all states on the full observation record.
OracleMoments condition_on_observations(const JointGaussian& joint, const Matrix& y);

// Condition all states on observations 1..k only (k may be 0); the rows of
// smoothed_mean at t > k are then the exact k-step-ahead predictive means.
OracleMoments condition_on_prefix(const JointGaussian& joint, const Matrix& y, int k);

struct SmootherOracleResult {
  double loglik = 0.0;
  std::vector<Matrix> smoothed_mean;  // n of m x d
  Matrix smoothed_cov;                // (n*m*d)^2, states stacked row-major per time
};

// Exact smoothed moments of all states by joint-Gaussian conditioning.
// Guarded to n*m*d <= 512.
SmootherOracleResult joint_gaussian_smoother_oracle(const StateSpaceSystem& system, const Matrix& y,
                                                    const Matrix* offsets = nullptr);

}  // namespace mbsts

#endif  // MBSTS_ORACLE_HPP_
