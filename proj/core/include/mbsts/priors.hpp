#ifndef MBSTS_PRIORS_HPP_
#define MBSTS_PRIORS_HPP_

#include "mbsts/linalg.hpp"
#include "mbsts/panel.hpp"

namespace mbsts {

// Conjugate prior configuration:
//   sigma_eps          ~ IW(nu_eps, S_eps)
//   sigma_r (per block) ~ IW(nu_r, S_r)
//   beta_rho | sigma_eps ~ MN(0, H_rho, sigma_eps) with H_rho = g (X'X)^-1
//   rho_p              ~ Bernoulli(pi) independently
struct PriorConfig {
  double nu_eps = 0.0;
  double nu_r = 0.0;
  Matrix S_eps;
  Matrix S_r;
  double pi = 0.5;
  double g = 1.0;

  void validate(int d) const;
};

// Data-driven defaults: nu = d + 2 (smallest integer giving the
// inverse-Wishart a mean) and scale matrices built from pre-period sample
// variances s_i^2 with a common prior correlation rho,
//   S[i][j] = sqrt(scale_i scale_j) s_i s_j rho  (i != j),  S[i][i] = scale_i s_i^2,
// where scale_1 = h and scale_i = k for the remaining series.
PriorConfig default_priors(const Matrix& y_pre, double rho, double h, double k);
PriorConfig default_priors(const TimeSeriesPanel& panel, double rho, double h, double k);

}  // namespace mbsts

#endif  // MBSTS_PRIORS_HPP_
