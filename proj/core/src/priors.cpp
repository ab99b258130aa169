#include "mbsts/priors.hpp"

#include <cmath>

namespace mbsts {

void PriorConfig::validate(int d) const {
  if (S_eps.rows() != d || S_eps.cols() != d || S_r.rows() != d || S_r.cols() != d) {
    throw invalid_argument("PriorConfig: scale matrices must be d x d");
  }
  if (nu_eps < d || nu_r < d) {
    throw invalid_argument("PriorConfig: degrees of freedom must be at least d");
  }
  require_spd(S_eps, "PriorConfig S_eps");
  require_spd(S_r, "PriorConfig S_r");
  if (!(pi > 0.0 && pi < 1.0)) throw invalid_argument("PriorConfig: pi must lie in (0, 1)");
  if (!(g > 0.0)) throw invalid_argument("PriorConfig: g must be positive");
}

PriorConfig default_priors(const Matrix& y_pre, double rho, double h, double k) {
  const int t_star = static_cast<int>(y_pre.rows());
  const int d = static_cast<int>(y_pre.cols());
  if (t_star < 3) throw invalid_argument("default_priors: pre-intervention length must be >= 3");
  if (d < 1) throw invalid_argument("default_priors: d >= 1 required");
  if (!(std::abs(rho) < 1.0)) throw invalid_argument("default_priors: |rho| < 1 required");
  if (!(h > 0.0) || !(k > 0.0)) throw invalid_argument("default_priors: h and k must be positive");

  Vector s(d);
  for (int j = 0; j < d; ++j) {
    const double mean = y_pre.col(j).mean();
    s[j] = std::sqrt((y_pre.col(j).array() - mean).square().sum() / (t_star - 1));
    if (s[j] <= 0.0) throw invalid_argument("default_priors: outcome " + std::to_string(j) + " is constant");
  }

  PriorConfig prior;
  prior.nu_eps = d + 2;
  prior.nu_r = d + 2;
  prior.S_eps.resize(d, d);
  for (int i = 0; i < d; ++i) {
    const double scale_i = (i == 0) ? h : k;
    for (int j = 0; j < d; ++j) {
      const double scale_j = (j == 0) ? h : k;
      prior.S_eps(i, j) = (i == j) ? scale_i * s[i] * s[i]
                                   : std::sqrt(scale_i * scale_j) * s[i] * s[j] * rho;
    }
  }
  prior.S_r = prior.S_eps;
  prior.pi = 0.5;
  prior.g = 1.0;
  prior.validate(d);
  return prior;
}

PriorConfig default_priors(const TimeSeriesPanel& panel, double rho, double h, double k) {
  return default_priors(panel.pre_outcomes(), rho, h, k);
}

}  // namespace mbsts
