#include "mbsts/forecast.hpp"

namespace mbsts {

namespace {

void check_draws(const McmcDraws& draws) {
  if (draws.size() == 0) throw invalid_argument("forecast: empty draw record");
}

void check_structure(const McmcDraws& draws, const StateSpaceSystem& structure) {
  if (structure.d != draws.d || structure.m != draws.m || structure.r != draws.r) {
    throw invalid_argument("forecast: system structure does not match the stored draws");
  }
  if (structure.time_varying()) {
    throw invalid_argument("forecast: time-varying systems are not supported");
  }
}

}  // namespace

PathDraws replicate_insample(const McmcDraws& draws, const StateSpaceSystem& structure,
                             const Matrix& covariates, std::uint64_t seed) {
  check_draws(draws);
  check_structure(draws, structure);
  if (!draws.states_stored) {
    throw invalid_argument("replicate_insample: the draw record does not retain state paths");
  }
  if (draws.num_covariates > 0 &&
      (covariates.rows() < draws.t_star || covariates.cols() != draws.num_covariates)) {
    throw invalid_argument("replicate_insample: covariates must be t* x P for the stored selection");
  }

  const Rng base = make_rng(seed);
  PathDraws out(draws.size());
  for (int s = 0; s < draws.size(); ++s) {
    Rng rng = base.substream(static_cast<std::uint64_t>(s));
    const Matrix eps_chol = psd_sqrt(draws.sigma_eps[s]);
    Matrix rep(draws.t_star, draws.d);
    for (int t = 0; t < draws.t_star; ++t) {
      RowVector mean = structure.Z * draws.states[s][t];
      if (draws.num_covariates > 0) mean += covariates.row(t) * draws.beta[s];
      Vector g(draws.d);
      for (int j = 0; j < draws.d; ++j) g[j] = rng.normal();
      rep.row(t) = mean + (eps_chol * g).transpose();
    }
    out[s] = std::move(rep);
  }
  return out;
}

PathDraws forecast_counterfactual(const McmcDraws& draws, const StateSpaceSystem& structure,
                                  const Matrix& covariates_future, int horizon,
                                  std::uint64_t seed) {
  check_draws(draws);
  check_structure(draws, structure);
  if (horizon < 1) throw invalid_argument("forecast_counterfactual: horizon must be >= 1");
  if (draws.num_covariates > 0 && (covariates_future.rows() < horizon ||
                                   covariates_future.cols() != draws.num_covariates)) {
    throw invalid_argument(
        "forecast_counterfactual: future covariates must cover the horizon for every regressor");
  }

  const Rng base = make_rng(seed);
  PathDraws out(draws.size());
  for (int s = 0; s < draws.size(); ++s) {
    Rng rng = base.substream(static_cast<std::uint64_t>(s));
    const Matrix eps_chol = psd_sqrt(draws.sigma_eps[s]);
    std::vector<Matrix> eta_chol;
    eta_chol.reserve(draws.r);
    for (int k = 0; k < draws.r; ++k) eta_chol.push_back(psd_sqrt(draws.sigma_r[s][k]));

    Matrix alpha = draws.last_state[s];
    Matrix path(horizon, draws.d);
    Matrix eta(draws.r, draws.d);
    Vector g(draws.d);
    for (int j = 0; j < horizon; ++j) {
      for (int k = 0; k < draws.r; ++k) {
        for (int c = 0; c < draws.d; ++c) g[c] = rng.normal();
        eta.row(k) = (eta_chol[k] * g).transpose();
      }
      alpha = structure.T * alpha + structure.R * eta;
      RowVector mean = structure.Z * alpha;
      if (draws.num_covariates > 0) mean += covariates_future.row(j) * draws.beta[s];
      for (int c = 0; c < draws.d; ++c) g[c] = rng.normal();
      path.row(j) = mean + (eps_chol * g).transpose();
    }
    out[s] = std::move(path);
  }
  return out;
}

Matrix path_mean(const PathDraws& paths) {
  if (paths.empty()) throw invalid_argument("path_mean: empty draw set");
  Matrix sum = Matrix::Zero(paths[0].rows(), paths[0].cols());
  for (const auto& p : paths) sum += p;
  return sum / static_cast<double>(paths.size());
}

}  // namespace mbsts
