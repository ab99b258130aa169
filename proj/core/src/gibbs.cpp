#include "mbsts/gibbs.hpp"

#include <cmath>

#include "mbsts/statespace.hpp"

namespace mbsts {

namespace {

Matrix select_columns(const Matrix& x, const std::vector<std::uint8_t>& rho) {
  int p_sel = 0;
  for (auto v : rho) p_sel += v ? 1 : 0;
  Matrix out(x.rows(), p_sel);
  int col = 0;
  for (size_t j = 0; j < rho.size(); ++j) {
    if (rho[j]) out.col(col++) = x.col(static_cast<int>(j));
  }
  return out;
}

// Cholesky of X'X + Hinv, shared by the conjugate formulas.
Matrix normal_equations_chol(const Matrix& x_sel, const Matrix& h_inv) {
  Matrix a = x_sel.transpose() * x_sel + h_inv;
  symmetrize(a);
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw numerical_error("regression full conditional: X'X + Hinv is singular "
                          "(collinear selected regressors)");
  }
  return llt.matrixL();
}

}  // namespace

BetaFullConditional full_conditional_beta(const Matrix& y_tilde, const Matrix& x_sel,
                                          const Matrix& h_inv) {
  const int p = static_cast<int>(x_sel.cols());
  if (p < 1) throw invalid_argument("full_conditional_beta: needs at least one selected regressor");
  if (y_tilde.rows() != x_sel.rows()) {
    throw invalid_argument("full_conditional_beta: X and Ytilde row mismatch");
  }
  if (h_inv.rows() != p || h_inv.cols() != p) {
    throw invalid_argument("full_conditional_beta: Hinv must be p x p");
  }
  const Matrix l = normal_equations_chol(x_sel, h_inv);
  BetaFullConditional fc;
  const Matrix b = x_sel.transpose() * y_tilde;
  fc.W = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p)));
  symmetrize(fc.W);
  fc.M = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(b));
  return fc;
}

BetaFullConditional full_conditional_beta(const Matrix& y_tilde, const Matrix& x_sel,
                                          const PriorConfig& prior) {
  Matrix h_inv = x_sel.transpose() * x_sel / prior.g;
  symmetrize(h_inv);
  return full_conditional_beta(y_tilde, x_sel, h_inv);
}

Matrix draw_beta(const BetaFullConditional& fc, const Matrix& sigma_eps, Rng& rng) {
  const Matrix row_chol = cholesky(fc.W, "draw_beta W");
  const Matrix col_chol = cholesky(sigma_eps, "draw_beta sigma_eps");
  return draw_matrix_normal(fc.M, row_chol, col_chol, rng);
}

InverseWishartPosterior full_conditional_sigma_eps(const Matrix& y_tilde, const Matrix& x_sel,
                                                   const PriorConfig& prior) {
  const int t_star = static_cast<int>(y_tilde.rows());
  const int d = static_cast<int>(y_tilde.cols());
  if (t_star < 1) throw invalid_argument("full_conditional_sigma_eps: empty pre-period");
  prior.validate(d);

  InverseWishartPosterior post;
  post.dof = prior.nu_eps + t_star;
  post.scale = prior.S_eps + y_tilde.transpose() * y_tilde;
  if (x_sel.cols() > 0) {
    if (x_sel.rows() != t_star) {
      throw invalid_argument("full_conditional_sigma_eps: X and Ytilde row mismatch");
    }
    // M' W^-1 M = B' (X'X + Hinv)^-1 B with B = X'Ytilde.
    const Matrix h_inv = x_sel.transpose() * x_sel / prior.g;
    const Matrix l = normal_equations_chol(x_sel, h_inv);
    const Matrix b = x_sel.transpose() * y_tilde;
    const Matrix w = l.triangularView<Eigen::Lower>().solve(b);
    post.scale -= w.transpose() * w;
  }
  symmetrize(post.scale);
  cholesky(post.scale, "full_conditional_sigma_eps scale");  // PD guarantee
  return post;
}

InverseWishartPosterior full_conditional_sigma_r(const Matrix& eta, const PriorConfig& prior) {
  const int t_star = static_cast<int>(eta.rows());
  const int d = static_cast<int>(eta.cols());
  if (t_star < 1) throw invalid_argument("full_conditional_sigma_r: empty disturbance record");
  if (prior.S_r.rows() != d) {
    throw invalid_argument("full_conditional_sigma_r: disturbance width does not match the prior");
  }
  InverseWishartPosterior post;
  post.dof = prior.nu_r + t_star;
  post.scale = prior.S_r + eta.transpose() * eta;
  symmetrize(post.scale);
  return post;
}

double log_marginal_likelihood(const Matrix& y_tilde, const Matrix& x_full,
                               const std::vector<std::uint8_t>& rho, const PriorConfig& prior) {
  const int t_star = static_cast<int>(y_tilde.rows());
  const int d = static_cast<int>(y_tilde.cols());
  if (t_star < 1) throw invalid_argument("log_marginal_likelihood: empty pre-period");
  if (static_cast<int>(rho.size()) != x_full.cols()) {
    throw invalid_argument("log_marginal_likelihood: rho size does not match covariate count");
  }

  const Matrix x_sel = select_columns(x_full, rho);
  const int p = static_cast<int>(x_sel.cols());

  double logdet_h = 0.0, logdet_w = 0.0;
  Matrix ss = prior.S_eps + y_tilde.transpose() * y_tilde;
  if (p > 0) {
    Matrix gram = x_sel.transpose() * x_sel;
    symmetrize(gram);
    Eigen::LLT<Matrix> llt_gram(gram);
    if (llt_gram.info() != Eigen::Success) {
      throw numerical_error("log_marginal_likelihood: selected regressors are collinear");
    }
    const double logdet_gram = 2.0 * Matrix(llt_gram.matrixL()).diagonal().array().log().sum();
    // H = g (X'X)^-1 and W = (X'X + Hinv)^-1 = g/(1+g) (X'X)^-1.
    logdet_h = p * std::log(prior.g) - logdet_gram;
    logdet_w = p * std::log(prior.g / (1.0 + prior.g)) - logdet_gram;
    const Matrix l = normal_equations_chol(x_sel, Matrix(gram / prior.g));
    const Matrix b = x_sel.transpose() * y_tilde;
    const Matrix w = l.triangularView<Eigen::Lower>().solve(b);
    ss -= w.transpose() * w;
  }
  symmetrize(ss);
  const double logdet_ss = logdet_spd(ss, "log_marginal_likelihood SS");
  const double logdet_s = logdet_spd(prior.S_eps, "log_marginal_likelihood S_eps");

  const double half_nu = 0.5 * prior.nu_eps;
  const double half_post = 0.5 * (prior.nu_eps + t_star);
  const double out = -0.5 * d * logdet_h + 0.5 * d * logdet_w - 0.5 * d * t_star * std::log(M_PI) +
                     half_nu * logdet_s + lgamma_multivariate(d, half_post) -
                     lgamma_multivariate(d, half_nu) - half_post * logdet_ss;
  if (!std::isfinite(out)) {
    throw numerical_error("log_marginal_likelihood: non-finite value (implementation bug)");
  }
  return out;
}

std::vector<std::uint8_t> update_selection_vector(const Matrix& y_tilde, const Matrix& x_full,
                                                  const PriorConfig& prior,
                                                  std::vector<std::uint8_t> rho, Rng& rng) {
  const int p = static_cast<int>(x_full.cols());
  if (static_cast<int>(rho.size()) != p) {
    throw invalid_argument("update_selection_vector: rho size does not match covariate count");
  }
  const double log_prior_odds = std::log(prior.pi) - std::log1p(-prior.pi);
  for (int j = 0; j < p; ++j) {
    rho[j] = 1;
    const double lml1 = log_marginal_likelihood(y_tilde, x_full, rho, prior);
    rho[j] = 0;
    const double lml0 = log_marginal_likelihood(y_tilde, x_full, rho, prior);
    const double log_odds = log_prior_odds + lml1 - lml0;
    if (!std::isfinite(log_odds)) {
      throw numerical_error("update_selection_vector: non-finite odds (implementation bug)");
    }
    const double prob_include = 1.0 / (1.0 + std::exp(-log_odds));
    rho[j] = rng.uniform() < prob_include ? 1 : 0;
  }
  return rho;
}

McmcDraws run_gibbs(const TimeSeriesPanel& panel, const std::vector<ComponentSpec>& specs,
                    const PriorConfig& prior, const McmcConfig& config) {
  panel.validate();
  const int d = panel.d();
  const int num_covariates = panel.num_covariates();
  prior.validate(d);
  if (config.niter <= 0) throw invalid_argument("run_gibbs: niter must be positive");
  const int burn = config.resolved_burn_in();
  if (config.niter <= burn) {
    throw invalid_argument("run_gibbs: niter (" + std::to_string(config.niter) +
                           ") must exceed burn-in (" + std::to_string(burn) + ")");
  }
  if (regression_covariates(specs) != num_covariates) {
    throw invalid_argument("run_gibbs: regression component declares " +
                           std::to_string(regression_covariates(specs)) + " covariates, panel has " +
                           std::to_string(num_covariates));
  }
  const SelectionMode selection = regression_selection(specs);

  const StateSpaceSystem structure = assemble_system(specs, d, Matrix::Identity(d, d), 1.0);
  const int t_star = panel.t_star;
  int min_pre = structure.m + 2;
  for (const auto& spec : specs) {
    if (std::holds_alternative<Seasonal>(spec)) {
      min_pre = std::max(min_pre, std::get<Seasonal>(spec).period + 2);
    }
  }
  if (t_star < min_pre) {
    throw invalid_argument("run_gibbs: pre-period length " + std::to_string(t_star) +
                           " is insufficient (need >= " + std::to_string(min_pre) + ")");
  }

  const Matrix y = panel.pre_outcomes();
  const Matrix x = panel.pre_covariates();
  Rng rng = make_rng(config.seed);

  Matrix sigma_eps = prior.S_eps / std::max(1.0, prior.nu_eps - d - 1);
  std::vector<Matrix> sigma_r(structure.r, prior.S_r / std::max(1.0, prior.nu_r - d - 1));
  std::vector<std::uint8_t> rho(num_covariates, 1);
  Matrix beta = Matrix::Zero(num_covariates, d);

  McmcDraws draws;
  draws.t_star = t_star;
  draws.d = d;
  draws.m = structure.m;
  draws.r = structure.r;
  draws.num_covariates = num_covariates;
  draws.niter = config.niter;
  draws.burn_in = burn;
  draws.seed = config.seed;
  draws.states_stored = config.store_states;
  draws.last_state.reserve(config.niter);
  draws.beta.reserve(config.niter);
  draws.rho.reserve(config.niter);
  draws.sigma_eps.reserve(config.niter);
  draws.sigma_r.reserve(config.niter);
  if (config.store_states) draws.states.reserve(config.niter);

  Matrix offsets(t_star, d);
  std::vector<Matrix> eta(structure.r, Matrix(t_star, d));

  const int total = burn + config.niter;
  for (int iter = 0; iter < total; ++iter) {
    // (1) states given parameters, including the one-step-ahead state so that
    // exactly t_star disturbances are recoverable.
    const Matrix* offset_ptr = nullptr;
    if (num_covariates > 0) {
      offsets.noalias() = x * beta;
      offset_ptr = &offsets;
    }
    const StackedModel model(structure, sigma_eps, sigma_r);
    const Matrix state_draw = stacked_simulation_smoother(model, y, offset_ptr, rng, true);

    // (2) disturbance covariances from the implied eta = alpha_{t+1} - T alpha_t.
    for (int t = 0; t < t_star; ++t) {
      const Vector tx = model.apply_t(state_draw.row(t).transpose());
      for (int k = 0; k < structure.r; ++k) {
        const int row = model.disturbance_rows()[k];
        if (row < 0) throw invalid_argument("run_gibbs: R must be a selection matrix");
        eta[k].row(t) =
            state_draw.row(t + 1).segment(row * d, d) - tx.segment(row * d, d).transpose();
      }
    }
    for (int k = 0; k < structure.r; ++k) {
      const InverseWishartPosterior post = full_conditional_sigma_r(eta[k], prior);
      sigma_r[k] = draw_inverse_wishart(post.dof, post.scale, rng);
    }

    // (3) spike-and-slab sweep on the detrended data.
    Matrix y_tilde = y;
    for (int t = 0; t < t_star; ++t) {
      y_tilde.row(t) -= model.observe(state_draw.row(t).transpose()).transpose();
    }
    if (num_covariates > 0 && selection == SelectionMode::kSpikeSlab) {
      rho = update_selection_vector(y_tilde, x, prior, rho, rng);
    }
    const Matrix x_sel = select_columns(x, rho);

    // (4) observation covariance with beta integrated out.
    const InverseWishartPosterior post_eps = full_conditional_sigma_eps(y_tilde, x_sel, prior);
    sigma_eps = draw_inverse_wishart(post_eps.dof, post_eps.scale, rng);

    // (5) regression coefficients; excluded rows stay exactly zero.
    beta.setZero();
    if (x_sel.cols() > 0) {
      const BetaFullConditional fc = full_conditional_beta(y_tilde, x_sel, prior);
      const Matrix beta_sel = draw_beta(fc, sigma_eps, rng);
      int col = 0;
      for (int j = 0; j < num_covariates; ++j) {
        if (rho[j]) beta.row(j) = beta_sel.row(col++);
      }
    }

    if (iter < burn) continue;
    Matrix last(structure.m, d);
    for (int i = 0; i < structure.m; ++i) {
      last.row(i) = state_draw.row(t_star - 1).segment(i * d, d);
    }
    draws.last_state.push_back(std::move(last));
    if (config.store_states) {
      std::vector<Matrix> path;
      path.reserve(t_star);
      for (int t = 0; t < t_star; ++t) {
        Matrix at(structure.m, d);
        for (int i = 0; i < structure.m; ++i) at.row(i) = state_draw.row(t).segment(i * d, d);
        path.push_back(std::move(at));
      }
      draws.states.push_back(std::move(path));
    }
    draws.beta.push_back(beta);
    draws.rho.push_back(rho);
    draws.sigma_eps.push_back(sigma_eps);
    draws.sigma_r.push_back(sigma_r);
  }
  return draws;
}

std::vector<ParameterChain> covariance_chains(const McmcDraws& draws,
                                              const std::vector<std::string>& block_names) {
  if (static_cast<int>(block_names.size()) != draws.r) {
    throw invalid_argument("covariance_chains: one name per stochastic block required");
  }
  const int n = draws.size();
  std::vector<ParameterChain> chains;
  auto add_matrix_chains = [&](const std::string& prefix, auto getter) {
    for (int i = 0; i < draws.d; ++i) {
      for (int j = i; j < draws.d; ++j) {
        ParameterChain chain;
        chain.name = prefix + "_" + std::to_string(i + 1) + std::to_string(j + 1);
        chain.values.reserve(n);
        for (int s = 0; s < n; ++s) chain.values.push_back(getter(s)(i, j));
        chains.push_back(std::move(chain));
      }
    }
  };
  add_matrix_chains("obs", [&](int s) -> const Matrix& { return draws.sigma_eps[s]; });
  for (int k = 0; k < draws.r; ++k) {
    add_matrix_chains(block_names[k], [&, k](int s) -> const Matrix& { return draws.sigma_r[s][k]; });
  }
  return chains;
}

}  // namespace mbsts
