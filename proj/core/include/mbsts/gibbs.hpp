#ifndef MBSTS_GIBBS_HPP_
#define MBSTS_GIBBS_HPP_

#include <cstdint>
#include <vector>

#include "mbsts/components.hpp"
#include "mbsts/panel.hpp"
#include "mbsts/priors.hpp"
#include "mbsts/rng.hpp"

namespace mbsts {

// Conjugate full conditional of the regression coefficients given detrended
// data: beta | . ~ MN(M, W, sigma_eps) with W = (X'X + Hinv)^-1 and
// M = W X'Ytilde.
struct BetaFullConditional {
  Matrix M;  // p x d
  Matrix W;  // p x p
};

BetaFullConditional full_conditional_beta(const Matrix& y_tilde, const Matrix& x_sel,
                                          const Matrix& h_inv);
// Zellner form: H_rho = g (X'X)^-1, i.e. Hinv = (1/g) X'X.
BetaFullConditional full_conditional_beta(const Matrix& y_tilde, const Matrix& x_sel,
                                          const PriorConfig& prior);
Matrix draw_beta(const BetaFullConditional& fc, const Matrix& sigma_eps, Rng& rng);

struct InverseWishartPosterior {
  double dof = 0.0;
  Matrix scale;
};

// sigma_eps | Ytilde, rho ~ IW(nu_eps + t*, S_eps + Y'Y - M'W^-1 M), with beta
// integrated out under the Zellner prior. x_sel may have zero columns.
InverseWishartPosterior full_conditional_sigma_eps(const Matrix& y_tilde, const Matrix& x_sel,
                                                   const PriorConfig& prior);

// sigma_r | eta ~ IW(nu_r + t*, S_r + eta'eta) for one stochastic block.
InverseWishartPosterior full_conditional_sigma_r(const Matrix& eta, const PriorConfig& prior);

// log Pr(Ytilde | rho) with beta and sigma_eps integrated out analytically.
// All determinant and multivariate-gamma arithmetic is in the log domain.
double log_marginal_likelihood(const Matrix& y_tilde, const Matrix& x_full,
                               const std::vector<std::uint8_t>& rho, const PriorConfig& prior);

// One full sweep of the spike-and-slab selection vector, component by
// component in ascending index order, each from its exact Bernoulli full
// conditional.
std::vector<std::uint8_t> update_selection_vector(const Matrix& y_tilde, const Matrix& x_full,
                                                  const PriorConfig& prior,
                                                  std::vector<std::uint8_t> rho, Rng& rng);

struct McmcConfig {
  int niter = 1000;       // retained draws
  int burn_in = -1;       // -1 resolves to max(100, niter / 10)
  std::uint64_t seed = 1;
  bool store_states = true;  // keep full alpha_{1:t*} per draw

  int resolved_burn_in() const { return burn_in >= 0 ? burn_in : std::max(100, niter / 10); }
};

// Stored posterior sample. Rows of beta with rho = 0 are exactly zero.
struct McmcDraws {
  int t_star = 0, d = 0, m = 0, r = 0, num_covariates = 0;
  int niter = 0, burn_in = 0;
  std::uint64_t seed = 0;
  bool states_stored = true;

  std::vector<std::vector<Matrix>> states;          // niter x t* of (m x d)
  std::vector<Matrix> last_state;                   // niter of (m x d), alpha at t*
  std::vector<Matrix> beta;                         // niter of (P x d)
  std::vector<std::vector<std::uint8_t>> rho;       // niter of P
  std::vector<Matrix> sigma_eps;                    // niter of (d x d)
  std::vector<std::vector<Matrix>> sigma_r;         // niter x r of (d x d)

  int size() const { return static_cast<int>(sigma_eps.size()); }
};

// Blocked Gibbs sampler alternating (1) an exact simulation-smoother draw of
// the states, (2) IW updates of each block disturbance covariance from the
// implied state disturbances, (3) a one-at-a-time spike-and-slab sweep with
// beta and sigma_eps integrated out, (4) the sigma_eps IW update, and (5) the
// matrix-normal beta draw.
McmcDraws run_gibbs(const TimeSeriesPanel& panel, const std::vector<ComponentSpec>& specs,
                    const PriorConfig& prior, const McmcConfig& config);

// Scalar chains of the stored covariance parameters, for convergence
// diagnostics: upper-triangle entries of sigma_eps and each sigma_r block.
struct ParameterChain {
  std::string name;
  std::vector<double> values;
};
std::vector<ParameterChain> covariance_chains(const McmcDraws& draws,
                                              const std::vector<std::string>& block_names);

}  // namespace mbsts

#endif  // MBSTS_GIBBS_HPP_
