#ifndef MBSTS_STATESPACE_HPP_
#define MBSTS_STATESPACE_HPP_

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mbsts/linalg.hpp"
#include "mbsts/rng.hpp"

namespace mbsts {

// Linear-Gaussian state space model for a d-variate series sharing one
// cross-series covariance Sigma:
//
//   y_t     = Z alpha_t + offset_t + eps_t,    eps_t   ~ MN(0, H_t, Sigma)
//   alpha_t+1 = T alpha_t + R eta_t,           eta_t   ~ MN(0, C, Sigma)
//   alpha_1 ~ MN(a1, P1, Sigma)
//
// alpha_t is m x d (one column per series), eta_t is r x d, C = diag(c).
// Because every error term shares the column covariance Sigma, filtering and
// smoothing reduce to recursions on m x m row covariances.
struct StateSpaceSystem {
  int d = 0;  // series count
  int m = 0;  // state rows
  int r = 0;  // disturbance rows

  RowVector Z;  // 1 x m
  Matrix T;     // m x m
  Matrix R;     // m x r
  double H = 1.0;
  Vector c;      // r nonnegative disturbance scales (diagonal of C)
  Matrix Sigma;  // d x d, PD
  Matrix a1;     // m x d
  Matrix P1;     // m x m, PSD

  // Component name -> [begin, end) state-row range.
  std::map<std::string, std::pair<int, int>> block_layout;

  // Optional time-varying system matrices; empty vectors mean constant.
  std::vector<RowVector> Z_path;
  std::vector<Matrix> T_path;
  std::vector<Matrix> R_path;
  std::vector<double> H_path;

  const RowVector& Z_at(int t) const { return Z_path.empty() ? Z : Z_path.at(t); }
  const Matrix& T_at(int t) const { return T_path.empty() ? T : T_path.at(t); }
  const Matrix& R_at(int t) const { return R_path.empty() ? R : R_path.at(t); }
  double H_at(int t) const { return H_path.empty() ? H : H_path.at(t); }
  bool time_varying() const {
    return !(Z_path.empty() && T_path.empty() && R_path.empty() && H_path.empty());
  }

  // R C R' at time t.
  Matrix state_noise_row_cov(int t) const;

  // Throws invalid_argument on inconsistent dimensions or invalid (non-PD /
  // non-PSD) covariance inputs.
  void validate() const;
};

struct FilterResult {
  std::vector<Matrix> state_mean;  // a_t = E[alpha_t | y_1:t-1], m x d
  std::vector<Matrix> state_cov;   // P_t row covariance, m x m, symmetric PSD
  Matrix innovations;              // n x d one-step prediction errors
  Vector innovation_scale;         // f_t = Z P_t Z' + H_t
  double loglik = 0.0;
};

struct SmoothedMoments {
  std::vector<Matrix> mean;     // E[alpha_t | y_1:n], m x d
  std::vector<Matrix> row_cov;  // V_t with Cov(vec alpha_t | y) = V_t (x) Sigma
};

// Kalman filter exploiting the shared column covariance: only m x m row
// covariances are propagated and the innovation variance is the scalar f_t.
// `offsets` (n x d), when present, is subtracted from y before filtering
// (regression effects X_t beta enter this way).
FilterResult kalman_filter(const StateSpaceSystem& system, const Matrix& y,
                           const Matrix* offsets = nullptr);

// Fixed-interval smoother moments via the r/N backward recursions.
SmoothedMoments smooth_moments(const StateSpaceSystem& system, const Matrix& y,
                               const Matrix* offsets = nullptr);

// One exact draw of alpha_1:n given y, by the Durbin & Koopman (2002)
// simulation smoother with the mean-correction (one-filter-pass) variant.
// Returns n matrices of size m x d.
std::vector<Matrix> simulation_smoother(const StateSpaceSystem& system, const Matrix& y,
                                        const Matrix* offsets, Rng& rng);

// ---------------------------------------------------------------------------
// Stacked representation with free per-block covariances.
//
// During posterior sampling the observation covariance and each stochastic
// block's disturbance covariance are separate d x d matrices, which breaks
// the shared-Sigma factorization above. The model is then filtered exactly in
// the stacked space x_t = vec(alpha_t, row-major), of dimension m*d:
//
//   y_t    = (Z (x) I_d) x_t + offset_t + eps_t,  eps_t ~ N(0, sigma_eps)
//   x_t+1  = (T (x) I_d) x_t + (R (x) I_d) w_t,   block k of w_t ~ N(0, sigma_r[k])
//
// Only time-constant Z, T, R are supported here.
class StackedModel {
 public:
  StackedModel(const StateSpaceSystem& structure, Matrix sigma_eps,
               std::vector<Matrix> sigma_r, const Matrix* init_col_cov = nullptr);

  int d() const { return d_; }
  int m() const { return m_; }
  int r() const { return r_; }
  int state_dim() const { return m_ * d_; }

  const Matrix& sigma_eps() const { return sigma_eps_; }
  const std::vector<Matrix>& sigma_r() const { return sigma_r_; }
  const StateSpaceSystem& structure() const { return *structure_; }

  const Vector& x1() const { return x1_; }
  const Matrix& p1() const { return p1_; }

  // out = (T (x) I_d) * M and out = M * (T (x) I_d)'.
  void apply_t_left(const Matrix& in, Matrix& out) const;
  void apply_t_right_transpose(const Matrix& in, Matrix& out) const;
  Vector apply_t(const Vector& x) const;
  Vector apply_t_transpose(const Vector& x) const;

  // y-space projections of the stacked state.
  Vector observe(const Vector& x) const;            // (Z (x) I) x
  Matrix observe_cols(const Matrix& p) const;       // P (Z (x) I)'
  Vector distribute_obs(const Vector& v) const;     // (Z (x) I)' v
  Matrix state_noise_cov() const;                   // (R (x) I) Q (R (x) I)'
  Vector apply_state_noise_cov(const Vector& x) const;

  // Draw w and return (R (x) I) w into `out` (size md). Also exposes the raw
  // block draws when `blocks` is non-null (r x d, row per block).
  void draw_state_noise(Rng& rng, Vector& out, Matrix* blocks = nullptr) const;
  Vector draw_obs_noise(Rng& rng) const;

  // State rows carrying disturbances (position of each block in the state).
  const std::vector<int>& disturbance_rows() const { return r_rows_; }

 private:
  const StateSpaceSystem* structure_;
  int d_, m_, r_;
  Matrix sigma_eps_;
  std::vector<Matrix> sigma_r_;
  Matrix sigma_eps_chol_;
  std::vector<Matrix> sigma_r_chol_;
  Vector x1_;
  Matrix p1_;
  std::vector<std::tuple<int, int, double>> t_nz_;  // nonzeros of T
  std::vector<std::pair<int, double>> z_nz_;        // nonzeros of Z
  std::vector<int> r_rows_;
};

struct StackedFilterResult {
  double loglik = 0.0;
  // Quantities retained for the backward smoothing pass.
  Matrix innovations;                 // n x d
  std::vector<Matrix> finv;           // F_t^-1 (d x d)
  std::vector<Matrix> gain;           // Kf_t = P_t (Z(x)I)' F_t^-1 (md x d)
  std::vector<Vector> pred_mean;      // x_t | y_1:t-1
  std::vector<Matrix> pred_cov;       // P_t | y_1:t-1
};

StackedFilterResult stacked_filter(const StackedModel& model, const Matrix& y,
                                   const Matrix* offsets = nullptr);

// Exact smoothed moments in the stacked space (reference/testing path).
void stacked_smoothed_moments(const StackedModel& model, const Matrix& y,
                              const Matrix* offsets, Matrix* means,
                              std::vector<Matrix>* covs);

// Exact draw of x_1:n (rows) -- and x_n+1 as the final extra row when
// `include_one_step_ahead` -- from Pr(x | y, parameters), DK (2002) with mean
// correction. Output is (n [+1]) x (m*d).
Matrix stacked_simulation_smoother(const StackedModel& model, const Matrix& y,
                                   const Matrix* offsets, Rng& rng,
                                   bool include_one_step_ahead = false);

}  // namespace mbsts

#endif  // MBSTS_STATESPACE_HPP_
