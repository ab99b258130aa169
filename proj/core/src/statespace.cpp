#include "mbsts/statespace.hpp"

#include <cmath>

namespace mbsts {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_series(const StateSpaceSystem& system, const Matrix& y, const Matrix* offsets) {
  system.validate();
  if (y.rows() < 1) throw invalid_argument("state space: series must have length >= 1");
  if (y.cols() != system.d) {
    throw invalid_argument("state space: y has " + std::to_string(y.cols()) +
                           " columns, expected d = " + std::to_string(system.d));
  }
  if (offsets && (offsets->rows() != y.rows() || offsets->cols() != y.cols())) {
    throw invalid_argument("state space: offsets must match y in shape");
  }
}

}  // namespace

Matrix StateSpaceSystem::state_noise_row_cov(int t) const {
  const Matrix& rt = R_at(t);
  return rt * c.asDiagonal() * rt.transpose();
}

void StateSpaceSystem::validate() const {
  if (d < 1 || m < 1 || r < 0) throw invalid_argument("StateSpaceSystem: d >= 1, m >= 1, r >= 0 required");
  auto check_z = [&](const RowVector& z) {
    if (z.cols() != m) throw invalid_argument("StateSpaceSystem: Z must be 1 x m");
  };
  auto check_t = [&](const Matrix& t) {
    if (t.rows() != m || t.cols() != m) throw invalid_argument("StateSpaceSystem: T must be m x m");
  };
  auto check_r = [&](const Matrix& rr) {
    if (rr.rows() != m || rr.cols() != r) throw invalid_argument("StateSpaceSystem: R must be m x r");
  };
  check_z(Z);
  check_t(T);
  check_r(R);
  for (const auto& z : Z_path) check_z(z);
  for (const auto& t : T_path) check_t(t);
  for (const auto& rr : R_path) check_r(rr);
  if (c.size() != r) throw invalid_argument("StateSpaceSystem: c must have one scale per disturbance row");
  if ((c.array() < 0).any()) throw invalid_argument("StateSpaceSystem: disturbance scales must be nonnegative");
  if (H < 0) throw invalid_argument("StateSpaceSystem: H must be nonnegative");
  for (double h : H_path) {
    if (h < 0) throw invalid_argument("StateSpaceSystem: H must be nonnegative");
  }
  if (Sigma.rows() != d || Sigma.cols() != d) throw invalid_argument("StateSpaceSystem: Sigma must be d x d");
  require_spd(Sigma, "StateSpaceSystem Sigma");
  if (a1.rows() != m || a1.cols() != d) throw invalid_argument("StateSpaceSystem: a1 must be m x d");
  if (P1.rows() != m || P1.cols() != m) throw invalid_argument("StateSpaceSystem: P1 must be m x m");
  if (!is_symmetric_psd(P1)) throw invalid_argument("StateSpaceSystem: P1 must be symmetric PSD");
}

FilterResult kalman_filter(const StateSpaceSystem& system, const Matrix& y, const Matrix* offsets) {
  check_series(system, y, offsets);
  const int n = static_cast<int>(y.rows());
  const int d = system.d;
  const int m = system.m;

  const Matrix sigma_chol = cholesky(system.Sigma, "kalman_filter Sigma");
  const double logdet_sigma = 2.0 * sigma_chol.diagonal().array().log().sum();

  FilterResult out;
  out.state_mean.reserve(n);
  out.state_cov.reserve(n);
  out.innovations.resize(n, d);
  out.innovation_scale.resize(n);

  Matrix a = system.a1;
  Matrix p = system.P1;
  const Matrix eye = Matrix::Identity(m, m);

  for (int t = 0; t < n; ++t) {
    const RowVector& z = system.Z_at(t);
    const Matrix& tt = system.T_at(t);
    const double h = system.H_at(t);

    const double f = (z * p * z.transpose()).value() + h;
    if (!std::isfinite(f) || f <= 0.0) {
      throw numerical_error("kalman_filter: innovation variance is not positive at t=" + std::to_string(t));
    }
    RowVector v = y.row(t) - z * a;
    if (offsets) v -= offsets->row(t);

    const Vector w = sigma_chol.triangularView<Eigen::Lower>().solve(v.transpose());
    out.loglik += -0.5 * d * std::log(kTwoPi * f) - 0.5 * logdet_sigma - 0.5 * w.squaredNorm() / f;

    out.state_mean.push_back(a);
    out.state_cov.push_back(p);
    out.innovations.row(t) = v;
    out.innovation_scale[t] = f;

    // Measurement update in Joseph form, then time update.
    const Vector kf = p * z.transpose() / f;
    const Matrix a_upd = a + kf * v;
    const Matrix imkz = eye - kf * z;
    Matrix p_upd = imkz * p * imkz.transpose() + (h * kf) * kf.transpose();
    symmetrize(p_upd);

    a = tt * a_upd;
    p = tt * p_upd * tt.transpose() + system.state_noise_row_cov(t);
    symmetrize(p);
  }
  return out;
}

SmoothedMoments smooth_moments(const StateSpaceSystem& system, const Matrix& y, const Matrix* offsets) {
  const FilterResult filt = kalman_filter(system, y, offsets);
  const int n = static_cast<int>(y.rows());
  const int d = system.d;
  const int m = system.m;

  SmoothedMoments out;
  out.mean.assign(n, Matrix());
  out.row_cov.assign(n, Matrix());

  Matrix r = Matrix::Zero(m, d);
  Matrix nn = Matrix::Zero(m, m);
  for (int t = n - 1; t >= 0; --t) {
    const RowVector& z = system.Z_at(t);
    const Matrix& tt = system.T_at(t);
    const Matrix& p = filt.state_cov[t];
    const double f = filt.innovation_scale[t];
    const Vector k = tt * p * z.transpose() / f;
    const Matrix l = tt - k * z;

    r = z.transpose() * (filt.innovations.row(t) / f) + l.transpose() * r;
    nn = z.transpose() * z / f + l.transpose() * nn * l;

    out.mean[t] = filt.state_mean[t] + p * r;
    Matrix v = p - p * nn * p;
    symmetrize(v);
    out.row_cov[t] = std::move(v);
  }
  return out;
}

std::vector<Matrix> simulation_smoother(const StateSpaceSystem& system, const Matrix& y,
                                        const Matrix* offsets, Rng& rng) {
  check_series(system, y, offsets);
  const int n = static_cast<int>(y.rows());
  const int d = system.d;
  const int m = system.m;
  const int r_dim = system.r;

  const Matrix sigma_chol = cholesky(system.Sigma, "simulation_smoother Sigma");
  const Matrix p1_sqrt = psd_sqrt(system.P1);
  const Vector c_sqrt = system.c.array().sqrt();

  // Unconditional draw from the zero-mean model (Durbin & Koopman 2002,
  // algorithm 2, with the one-pass variant of Jarocinski 2015).
  std::vector<Matrix> alpha_plus(n);
  Matrix y_plus(n, d);
  Matrix state = p1_sqrt * rng.normal_matrix(m, d) * sigma_chol.transpose();
  for (int t = 0; t < n; ++t) {
    alpha_plus[t] = state;
    const double h_sqrt = std::sqrt(system.H_at(t));
    y_plus.row(t) = system.Z_at(t) * state +
                    h_sqrt * (rng.normal_matrix(1, d) * sigma_chol.transpose());
    Matrix eta = rng.normal_matrix(r_dim, d) * sigma_chol.transpose();
    eta = c_sqrt.asDiagonal() * eta;
    state = system.T_at(t) * state + system.R_at(t) * eta;
  }

  Matrix y_star = y - y_plus;
  if (offsets) y_star -= *offsets;
  const FilterResult filt = kalman_filter(system, y_star, nullptr);

  // Backward pass: rm1[t] holds r_{t-1}.
  std::vector<Matrix> rm1(n);
  Matrix r = Matrix::Zero(m, d);
  for (int t = n - 1; t >= 0; --t) {
    const RowVector& z = system.Z_at(t);
    const Matrix& tt = system.T_at(t);
    const double f = filt.innovation_scale[t];
    const Vector k = tt * filt.state_cov[t] * z.transpose() / f;
    const Matrix l = tt - k * z;
    r = z.transpose() * (filt.innovations.row(t) / f) + l.transpose() * r;
    rm1[t] = r;
  }

  // Fast state smoother, then add the unconditional draw back.
  std::vector<Matrix> draw(n);
  Matrix smoothed = system.a1 + system.P1 * rm1[0];
  draw[0] = smoothed + alpha_plus[0];
  for (int t = 1; t < n; ++t) {
    smoothed = system.T_at(t - 1) * smoothed + system.state_noise_row_cov(t - 1) * rm1[t];
    draw[t] = smoothed + alpha_plus[t];
  }
  return draw;
}

// ---------------------------------------------------------------------------
// Stacked model.

StackedModel::StackedModel(const StateSpaceSystem& structure, Matrix sigma_eps,
                           std::vector<Matrix> sigma_r, const Matrix* init_col_cov)
    : structure_(&structure),
      d_(structure.d),
      m_(structure.m),
      r_(structure.r),
      sigma_eps_(std::move(sigma_eps)),
      sigma_r_(std::move(sigma_r)) {
  structure.validate();
  if (structure.time_varying()) {
    throw invalid_argument("StackedModel: time-varying system matrices are not supported");
  }
  if (sigma_eps_.rows() != d_ || sigma_eps_.cols() != d_) {
    throw invalid_argument("StackedModel: sigma_eps must be d x d");
  }
  if (static_cast<int>(sigma_r_.size()) != r_) {
    throw invalid_argument("StackedModel: one sigma_r per disturbance row required");
  }
  sigma_eps_chol_ = cholesky(sigma_eps_, "StackedModel sigma_eps");
  sigma_r_chol_.reserve(r_);
  for (const auto& s : sigma_r_) {
    if (s.rows() != d_ || s.cols() != d_) throw invalid_argument("StackedModel: sigma_r must be d x d");
    sigma_r_chol_.push_back(psd_sqrt(s));
  }

  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      if (structure.T(i, j) != 0.0) t_nz_.emplace_back(i, j, structure.T(i, j));
    }
  }
  for (int i = 0; i < m_; ++i) {
    if (structure.Z(i) != 0.0) z_nz_.emplace_back(i, structure.Z(i));
  }
  r_rows_.assign(r_, -1);
  for (int k = 0; k < r_; ++k) {
    int hits = 0;
    for (int i = 0; i < m_; ++i) {
      if (structure.R(i, k) != 0.0) {
        r_rows_[k] = i;
        ++hits;
      }
    }
    if (hits != 1 || structure.R(r_rows_[k], k) != 1.0) r_rows_[k] = -1;  // not a pure selection column
  }

  x1_.resize(m_ * d_);
  for (int i = 0; i < m_; ++i) x1_.segment(i * d_, d_) = structure.a1.row(i).transpose();
  const Matrix col = init_col_cov ? *init_col_cov : sigma_eps_;
  if (col.rows() != d_ || col.cols() != d_) throw invalid_argument("StackedModel: init_col_cov must be d x d");
  p1_ = kron(structure.P1, col);
}

void StackedModel::apply_t_left(const Matrix& in, Matrix& out) const {
  out.setZero(in.rows(), in.cols());
  for (const auto& [i, j, v] : t_nz_) {
    out.middleRows(i * d_, d_) += v * in.middleRows(j * d_, d_);
  }
}

void StackedModel::apply_t_right_transpose(const Matrix& in, Matrix& out) const {
  out.setZero(in.rows(), in.cols());
  for (const auto& [i, j, v] : t_nz_) {
    out.middleCols(i * d_, d_) += v * in.middleCols(j * d_, d_);
  }
}

Vector StackedModel::apply_t(const Vector& x) const {
  Vector out = Vector::Zero(x.size());
  for (const auto& [i, j, v] : t_nz_) out.segment(i * d_, d_) += v * x.segment(j * d_, d_);
  return out;
}

Vector StackedModel::apply_t_transpose(const Vector& x) const {
  Vector out = Vector::Zero(x.size());
  for (const auto& [i, j, v] : t_nz_) out.segment(j * d_, d_) += v * x.segment(i * d_, d_);
  return out;
}

Vector StackedModel::observe(const Vector& x) const {
  Vector out = Vector::Zero(d_);
  for (const auto& [i, v] : z_nz_) out += v * x.segment(i * d_, d_);
  return out;
}

Matrix StackedModel::observe_cols(const Matrix& p) const {
  Matrix out = Matrix::Zero(p.rows(), d_);
  for (const auto& [i, v] : z_nz_) out += v * p.middleCols(i * d_, d_);
  return out;
}

Vector StackedModel::distribute_obs(const Vector& v) const {
  Vector out = Vector::Zero(m_ * d_);
  for (const auto& [i, w] : z_nz_) out.segment(i * d_, d_) += w * v;
  return out;
}

Matrix StackedModel::state_noise_cov() const {
  Matrix out = Matrix::Zero(m_ * d_, m_ * d_);
  const Matrix& rsel = structure_->R;
  for (int k = 0; k < r_; ++k) {
    for (int i = 0; i < m_; ++i) {
      if (rsel(i, k) == 0.0) continue;
      for (int j = 0; j < m_; ++j) {
        if (rsel(j, k) == 0.0) continue;
        out.block(i * d_, j * d_, d_, d_) += rsel(i, k) * rsel(j, k) * sigma_r_[k];
      }
    }
  }
  return out;
}

Vector StackedModel::apply_state_noise_cov(const Vector& x) const {
  Vector out = Vector::Zero(x.size());
  const Matrix& rsel = structure_->R;
  for (int k = 0; k < r_; ++k) {
    Vector acc = Vector::Zero(d_);
    for (int j = 0; j < m_; ++j) {
      if (rsel(j, k) != 0.0) acc += rsel(j, k) * x.segment(j * d_, d_);
    }
    const Vector contrib = sigma_r_[k] * acc;
    for (int i = 0; i < m_; ++i) {
      if (rsel(i, k) != 0.0) out.segment(i * d_, d_) += rsel(i, k) * contrib;
    }
  }
  return out;
}

void StackedModel::draw_state_noise(Rng& rng, Vector& out, Matrix* blocks) const {
  out.setZero(m_ * d_);
  if (blocks) blocks->setZero(r_, d_);
  const Matrix& rsel = structure_->R;
  for (int k = 0; k < r_; ++k) {
    Vector g(d_);
    for (int s = 0; s < d_; ++s) g[s] = rng.normal();
    const Vector eta = sigma_r_chol_[k] * g;
    if (blocks) blocks->row(k) = eta.transpose();
    for (int i = 0; i < m_; ++i) {
      if (rsel(i, k) != 0.0) out.segment(i * d_, d_) += rsel(i, k) * eta;
    }
  }
}

Vector StackedModel::draw_obs_noise(Rng& rng) const {
  Vector g(d_);
  for (int s = 0; s < d_; ++s) g[s] = rng.normal();
  return sigma_eps_chol_ * g;
}

StackedFilterResult stacked_filter(const StackedModel& model, const Matrix& y, const Matrix* offsets) {
  const int n = static_cast<int>(y.rows());
  const int d = model.d();
  const int nx = model.state_dim();
  if (n < 1) throw invalid_argument("stacked_filter: series must have length >= 1");
  if (y.cols() != d) throw invalid_argument("stacked_filter: y has wrong width");
  if (offsets && (offsets->rows() != n || offsets->cols() != d)) {
    throw invalid_argument("stacked_filter: offsets must match y in shape");
  }

  StackedFilterResult out;
  out.innovations.resize(n, d);
  out.finv.reserve(n);
  out.gain.reserve(n);
  out.pred_mean.reserve(n);
  out.pred_cov.reserve(n);

  const Matrix rqr = model.state_noise_cov();
  Vector x = model.x1();
  Matrix p = model.p1();
  Matrix tmp(nx, nx), pu(nx, nx);

  for (int t = 0; t < n; ++t) {
    Vector v = y.row(t).transpose() - model.observe(x);
    if (offsets) v -= offsets->row(t).transpose();

    const Matrix pzt = model.observe_cols(p);  // nx x d
    // F = (Z (x) I) P (Z (x) I)' + sigma_eps, gathered from pzt.
    Matrix f = model.sigma_eps();
    for (int i = 0; i < model.m(); ++i) {
      const double zi = model.structure().Z(i);
      if (zi != 0.0) f += zi * pzt.middleRows(i * d, d);
    }
    symmetrize(f);
    Eigen::LLT<Matrix> llt(f);
    if (llt.info() != Eigen::Success) {
      throw numerical_error("stacked_filter: innovation covariance not PD at t=" + std::to_string(t));
    }
    const Matrix finv = llt.solve(Matrix::Identity(d, d));
    const double logdet_f = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    out.loglik += -0.5 * (d * std::log(kTwoPi) + logdet_f + v.dot(finv * v));

    const Matrix kf = pzt * finv;
    out.innovations.row(t) = v.transpose();
    out.finv.push_back(finv);
    out.gain.push_back(kf);
    out.pred_mean.push_back(x);
    out.pred_cov.push_back(p);

    // Joseph-form measurement update written with rank-d pieces:
    // Pu = P - Kf (PZ')' - (PZ') Kf' + Kf F Kf'.
    pu = p;
    pu.noalias() -= kf * pzt.transpose();
    pu.noalias() -= pzt * kf.transpose();
    pu.noalias() += kf * f * kf.transpose();
    symmetrize(pu);

    const Vector xu = x + kf * v;
    x = model.apply_t(xu);
    model.apply_t_left(pu, tmp);
    model.apply_t_right_transpose(tmp, p);
    p += rqr;
    symmetrize(p);
  }
  return out;
}

namespace {

// rm1[t] = r_{t-1} of the Durbin-Koopman backward recursion.
std::vector<Vector> stacked_backward_pass(const StackedModel& model, const StackedFilterResult& filt) {
  const int n = static_cast<int>(filt.innovations.rows());
  std::vector<Vector> rm1(n);
  Vector r = Vector::Zero(model.state_dim());
  for (int t = n - 1; t >= 0; --t) {
    // L_t' r = (I - Kf Z)' T' r.
    Vector u = model.apply_t_transpose(r);
    u -= model.distribute_obs(filt.gain[t].transpose() * u);
    r = model.distribute_obs(filt.finv[t] * filt.innovations.row(t).transpose()) + u;
    rm1[t] = r;
  }
  return rm1;
}

}  // namespace

void stacked_smoothed_moments(const StackedModel& model, const Matrix& y, const Matrix* offsets,
                              Matrix* means, std::vector<Matrix>* covs) {
  const StackedFilterResult filt = stacked_filter(model, y, offsets);
  const int n = static_cast<int>(y.rows());
  const int nx = model.state_dim();
  const int d = model.d();

  // Dense Z and T for the reference path.
  Matrix zs = Matrix::Zero(d, nx);
  for (int i = 0; i < model.m(); ++i) {
    if (model.structure().Z(i) != 0.0) {
      zs.middleCols(i * d, d) = model.structure().Z(i) * Matrix::Identity(d, d);
    }
  }
  Matrix ts = kron(model.structure().T, Matrix::Identity(d, d));

  if (means) means->resize(n, nx);
  if (covs) covs->assign(n, Matrix());

  Vector r = Vector::Zero(nx);
  Matrix nn = Matrix::Zero(nx, nx);
  for (int t = n - 1; t >= 0; --t) {
    const Matrix k = ts * filt.gain[t];
    const Matrix l = ts - k * zs;
    r = zs.transpose() * filt.finv[t] * filt.innovations.row(t).transpose() + l.transpose() * r;
    nn = zs.transpose() * filt.finv[t] * zs + l.transpose() * nn * l;
    if (means) means->row(t) = (filt.pred_mean[t] + filt.pred_cov[t] * r).transpose();
    if (covs) {
      Matrix v = filt.pred_cov[t] - filt.pred_cov[t] * nn * filt.pred_cov[t];
      symmetrize(v);
      (*covs)[t] = std::move(v);
    }
  }
}

Matrix stacked_simulation_smoother(const StackedModel& model, const Matrix& y, const Matrix* offsets,
                                   Rng& rng, bool include_one_step_ahead) {
  const int n = static_cast<int>(y.rows());
  const int d = model.d();
  const int nx = model.state_dim();

  // Unconditional draw from the zero-mean model.
  const Matrix p1_sqrt = psd_sqrt(model.p1());
  Matrix x_plus(n + 1, nx);
  Matrix y_plus(n, d);
  {
    Vector g(nx);
    for (int i = 0; i < nx; ++i) g[i] = rng.normal();
    x_plus.row(0) = (p1_sqrt * g).transpose();
  }
  Vector noise(nx);
  for (int t = 0; t < n; ++t) {
    const Vector xt = x_plus.row(t).transpose();
    y_plus.row(t) = (model.observe(xt) + model.draw_obs_noise(rng)).transpose();
    model.draw_state_noise(rng, noise);
    x_plus.row(t + 1) = (model.apply_t(xt) + noise).transpose();
  }

  Matrix y_star = y - y_plus;
  if (offsets) y_star -= *offsets;
  const StackedFilterResult filt = stacked_filter(model, y_star, nullptr);
  const std::vector<Vector> rm1 = stacked_backward_pass(model, filt);

  Matrix out(include_one_step_ahead ? n + 1 : n, nx);
  Vector smoothed = model.x1() + model.p1() * rm1[0];
  out.row(0) = smoothed.transpose() + x_plus.row(0);
  for (int t = 1; t < n; ++t) {
    smoothed = model.apply_t(smoothed) + model.apply_state_noise_cov(rm1[t]);
    out.row(t) = smoothed.transpose() + x_plus.row(t);
  }
  if (include_one_step_ahead) {
    smoothed = model.apply_t(smoothed);
    out.row(n) = smoothed.transpose() + x_plus.row(n);
  }
  return out;
}

}  // namespace mbsts
