#include "mbsts/oracle.hpp"

#include <cmath>
#include <functional>

namespace mbsts {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

struct JointBuilder {
  int nx = 0, ny = 0, nw = 0;
  Vector x1_mean;
  Matrix x1_load;                              // nx x nx
  std::function<Matrix(int)> transition;       // nx x nx
  std::function<Matrix(int)> state_noise;      // nx x nw
  std::function<Matrix(int)> observation;      // ny x nx
  std::function<Matrix(int)> obs_noise;        // ny x ny
};

JointGaussian assemble(const JointBuilder& b, int n, const Matrix* offsets) {
  if (n < 1) throw invalid_argument("joint gaussian: n >= 1 required");
  const int total_noise = b.nx + n * (b.nw + b.ny);
  const int rows = n * (b.nx + b.ny);
  Matrix load = Matrix::Zero(rows, total_noise);
  Vector mean = Vector::Zero(rows);

  JointGaussian joint;
  joint.n = n;
  joint.nx = b.nx;
  joint.ny = b.ny;

  Matrix lx = Matrix::Zero(b.nx, total_noise);
  lx.leftCols(b.nx) = b.x1_load;
  Vector mx = b.x1_mean;
  int col = b.nx;
  for (int t = 0; t < n; ++t) {
    load.middleRows(joint.state_offset(t), b.nx) = lx;
    mean.segment(joint.state_offset(t), b.nx) = mx;

    const Matrix z = b.observation(t);
    load.middleRows(joint.obs_offset(t), b.ny) = z * lx;
    load.block(joint.obs_offset(t), col, b.ny, b.ny) += b.obs_noise(t);
    mean.segment(joint.obs_offset(t), b.ny) = z * mx;
    if (offsets) mean.segment(joint.obs_offset(t), b.ny) += offsets->row(t).transpose();
    col += b.ny;

    if (t + 1 < n) {
      const Matrix tt = b.transition(t);
      lx = (tt * lx).eval();
      lx.block(0, col, b.nx, b.nw) += b.state_noise(t);
      mx = tt * mx;
    }
    col += b.nw;
  }

  joint.mean = std::move(mean);
  joint.cov = load * load.transpose();
  symmetrize(joint.cov);
  return joint;
}

OracleMoments condition(const JointGaussian& joint, const Matrix& y, int num_obs) {
  const int ns = joint.n * joint.nx;
  const int no = num_obs * joint.ny;
  if (y.rows() < num_obs || y.cols() != joint.ny) {
    throw invalid_argument("oracle condition: observation shape mismatch");
  }

  Vector yv(no);
  for (int t = 0; t < num_obs; ++t) yv.segment(t * joint.ny, joint.ny) = y.row(t).transpose();

  OracleMoments out;
  out.smoothed_mean.resize(joint.n, joint.nx);
  if (no == 0) {
    for (int t = 0; t < joint.n; ++t) {
      out.smoothed_mean.row(t) = joint.mean.segment(joint.state_offset(t), joint.nx).transpose();
    }
    out.smoothed_cov = joint.cov.topLeftCorner(ns, ns);
    return out;
  }

  const Matrix cyy = joint.cov.block(ns, ns, no, no);
  const Matrix cxy = joint.cov.block(0, ns, ns, no);
  Eigen::LLT<Matrix> llt(cyy);
  if (llt.info() != Eigen::Success) {
    throw numerical_error("oracle condition: observation covariance is singular");
  }
  const Vector resid = yv - joint.mean.segment(ns, no);
  const Vector alpha = llt.solve(resid);
  const double logdet = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  out.loglik = -0.5 * (no * kLogTwoPi + logdet + resid.dot(alpha));

  const Vector mean_x = joint.mean.head(ns) + cxy * alpha;
  for (int t = 0; t < joint.n; ++t) {
    out.smoothed_mean.row(t) = mean_x.segment(joint.state_offset(t), joint.nx).transpose();
  }
  out.smoothed_cov = joint.cov.topLeftCorner(ns, ns) - cxy * llt.solve(cxy.transpose());
  symmetrize(out.smoothed_cov);
  return out;
}

}  // namespace

JointGaussian build_joint_gaussian(const StateSpaceSystem& system, int n, const Matrix* offsets) {
  system.validate();
  const int d = system.d;
  const Matrix eye_d = Matrix::Identity(d, d);
  const Matrix sigma_chol = cholesky(system.Sigma, "oracle Sigma");
  const Matrix c_sqrt = system.c.array().sqrt().matrix().asDiagonal();

  JointBuilder b;
  b.nx = system.m * d;
  b.ny = d;
  b.nw = system.r * d;
  b.x1_mean.resize(b.nx);
  for (int i = 0; i < system.m; ++i) b.x1_mean.segment(i * d, d) = system.a1.row(i).transpose();
  b.x1_load = psd_sqrt(kron(system.P1, system.Sigma));
  b.transition = [&, eye_d](int t) { return kron(system.T_at(t), eye_d); };
  b.state_noise = [&, c_sqrt, sigma_chol](int t) {
    return kron(system.R_at(t) * c_sqrt, sigma_chol);
  };
  b.observation = [&, eye_d](int t) { return kron(Matrix(system.Z_at(t)), eye_d); };
  b.obs_noise = [&, sigma_chol](int t) { return std::sqrt(system.H_at(t)) * sigma_chol; };
  return assemble(b, n, offsets);
}

JointGaussian build_joint_gaussian(const StackedModel& model, int n, const Matrix* offsets) {
  const int d = model.d();
  const Matrix eye_d = Matrix::Identity(d, d);
  const StateSpaceSystem& structure = model.structure();

  JointBuilder b;
  b.nx = model.state_dim();
  b.ny = d;
  b.nw = model.r() * d;
  b.x1_mean = model.x1();
  b.x1_load = psd_sqrt(model.p1());
  b.transition = [&, eye_d](int) { return kron(structure.T, eye_d); };
  b.state_noise = [&, eye_d](int) {
    Matrix q_sqrt = Matrix::Zero(b.nw, b.nw);
    for (int k = 0; k < model.r(); ++k) {
      q_sqrt.block(k * d, k * d, d, d) = psd_sqrt(model.sigma_r()[k]);
    }
    return Matrix(kron(structure.R, eye_d) * q_sqrt);
  };
  b.observation = [&, eye_d](int) { return kron(Matrix(structure.Z), eye_d); };
  b.obs_noise = [&](int) { return cholesky(model.sigma_eps(), "oracle sigma_eps"); };
  return assemble(b, n, offsets);
}

OracleMoments condition_on_observations(const JointGaussian& joint, const Matrix& y) {
  return condition(joint, y, joint.n);
}

OracleMoments condition_on_prefix(const JointGaussian& joint, const Matrix& y, int k) {
  if (k < 0 || k > joint.n) throw invalid_argument("condition_on_prefix: k outside [0, n]");
  return condition(joint, y, k);
}

SmootherOracleResult joint_gaussian_smoother_oracle(const StateSpaceSystem& system, const Matrix& y,
                                                    const Matrix* offsets) {
  const int n = static_cast<int>(y.rows());
  const long cost = static_cast<long>(n) * system.m * system.d;
  if (cost > 512) {
    throw invalid_argument("joint_gaussian_smoother_oracle: n*m*d = " + std::to_string(cost) +
                           " exceeds the size guard of 512");
  }
  const JointGaussian joint = build_joint_gaussian(system, n, offsets);
  const OracleMoments moments = condition_on_observations(joint, y);

  SmootherOracleResult out;
  out.loglik = moments.loglik;
  out.smoothed_cov = moments.smoothed_cov;
  out.smoothed_mean.reserve(n);
  for (int t = 0; t < n; ++t) {
    Matrix state(system.m, system.d);
    for (int i = 0; i < system.m; ++i) {
      state.row(i) = moments.smoothed_mean.row(t).segment(i * system.d, system.d);
    }
    out.smoothed_mean.push_back(std::move(state));
  }
  return out;
}

}  // namespace mbsts
