#include <doctest.h>

#include <cmath>

#include "mbsts/oracle.hpp"
#include "mbsts/statespace.hpp"
#include "support.hpp"

using namespace mbsts;
using mbsts::testing::random_series;
using mbsts::testing::random_spd;
using mbsts::testing::random_system;

namespace {

StateSpaceSystem local_level(int d, const Matrix& sigma, double h, double c1, double p1) {
  StateSpaceSystem sys;
  sys.d = d;
  sys.m = 1;
  sys.r = 1;
  sys.Z = RowVector::Ones(1);
  sys.T = Matrix::Ones(1, 1);
  sys.R = Matrix::Ones(1, 1);
  sys.H = h;
  sys.c = Vector::Constant(1, c1);
  sys.Sigma = sigma;
  sys.a1 = Matrix::Zero(1, d);
  sys.P1 = Matrix::Constant(1, 1, p1);
  sys.block_layout["trend"] = {0, 1};
  return sys;
}

}  // namespace

TEST_CASE("zero-variance local level keeps states at zero and passes data through") {
  Matrix sigma(2, 2);
  sigma << 1.0, 0.4, 0.4, 2.0;
  const StateSpaceSystem sys = local_level(2, sigma, 1.0, 0.0, 0.0);
  Rng rng = make_rng(7);
  Matrix y = rng.normal_matrix(12, 2);

  const FilterResult filt = kalman_filter(sys, y);
  for (const auto& a : filt.state_mean) CHECK(a.cwiseAbs().maxCoeff() == 0.0);
  CHECK((filt.innovations - y).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::isfinite(filt.loglik));
}

TEST_CASE("filter log-likelihood equals dense joint-Gaussian density") {
  Matrix sigma(1, 1);
  sigma << 1.7;
  StateSpaceSystem sys = local_level(1, sigma, 0.8, 0.5, 1.2);
  sys.a1(0, 0) = 0.3;
  Rng rng = make_rng(11);
  const Matrix y = random_series(sys, 5, rng);

  const FilterResult filt = kalman_filter(sys, y);
  const SmootherOracleResult oracle = joint_gaussian_smoother_oracle(sys, y);
  CHECK(filt.loglik == doctest::Approx(oracle.loglik).epsilon(1e-8));
}

TEST_CASE("dimension mismatches are rejected") {
  Matrix sigma = Matrix::Identity(2, 2);
  StateSpaceSystem sys = local_level(2, sigma, 1.0, 0.3, 1.0);
  sys.Z = RowVector::Ones(3);  // wrong width
  Rng rng = make_rng(1);
  const Matrix y = rng.normal_matrix(4, 2);
  CHECK_THROWS_AS(kalman_filter(sys, y), invalid_argument);

  StateSpaceSystem ok = local_level(2, sigma, 1.0, 0.3, 1.0);
  CHECK_THROWS_AS(kalman_filter(ok, rng.normal_matrix(4, 3)), invalid_argument);
}

TEST_CASE("filter covariances stay symmetric PSD over long horizons") {
  Rng rng = make_rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    const StateSpaceSystem sys = random_system(rng);
    const Matrix y = random_series(sys, 60, rng);
    const FilterResult filt = kalman_filter(sys, y);
    for (const auto& p : filt.state_cov) CHECK(is_symmetric_psd(p, 1e-7));
  }
}

TEST_CASE("smoothed moments match the joint-Gaussian oracle") {
  Rng rng = make_rng(33);
  for (int rep = 0; rep < 8; ++rep) {
    const StateSpaceSystem sys = random_system(rng);
    const int n = 3 + static_cast<int>(rng.uniform() * 8);
    if (n * sys.m * sys.d > 512) continue;
    const Matrix y = random_series(sys, n, rng);

    const FilterResult filt = kalman_filter(sys, y);
    const SmoothedMoments sm = smooth_moments(sys, y);
    const SmootherOracleResult oracle = joint_gaussian_smoother_oracle(sys, y);

    CHECK(filt.loglik == doctest::Approx(oracle.loglik).epsilon(1e-8));
    for (int t = 0; t < n; ++t) {
      CHECK((sm.mean[t] - oracle.smoothed_mean[t]).cwiseAbs().maxCoeff() < 1e-8);
      // Cov(vec alpha_t) = V_t (x) Sigma in the oracle's row-major stacking.
      const Matrix expected = kron(sm.row_cov[t], sys.Sigma);
      const int nx = sys.m * sys.d;
      const Matrix got = oracle.smoothed_cov.block(t * nx, t * nx, nx, nx);
      CHECK((expected - got).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, got.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("one-step predictive moments agree with prefix conditioning") {
  Rng rng = make_rng(55);
  const StateSpaceSystem sys = random_system(rng, 2, 3);
  const int n = 6;
  const Matrix y = random_series(sys, n, rng);
  const FilterResult filt = kalman_filter(sys, y);
  const JointGaussian joint = build_joint_gaussian(sys, n);

  for (int t = 1; t < n; ++t) {
    const OracleMoments pred = condition_on_prefix(joint, y, t);
    Matrix state(sys.m, sys.d);
    for (int i = 0; i < sys.m; ++i) state.row(i) = pred.smoothed_mean.row(t).segment(i * sys.d, sys.d);
    CHECK((state - filt.state_mean[t]).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("oracle size guard") {
  Matrix sigma = Matrix::Identity(2, 2);
  StateSpaceSystem sys = local_level(2, sigma, 1.0, 0.3, 1.0);
  Rng rng = make_rng(3);
  const Matrix y = rng.normal_matrix(500, 2);  // n*m*d = 1000
  CHECK_THROWS_AS(joint_gaussian_smoother_oracle(sys, y), invalid_argument);
}

TEST_CASE("single-step oracle equals the conjugate Bayes update") {
  Matrix sigma(1, 1);
  sigma << 2.3;
  StateSpaceSystem sys = local_level(1, sigma, 0.7, 0.4, 1.9);
  sys.a1(0, 0) = 1.5;
  Matrix y(1, 1);
  y << 3.0;
  const SmootherOracleResult oracle = joint_gaussian_smoother_oracle(sys, y);
  const double f = 1.9 + 0.7;
  const double expected = 1.5 + 1.9 / f * (3.0 - 1.5);
  CHECK(oracle.smoothed_mean[0](0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("simulation smoother: zero-variance draw is the deterministic propagation") {
  Matrix sigma = Matrix::Identity(2, 2);
  StateSpaceSystem sys = local_level(2, sigma, 1.0, 0.0, 0.0);
  sys.a1 << 2.0, -1.0;
  Rng rng = make_rng(17);
  const Matrix y = rng.normal_matrix(6, 2);
  Rng draw_rng = make_rng(5);
  const auto draw = simulation_smoother(sys, y, nullptr, draw_rng);
  for (const auto& a : draw) {
    CHECK(a(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("simulation smoother is deterministic under a fixed seed") {
  Rng rng = make_rng(99);
  const StateSpaceSystem sys = random_system(rng, 2, 4);
  const Matrix y = random_series(sys, 15, rng);
  Rng r1 = make_rng(1234), r2 = make_rng(1234);
  const auto d1 = simulation_smoother(sys, y, nullptr, r1);
  const auto d2 = simulation_smoother(sys, y, nullptr, r2);
  for (size_t t = 0; t < d1.size(); ++t) CHECK((d1[t] - d2[t]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulation smoother draws have the oracle's conditional mean") {
  Matrix sigma(1, 1);
  sigma << 1.3;
  StateSpaceSystem sys = local_level(1, sigma, 1.0, 0.6, 2.0);
  sys.a1(0, 0) = 0.5;
  Rng rng = make_rng(42);
  const Matrix y = random_series(sys, 10, rng);
  const SmootherOracleResult oracle = joint_gaussian_smoother_oracle(sys, y);

  const int num_draws = 5000;
  Matrix sum = Matrix::Zero(10, 1), sumsq = Matrix::Zero(10, 1);
  Rng draw_rng = make_rng(7);
  for (int s = 0; s < num_draws; ++s) {
    const auto draw = simulation_smoother(sys, y, nullptr, draw_rng);
    for (int t = 0; t < 10; ++t) {
      sum(t, 0) += draw[t](0, 0);
      sumsq(t, 0) += draw[t](0, 0) * draw[t](0, 0);
    }
  }
  for (int t = 0; t < 10; ++t) {
    const double mean = sum(t, 0) / num_draws;
    const double var = sumsq(t, 0) / num_draws - mean * mean;
    const double mc_se = std::sqrt(var / num_draws);
    CHECK(std::abs(mean - oracle.smoothed_mean[t](0, 0)) < 3.0 * mc_se);
    // Draw variance should match the oracle's smoothed variance as well.
    const double oracle_var = oracle.smoothed_cov(t, t);
    CHECK(var == doctest::Approx(oracle_var).epsilon(0.15));
  }
}

TEST_CASE("smoother draws satisfy the state equation on deterministic rows") {
  Rng rng = make_rng(1001);
  // Two-row system where only row 0 is stochastic.
  StateSpaceSystem sys;
  sys.d = 2;
  sys.m = 2;
  sys.r = 1;
  sys.Z = RowVector::Ones(2);
  sys.T = Matrix(2, 2);
  sys.T << 1.0, 0.3, 0.0, 0.9;
  sys.R = Matrix::Zero(2, 1);
  sys.R(0, 0) = 1.0;
  sys.H = 0.5;
  sys.c = Vector::Constant(1, 0.8);
  sys.Sigma = random_spd(2, rng);
  sys.a1 = rng.normal_matrix(2, 2);
  sys.P1 = random_spd(2, rng);
  const Matrix y = random_series(sys, 12, rng);

  Rng draw_rng = make_rng(8);
  const auto draw = simulation_smoother(sys, y, nullptr, draw_rng);
  for (int t = 0; t + 1 < 12; ++t) {
    const Matrix resid = draw[t + 1] - sys.T * draw[t];
    CHECK(resid.row(1).cwiseAbs().maxCoeff() < 1e-9);  // deterministic row
  }
}

TEST_CASE("stacked filter matches the separable filter on shared-Sigma systems") {
  Rng rng = make_rng(202);
  for (int rep = 0; rep < 6; ++rep) {
    StateSpaceSystem sys = random_system(rng, 3, 4);
    // The stacked path needs selection R columns; random_system provides them.
    const int n = 8;
    const Matrix y = random_series(sys, n, rng);

    std::vector<Matrix> sigma_r;
    for (int k = 0; k < sys.r; ++k) sigma_r.push_back(sys.c(k) * sys.Sigma);
    const Matrix sigma_eps = sys.H * sys.Sigma;
    const StackedModel model(sys, sigma_eps, sigma_r, &sys.Sigma);

    const FilterResult filt = kalman_filter(sys, y);
    const StackedFilterResult stacked = stacked_filter(model, y);
    CHECK(filt.loglik == doctest::Approx(stacked.loglik).epsilon(1e-8));
  }
}

TEST_CASE("stacked smoothed moments match the dense oracle with free covariances") {
  Rng rng = make_rng(303);
  StateSpaceSystem sys = random_system(rng, 2, 3);
  const int n = 7;
  const Matrix y = random_series(sys, n, rng);

  // Free observation / per-block disturbance covariances (no shared Sigma).
  std::vector<Matrix> sigma_r;
  for (int k = 0; k < sys.r; ++k) sigma_r.push_back(random_spd(sys.d, rng));
  const Matrix sigma_eps = random_spd(sys.d, rng);
  const StackedModel model(sys, sigma_eps, sigma_r);

  Matrix means;
  std::vector<Matrix> covs;
  stacked_smoothed_moments(model, y, nullptr, &means, &covs);

  const JointGaussian joint = build_joint_gaussian(model, n);
  const OracleMoments oracle = condition_on_observations(joint, y);
  const StackedFilterResult filt = stacked_filter(model, y);

  CHECK(filt.loglik == doctest::Approx(oracle.loglik).epsilon(1e-8));
  CHECK((means - oracle.smoothed_mean).cwiseAbs().maxCoeff() < 1e-8);
  const int nx = model.state_dim();
  for (int t = 0; t < n; ++t) {
    const Matrix got = oracle.smoothed_cov.block(t * nx, t * nx, nx, nx);
    CHECK((covs[t] - got).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, got.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("stacked simulation smoother has the smoothed mean and covariance") {
  Rng rng = make_rng(404);
  StateSpaceSystem sys = random_system(rng, 2, 3);
  const int n = 6;
  const Matrix y = random_series(sys, n, rng);
  std::vector<Matrix> sigma_r;
  for (int k = 0; k < sys.r; ++k) sigma_r.push_back(random_spd(sys.d, rng));
  const StackedModel model(sys, random_spd(sys.d, rng), sigma_r);

  Matrix means;
  std::vector<Matrix> covs;
  stacked_smoothed_moments(model, y, nullptr, &means, &covs);

  const int nx = model.state_dim();
  const int num_draws = 4000;
  Matrix sum = Matrix::Zero(n, nx), sumsq = Matrix::Zero(n, nx);
  Rng draw_rng = make_rng(11);
  for (int s = 0; s < num_draws; ++s) {
    const Matrix draw = stacked_simulation_smoother(model, y, nullptr, draw_rng);
    sum += draw;
    sumsq += draw.cwiseProduct(draw);
  }
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < nx; ++i) {
      const double mean = sum(t, i) / num_draws;
      const double var = sumsq(t, i) / num_draws - mean * mean;
      const double mc_se = std::sqrt(std::max(var, 1e-12) / num_draws);
      CHECK(std::abs(mean - means(t, i)) < 4.0 * mc_se + 1e-9);
      CHECK(var == doctest::Approx(covs[t](i, i)).epsilon(0.2).scale(0.05));
    }
  }
}

TEST_CASE("time-varying matrices reduce to the constant path when equal") {
  Rng rng = make_rng(505);
  StateSpaceSystem sys = random_system(rng, 2, 3);
  const int n = 9;
  const Matrix y = random_series(sys, n, rng);
  StateSpaceSystem tv = sys;
  tv.Z_path.assign(n, sys.Z);
  tv.T_path.assign(n, sys.T);
  tv.R_path.assign(n, sys.R);
  tv.H_path.assign(n, sys.H);
  const FilterResult a = kalman_filter(sys, y);
  const FilterResult b = kalman_filter(tv, y);
  CHECK(a.loglik == doctest::Approx(b.loglik).epsilon(1e-14));
}

TEST_CASE("genuinely time-varying system agrees with its dense joint Gaussian") {
  Rng rng = make_rng(606);
  StateSpaceSystem sys = random_system(rng, 2, 3);
  const int n = 6;
  sys.Z_path.clear();
  sys.T_path.clear();
  for (int t = 0; t < n; ++t) {
    RowVector z = sys.Z;
    z *= (1.0 + 0.1 * t);
    sys.Z_path.push_back(z);
    Matrix tt = sys.T;
    tt *= (1.0 - 0.05 * t);
    sys.T_path.push_back(tt);
  }
  const Matrix y = random_series(sys, n, rng);
  const FilterResult filt = kalman_filter(sys, y);
  const JointGaussian joint = build_joint_gaussian(sys, n);
  const OracleMoments oracle = condition_on_observations(joint, y);
  CHECK(filt.loglik == doctest::Approx(oracle.loglik).epsilon(1e-8));
}
