#include <doctest.h>

#include <cmath>

#include "mbsts/components.hpp"
#include "mbsts/oracle.hpp"
#include "support.hpp"

using namespace mbsts;
using mbsts::testing::random_spd;

TEST_CASE("local level alone assembles to the scalar system") {
  const Matrix sigma = Matrix::Identity(2, 2);
  const StateSpaceSystem sys = assemble_system({LocalLevelTrend{0.5}}, 2, sigma, 1.0);
  CHECK(sys.m == 1);
  CHECK(sys.r == 1);
  CHECK(sys.Z(0) == 1.0);
  CHECK(sys.T(0, 0) == 1.0);
  CHECK(sys.R(0, 0) == 1.0);
  CHECK(sys.c(0) == 0.5);
  CHECK(sys.block_layout.at("trend") == std::pair<int, int>{0, 1});
}

TEST_CASE("trend plus weekly seasonal layout") {
  const Matrix sigma = Matrix::Identity(2, 2);
  const StateSpaceSystem sys =
      assemble_system({LocalLevelTrend{3.0}, Seasonal{7, 2.0}}, 2, sigma, 1.0);
  CHECK(sys.m == 7);
  CHECK(sys.r == 2);
  RowVector expected_z(7);
  expected_z << 1, 1, 0, 0, 0, 0, 0;
  CHECK((sys.Z - expected_z).cwiseAbs().maxCoeff() == 0.0);
  // Seasonal block: first transition row all -1 over its 6 rows, shifted
  // identity below.
  for (int j = 1; j <= 6; ++j) CHECK(sys.T(1, j) == -1.0);
  for (int j = 2; j <= 6; ++j) CHECK(sys.T(j, j - 1) == 1.0);
  CHECK(sys.R(0, 0) == 1.0);
  CHECK(sys.R(1, 1) == 1.0);
  CHECK(sys.block_layout.at("trend") == std::pair<int, int>{0, 1});
  CHECK(sys.block_layout.at("seasonal") == std::pair<int, int>{1, 7});

  // Ranges partition [0, m) without overlap.
  std::vector<bool> covered(sys.m, false);
  for (const auto& [name, range] : sys.block_layout) {
    for (int i = range.first; i < range.second; ++i) {
      CHECK(!covered[i]);
      covered[i] = true;
    }
  }
  for (bool b : covered) CHECK(b);
}

TEST_CASE("regression-only model is rejected") {
  const Matrix sigma = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(assemble_system({Regression{3, SelectionMode::kSpikeSlab}}, 2, sigma, 1.0),
                  invalid_argument);
  CHECK_THROWS_AS(assemble_system({}, 2, sigma, 1.0), invalid_argument);
  CHECK_THROWS_AS(assemble_system({Seasonal{1, 1.0}}, 2, sigma, 1.0), invalid_argument);
  Matrix not_pd = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(assemble_system({LocalLevelTrend{1.0}}, 2, not_pd, 1.0), invalid_argument);
}

TEST_CASE("noiseless seasonal block sums to zero over every period window") {
  Rng rng = make_rng(5);
  const Matrix sigma = random_spd(2, rng);
  StateSpaceSystem sys = assemble_system({LocalLevelTrend{0.0}, Seasonal{7, 0.0}}, 2, sigma, 0.5);
  // Exact (non-diffuse) start from an arbitrary seasonal pattern.
  sys.a1 = rng.normal_matrix(7, 2);
  sys.P1 = Matrix::Zero(7, 7);

  const int n = 40;
  const SimulatedSeries sim = simulate_from_system(sys, Matrix(), Matrix(), n, rng);
  // gamma_t is the first seasonal state row (row 1 here).
  for (int t = 7; t < n; ++t) {
    RowVector window = RowVector::Zero(2);
    for (int s = 0; s < 7; ++s) window += sim.states[t - s].row(1);
    CHECK(window.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("noise-free simulation is the deterministic propagation") {
  const Matrix sigma = Matrix::Identity(2, 2);
  StateSpaceSystem sys = assemble_system({LocalLevelTrend{0.0}, Seasonal{4, 0.0}}, 2, sigma, 0.0);
  Rng rng = make_rng(9);
  sys.a1 = rng.normal_matrix(sys.m, 2);
  sys.P1 = Matrix::Zero(sys.m, sys.m);

  const int n = 12;
  const SimulatedSeries sim = simulate_from_system(sys, Matrix(), Matrix(), n, rng);
  Matrix state = sys.a1;
  for (int t = 0; t < n; ++t) {
    CHECK((sim.y.row(t) - sys.Z * state).cwiseAbs().maxCoeff() < 1e-12);
    state = sys.T * state;
  }
}

TEST_CASE("simulated observation errors reproduce Sigma") {
  Matrix sigma(2, 2);
  sigma << 1.0, -0.3, -0.3, 1.0;
  StateSpaceSystem sys = assemble_system({LocalLevelTrend{0.0}}, 2, sigma, 1.0);
  sys.P1 = Matrix::Zero(1, 1);

  Matrix beta(1, 2);
  beta << 0.7, -0.4;
  Rng rng = make_rng(31);
  const int n = 10000;
  const Matrix covariates = rng.normal_matrix(n, 1);
  const SimulatedSeries sim = simulate_from_system(sys, beta, covariates, n, rng);

  // Residual after removing the (known) state and regression signal.
  Matrix eps(n, 2);
  for (int t = 0; t < n; ++t) {
    eps.row(t) = sim.y.row(t) - sys.Z * sim.states[t] - covariates.row(t) * beta;
  }
  const Matrix centered = eps.rowwise() - eps.colwise().mean();
  const Matrix cov = centered.transpose() * centered / (n - 1);
  CHECK((cov - sigma).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("simulation determinism under fixed seed") {
  Rng a = make_rng(77), b = make_rng(77);
  const Matrix sigma = Matrix::Identity(2, 2);
  const StateSpaceSystem sys = assemble_system({LocalLevelTrend{1.0}, Seasonal{7, 0.5}}, 2, sigma, 1.0);
  const SimulatedSeries s1 = simulate_from_system(sys, Matrix(), Matrix(), 30, a);
  const SimulatedSeries s2 = simulate_from_system(sys, Matrix(), Matrix(), 30, b);
  CHECK((s1.y - s2.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulation dimension mismatches are rejected") {
  const Matrix sigma = Matrix::Identity(2, 2);
  const StateSpaceSystem sys = assemble_system({LocalLevelTrend{1.0}}, 2, sigma, 1.0);
  Rng rng = make_rng(1);
  Matrix beta(3, 2);
  beta.setZero();
  CHECK_THROWS_AS(simulate_from_system(sys, beta, rng.normal_matrix(10, 2), 10, rng),
                  invalid_argument);
  Matrix bad_beta(1, 3);
  bad_beta.setZero();
  CHECK_THROWS_AS(simulate_from_system(sys, bad_beta, rng.normal_matrix(10, 1), 10, rng),
                  invalid_argument);
}

TEST_CASE("simulate -> filter round trip prefers the true noise scales") {
  // Average per-step log likelihood should peak (within MC noise) at the true
  // H and c against coarse alternatives. A sanity property of the
  // generative/filtering pair rather than an estimator claim.
  Matrix sigma(2, 2);
  sigma << 1.0, -0.3, -0.3, 1.0;
  StateSpaceSystem truth = assemble_system({LocalLevelTrend{1.0}}, 2, sigma, 1.0);
  truth.P1 = Matrix::Zero(1, 1);

  Rng rng = make_rng(2024);
  const int n = 4000;
  const SimulatedSeries sim = simulate_from_system(truth, Matrix(), Matrix(), n, rng);

  const double true_ll = kalman_filter(truth, sim.y).loglik;
  for (double h : {0.25, 4.0}) {
    StateSpaceSystem alt = truth;
    alt.H = h;
    CHECK(kalman_filter(alt, sim.y).loglik < true_ll);
  }
  for (double c1 : {0.25, 4.0}) {
    StateSpaceSystem alt = truth;
    alt.c(0) = c1;
    CHECK(kalman_filter(alt, sim.y).loglik < true_ll);
  }
}
