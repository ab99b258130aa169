#include "support.hpp"

#include <filesystem>

namespace mbsts::testing {

Matrix random_spd(int d, Rng& rng, double lo, double hi) {
  const Matrix g = rng.normal_matrix(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Vector eig(d);
  for (int i = 0; i < d; ++i) eig[i] = lo + (hi - lo) * rng.uniform();
  Matrix out = q * eig.asDiagonal() * q.transpose();
  symmetrize(out);
  return out;
}

StateSpaceSystem random_system(Rng& rng, int max_d, int max_m) {
  StateSpaceSystem sys;
  sys.d = 1 + static_cast<int>(rng.uniform() * max_d) % max_d;
  sys.m = 1 + static_cast<int>(rng.uniform() * max_m) % max_m;
  sys.r = 1 + static_cast<int>(rng.uniform() * sys.m) % sys.m;

  sys.Z = RowVector::Zero(sys.m);
  for (int i = 0; i < sys.m; ++i) sys.Z(i) = rng.normal();
  if (sys.Z.cwiseAbs().maxCoeff() < 0.2) sys.Z(0) = 1.0;

  // Mildly contractive transition so simulated paths stay bounded.
  sys.T = 0.9 / std::sqrt(static_cast<double>(sys.m)) * rng.normal_matrix(sys.m, sys.m);

  sys.R = Matrix::Zero(sys.m, sys.r);
  for (int k = 0; k < sys.r; ++k) sys.R(k, k) = 1.0;

  sys.H = 0.1 + rng.uniform();
  sys.c = Vector::Zero(sys.r);
  for (int k = 0; k < sys.r; ++k) sys.c(k) = rng.uniform() < 0.2 ? 0.0 : 0.1 + rng.uniform();
  sys.Sigma = random_spd(sys.d, rng);
  sys.a1 = rng.normal_matrix(sys.m, sys.d);
  sys.P1 = random_spd(sys.m, rng, 0.1, 1.5);
  return sys;
}

Matrix random_series(const StateSpaceSystem& system, int n, Rng& rng) {
  return simulate_from_system(system, Matrix(), Matrix(), n, rng).y;
}

std::string scratch_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "mbsts_tests";
  fs::path dir = base / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace mbsts::testing
