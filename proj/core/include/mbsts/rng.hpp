#ifndef MBSTS_RNG_HPP_
#define MBSTS_RNG_HPP_

#include <cstdint>
#include <random>

#include "mbsts/linalg.hpp"

namespace mbsts {

// Deterministic random stream. All variate transformations are implemented
// here rather than via <random> distributions, whose output is
// implementation-defined; identical seeds therefore give identical draws on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1); never returns 0 or 1 exactly.
  double uniform();

  // Standard normal via the polar (Marsaglia) method.
  double normal();

  // Gamma(shape, 1) via Marsaglia & Tsang (2000), with the usual boost for
  // shape < 1.
  double gamma(double shape);

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  // Matrix with independent standard normal entries.
  Matrix normal_matrix(int rows, int cols);

  // Derives an independent child stream; stable in (seed, index).
  Rng substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;

  friend Rng make_rng(std::uint64_t);
};

Rng make_rng(std::uint64_t seed);

// SplitMix64 hash step; used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Draw from the inverse-Wishart IW(dof, scale) via the Bartlett
// decomposition. Requires dof > d - 1 and scale PD.
Matrix draw_inverse_wishart(double dof, const Matrix& scale, Rng& rng);

// Draw from the matrix-normal MN(mean, row_chol * row_chol', col_chol * col_chol').
Matrix draw_matrix_normal(const Matrix& mean, const Matrix& row_chol, const Matrix& col_chol, Rng& rng);

}  // namespace mbsts

#endif  // MBSTS_RNG_HPP_
