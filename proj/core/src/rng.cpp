#include "mbsts/rng.hpp"

#include <cmath>

namespace mbsts {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t seed) {
  Rng rng(seed);
  rng.seed_ = seed;
  return rng;
}

double Rng::uniform() {
  // 53-bit mantissa, shifted into (0, 1).
  const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return u;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  have_spare_ = true;
  return u * factor;
}

double Rng::gamma(double shape) {
  if (shape <= 0.0) throw invalid_argument("Rng::gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Matrix Rng::normal_matrix(int rows, int cols) {
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = normal();
  }
  return out;
}

Rng Rng::substream(std::uint64_t index) const {
  return make_rng(splitmix64(seed_ ^ splitmix64(index + 0x51ed2701)));
}

Matrix draw_inverse_wishart(double dof, const Matrix& scale, Rng& rng) {
  const int d = static_cast<int>(scale.rows());
  if (dof <= d - 1) throw invalid_argument("draw_inverse_wishart: dof must exceed d - 1");
  const Matrix l = cholesky(scale, "draw_inverse_wishart scale");
  // Bartlett factor of a Wishart(dof, I) draw.
  Matrix a = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(dof - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // If X = L^-T A A' L^-1 ~ Wishart(dof, scale^-1) then X^-1 = B B' with
  // B = L A^-T, and X^-1 ~ IW(dof, scale).
  Matrix b = a.triangularView<Eigen::Lower>().solve(l.transpose()).transpose();
  Matrix out = b * b.transpose();
  symmetrize(out);
  return out;
}

Matrix draw_matrix_normal(const Matrix& mean, const Matrix& row_chol, const Matrix& col_chol, Rng& rng) {
  const Matrix g = rng.normal_matrix(static_cast<int>(mean.rows()), static_cast<int>(mean.cols()));
  return mean + row_chol * g * col_chol.transpose();
}

}  // namespace mbsts
