#include "mbsts/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mbsts {

Matrix cholesky(const Matrix& a, const std::string& what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw numerical_error(what + ": matrix is not positive definite");
  }
  return llt.matrixL();
}

void require_spd(const Matrix& a, const std::string& what) {
  if (a.rows() != a.cols()) throw invalid_argument(what + ": matrix is not square");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw invalid_argument(what + ": matrix is not positive definite");
  }
}

double logdet_spd(const Matrix& a, const std::string& what) {
  Matrix l = cholesky(a, what);
  return 2.0 * l.diagonal().array().log().sum();
}

Matrix psd_sqrt(const Matrix& a) {
  if (a.rows() != a.cols()) throw invalid_argument("psd_sqrt: matrix not square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw numerical_error("psd_sqrt: eigensolver failed");
  const double tol = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Vector d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) {
    if (d[i] < -100.0 * tol) throw numerical_error("psd_sqrt: matrix has a negative eigenvalue");
    d[i] = d[i] > tol ? std::sqrt(d[i]) : 0.0;
  }
  return es.eigenvectors() * d.asDiagonal();
}

bool is_symmetric_psd(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() >= -tol * scale;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double lgamma_multivariate(int d, double x) {
  double out = 0.25 * d * (d - 1) * std::log(M_PI);
  for (int j = 1; j <= d; ++j) out += std::lgamma(x + 0.5 * (1 - j));
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) throw invalid_argument("normal_quantile: p must be in (0, 1)");
  // Acklam's approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                              3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
  }
  // One Halley step against the exact CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw invalid_argument("quantile: empty sample");
  if (prob < 0.0 || prob > 1.0) throw invalid_argument("quantile: prob outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace mbsts
