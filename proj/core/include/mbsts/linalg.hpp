#ifndef MBSTS_LINALG_HPP_
#define MBSTS_LINALG_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mbsts {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Thrown on violated preconditions (bad shapes, invalid configuration).
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an operation fails for numerical reasons (non-PD matrix,
// degenerate variance) rather than a contract violation.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void symmetrize(Matrix& a) { a = ((a + a.transpose()) * 0.5).eval(); }

// Lower Cholesky factor; throws numerical_error if the matrix is not PD.
Matrix cholesky(const Matrix& a, const std::string& what);

// Input-validation flavor: throws invalid_argument instead (for checking
// caller-provided matrices rather than computed ones).
void require_spd(const Matrix& a, const std::string& what);

// log(det(a)) for a symmetric PD matrix, via Cholesky.
double logdet_spd(const Matrix& a, const std::string& what);

// B with B B' = a for a symmetric PSD matrix. Eigenvalues below a relative
// tolerance are clamped to zero, so rank-deficient covariances are accepted.
Matrix psd_sqrt(const Matrix& a);

bool is_symmetric_psd(const Matrix& a, double tol = 1e-8);

// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

// log Gamma_d(x), the multivariate gamma function.
double lgamma_multivariate(int d, double x);

// Empirical quantile with linear interpolation (values are copied and sorted).
double quantile(std::vector<double> values, double prob);

// Standard normal CDF and its inverse (Acklam's rational approximation with
// one Halley refinement; good to ~1e-14).
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace mbsts

#endif  // MBSTS_LINALG_HPP_
