#include "mbsts/geweke.hpp"

#include <cmath>

#include "mbsts/linalg.hpp"

namespace mbsts {

namespace {

// Spectral density at frequency zero via a Bartlett lag window with
// L ~ n^(1/3) lags.
double spectral_density_zero(const double* x, int n) {
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += x[i];
  mean /= n;
  double gamma0 = 0.0;
  for (int i = 0; i < n; ++i) gamma0 += (x[i] - mean) * (x[i] - mean);
  gamma0 /= n;
  if (gamma0 <= 0.0) {
    throw numerical_error("geweke_diagnostic: constant chain segment (zero variance)");
  }
  const int max_lag = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(n))));
  double s0 = gamma0;
  for (int lag = 1; lag <= max_lag && lag < n; ++lag) {
    double gamma = 0.0;
    for (int i = 0; i + lag < n; ++i) gamma += (x[i] - mean) * (x[i + lag] - mean);
    gamma /= n;
    const double weight = 1.0 - static_cast<double>(lag) / (max_lag + 1);
    s0 += 2.0 * weight * gamma;
  }
  if (s0 <= 0.0) throw numerical_error("geweke_diagnostic: nonpositive spectral density estimate");
  return s0;
}

}  // namespace

GewekeResult geweke_diagnostic(const std::vector<double>& chain, double frac_a, double frac_b) {
  const int n = static_cast<int>(chain.size());
  if (n < 100) throw invalid_argument("geweke_diagnostic: chain length must be >= 100");
  if (!(frac_a > 0.0) || !(frac_b > 0.0) || frac_a + frac_b > 1.0) {
    throw invalid_argument("geweke_diagnostic: fractions must be positive with frac_a + frac_b <= 1");
  }
  const int na = static_cast<int>(std::floor(frac_a * n));
  const int nb = static_cast<int>(std::floor(frac_b * n));
  if (na < 10 || nb < 10) throw invalid_argument("geweke_diagnostic: segments too short");

  const double* a = chain.data();
  const double* b = chain.data() + (n - nb);
  double mean_a = 0.0, mean_b = 0.0;
  for (int i = 0; i < na; ++i) mean_a += a[i];
  for (int i = 0; i < nb; ++i) mean_b += b[i];
  mean_a /= na;
  mean_b /= nb;

  const double var = spectral_density_zero(a, na) / na + spectral_density_zero(b, nb) / nb;
  GewekeResult out;
  out.z = (mean_a - mean_b) / std::sqrt(var);
  out.p = std::erfc(std::abs(out.z) / std::sqrt(2.0));
  return out;
}

}  // namespace mbsts
