#ifndef MBSTS_GEWEKE_HPP_
#define MBSTS_GEWEKE_HPP_

#include <vector>

namespace mbsts {

struct GewekeResult {
  double z = 0.0;  // asymptotically standard normal under stationarity
  double p = 1.0;  // two-sided tail probability
};

// Geweke (1992) convergence diagnostic: compares the means of the first
// frac_a and last frac_b portions of a chain, with segment variances
// estimated by the spectral density at frequency zero (Bartlett lag window).
// Throws numerical_error on a constant segment.
GewekeResult geweke_diagnostic(const std::vector<double>& chain, double frac_a = 0.10,
                               double frac_b = 0.50);

}  // namespace mbsts

#endif  // MBSTS_GEWEKE_HPP_
