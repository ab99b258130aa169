#ifndef MBSTS_TESTS_SUPPORT_HPP_
#define MBSTS_TESTS_SUPPORT_HPP_

#include <string>

#include "mbsts/components.hpp"
#include "mbsts/rng.hpp"
#include "mbsts/statespace.hpp"

namespace mbsts::testing {

// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
Matrix random_spd(int d, Rng& rng, double lo = 0.3, double hi = 2.0);

// Random well-posed system: d <= max_d, m <= max_m, selection R, mildly
// contractive T. Exercises generic (non-component) shapes.
StateSpaceSystem random_system(Rng& rng, int max_d = 3, int max_m = 6);

// Random observations of the requested length for a system (generative).
Matrix random_series(const StateSpaceSystem& system, int n, Rng& rng);

// Unique scratch directory under the build tree; created on call.
std::string scratch_dir(const std::string& tag);

}  // namespace mbsts::testing

#endif  // MBSTS_TESTS_SUPPORT_HPP_
