#ifndef MBSTS_COMPONENTS_HPP_
#define MBSTS_COMPONENTS_HPP_

#include <variant>
#include <vector>

#include "mbsts/statespace.hpp"

namespace mbsts {

enum class SelectionMode { kSpikeSlab, kFixed };

// Local linear level (random-walk trend), one state row.
struct LocalLevelTrend {
  double c_scale = 1.0;
};

// Seasonal component in companion form: S-1 state rows whose first row sums
// the current cycle to zero up to its disturbance.
struct Seasonal {
  int period = 7;
  double c_scale = 1.0;
};

// Static regression: enters the observation equation as X_t beta, no state
// rows. Coefficients are sampled elsewhere; this spec only carries the
// covariate count and how rows are selected.
struct Regression {
  int num_covariates = 0;
  SelectionMode selection = SelectionMode::kSpikeSlab;
};

using ComponentSpec = std::variant<LocalLevelTrend, Seasonal, Regression>;

struct AssembleOptions {
  // Diffuse initialization a1 = 0, P1 = kappa * I unless overridden.
  double diffuse_kappa = 1e6;
};

// Builds the state-space form of the requested components. At least one of
// trend/seasonal must be present; a regression-only model is rejected.
StateSpaceSystem assemble_system(const std::vector<ComponentSpec>& specs, int d,
                                 const Matrix& sigma, double h,
                                 const AssembleOptions& options = {});

// Number of covariates declared by a Regression component (0 if absent).
int regression_covariates(const std::vector<ComponentSpec>& specs);
SelectionMode regression_selection(const std::vector<ComponentSpec>& specs);

// Name of the component block owning each disturbance column of R.
std::vector<std::string> disturbance_block_names(const StateSpaceSystem& system);

struct SimulatedSeries {
  Matrix y;                    // n x d
  std::vector<Matrix> states;  // n of m x d
};

// Generative pass through the model. `beta` is P x d and `covariates` n x P;
// both may be empty when the model has no regression part.
SimulatedSeries simulate_from_system(const StateSpaceSystem& system, const Matrix& beta,
                                     const Matrix& covariates, int n, Rng& rng);

}  // namespace mbsts

#endif  // MBSTS_COMPONENTS_HPP_
