#ifndef MBSTS_EFFECTS_HPP_
#define MBSTS_EFFECTS_HPP_

#include <map>
#include <string>
#include <vector>

#include "mbsts/forecast.hpp"

namespace mbsts {

struct TreatmentAssignment {
  std::vector<int> w;  // binary entries, one per series
  std::string label;   // canonical "(w1,w2,...)"

  static TreatmentAssignment from(std::vector<int> w);
};

std::string assignment_label(const std::vector<int>& w);

// Per-draw causal-effect paths. For every draw,
//   cumulative[j]       = sum_{i <= j} pointwise[i]
//   temporal_average[j] = cumulative[j] / (j + 1)
// with horizon index j counting from the first post-intervention period.
struct EffectDraws {
  int t_star = 0;
  std::string assignment;  // treated path label
  std::string baseline;    // comparison path label
  PathDraws pointwise;
  PathDraws cumulative;
  PathDraws temporal_average;

  int horizon() const { return pointwise.empty() ? 0 : static_cast<int>(pointwise[0].rows()); }
  int num_draws() const { return static_cast<int>(pointwise.size()); }
  int num_series() const { return pointwise.empty() ? 0 : static_cast<int>(pointwise[0].cols()); }
};

// General effect of the observed path against a counterfactual draw set:
// pointwise effect = observed - counterfactual, per draw.
EffectDraws effect_draws(const Matrix& observed_post, const PathDraws& counterfactual, int t_star);

// Same algebra for two sampled paths (both potential outcomes unobserved).
EffectDraws effect_draws_between(const PathDraws& treated, const PathDraws& baseline, int t_star);

struct EffectSummaryRow {
  int horizon = 0;  // periods after the intervention (t' - t*)
  int series = 0;
  double mean = 0, lower = 0, upper = 0;
  bool significant = false;  // credible interval excludes zero
};

struct EffectSummary {
  std::vector<EffectSummaryRow> rows;
};

// Equal-tailed credible intervals of a draw array at the given horizons.
EffectSummary summarize_paths(const PathDraws& paths, const std::vector<int>& horizons,
                              double level = 0.95);

// All potential-outcome paths needed by the marginal/conditional estimands,
// keyed by canonical assignment label.
using AssignmentPathMap = std::map<std::string, PathDraws>;

// Marginal effect on series i: the sum of the i-th component of the general
// effects over every ordered pair in A_i x B_i (treated x untreated sets);
// the mean marginal divides by the number of pairs.
struct MarginalEffects {
  EffectDraws marginal;       // single-column paths (series i)
  EffectDraws mean_marginal;  // marginal / num_pairs
  int num_pairs = 0;
};
MarginalEffects marginal_effects(const AssignmentPathMap& paths, int series_index, int d,
                                 int t_star);

// Conditional effect of treating series i with the remaining assignments
// fixed at `fixed_w` (length d-1, ordered with series i removed).
EffectDraws conditional_effect(const AssignmentPathMap& paths, int series_index,
                               const std::vector<int>& fixed_w, int t_star);

// Summary effect across groups: per-draw average of the per-group effect
// paths, matching draws by index. All groups must share draw count, horizon,
// and width.
EffectDraws meta_analysis_summary(const std::vector<EffectDraws>& per_pair);

}  // namespace mbsts

#endif  // MBSTS_EFFECTS_HPP_
