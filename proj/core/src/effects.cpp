#include "mbsts/effects.hpp"

#include <algorithm>
#include <cmath>

namespace mbsts {

std::string assignment_label(const std::vector<int>& w) {
  std::string out = "(";
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(w[i]);
  }
  out.push_back(')');
  return out;
}

TreatmentAssignment TreatmentAssignment::from(std::vector<int> w) {
  for (int v : w) {
    if (v != 0 && v != 1) throw invalid_argument("TreatmentAssignment: entries must be binary");
  }
  TreatmentAssignment out;
  out.label = assignment_label(w);
  out.w = std::move(w);
  return out;
}

namespace {

EffectDraws build_effect_draws(PathDraws pointwise, int t_star) {
  EffectDraws out;
  out.t_star = t_star;
  const int k = static_cast<int>(pointwise[0].rows());
  const int d = static_cast<int>(pointwise[0].cols());
  out.cumulative.reserve(pointwise.size());
  out.temporal_average.reserve(pointwise.size());
  for (const auto& pw : pointwise) {
    Matrix cum(k, d), avg(k, d);
    RowVector running = RowVector::Zero(d);
    for (int j = 0; j < k; ++j) {
      running += pw.row(j);
      cum.row(j) = running;
      avg.row(j) = running / static_cast<double>(j + 1);
    }
    out.cumulative.push_back(std::move(cum));
    out.temporal_average.push_back(std::move(avg));
  }
  out.pointwise = std::move(pointwise);
  return out;
}

void check_path_shapes(const PathDraws& paths, const char* what) {
  if (paths.empty()) throw invalid_argument(std::string(what) + ": empty draw set");
  for (const auto& p : paths) {
    if (p.rows() != paths[0].rows() || p.cols() != paths[0].cols()) {
      throw invalid_argument(std::string(what) + ": ragged draw shapes");
    }
  }
}

}  // namespace

EffectDraws effect_draws(const Matrix& observed_post, const PathDraws& counterfactual, int t_star) {
  check_path_shapes(counterfactual, "effect_draws");
  if (observed_post.rows() != counterfactual[0].rows() ||
      observed_post.cols() != counterfactual[0].cols()) {
    throw invalid_argument("effect_draws: observed and counterfactual shapes disagree");
  }
  PathDraws pointwise;
  pointwise.reserve(counterfactual.size());
  for (const auto& cf : counterfactual) pointwise.push_back(observed_post - cf);
  return build_effect_draws(std::move(pointwise), t_star);
}

EffectDraws effect_draws_between(const PathDraws& treated, const PathDraws& baseline, int t_star) {
  check_path_shapes(treated, "effect_draws_between");
  check_path_shapes(baseline, "effect_draws_between");
  if (treated.size() != baseline.size() || treated[0].rows() != baseline[0].rows() ||
      treated[0].cols() != baseline[0].cols()) {
    throw invalid_argument("effect_draws_between: treated and baseline shapes disagree");
  }
  PathDraws pointwise;
  pointwise.reserve(treated.size());
  for (size_t s = 0; s < treated.size(); ++s) pointwise.push_back(treated[s] - baseline[s]);
  return build_effect_draws(std::move(pointwise), t_star);
}

EffectSummary summarize_paths(const PathDraws& paths, const std::vector<int>& horizons,
                              double level) {
  check_path_shapes(paths, "summarize_paths");
  if (!(level > 0.0 && level < 1.0)) throw invalid_argument("summarize_paths: level in (0,1)");
  const int k = static_cast<int>(paths[0].rows());
  const int d = static_cast<int>(paths[0].cols());
  const double tail = 0.5 * (1.0 - level);

  EffectSummary out;
  std::vector<double> values(paths.size());
  for (int h : horizons) {
    if (h < 1 || h > k) {
      throw invalid_argument("summarize_paths: horizon " + std::to_string(h) + " outside [1, " +
                             std::to_string(k) + "]");
    }
    for (int j = 0; j < d; ++j) {
      double sum = 0.0;
      for (size_t s = 0; s < paths.size(); ++s) {
        values[s] = paths[s](h - 1, j);
        sum += values[s];
      }
      EffectSummaryRow row;
      row.horizon = h;
      row.series = j;
      row.mean = sum / static_cast<double>(paths.size());
      row.lower = quantile(values, tail);
      row.upper = quantile(values, 1.0 - tail);
      row.significant = row.lower > 0.0 || row.upper < 0.0;
      out.rows.push_back(row);
    }
  }
  return out;
}

namespace {

const PathDraws& paths_for(const AssignmentPathMap& paths, const std::vector<int>& w) {
  const auto it = paths.find(assignment_label(w));
  if (it == paths.end()) {
    throw invalid_argument("effects: assignment " + assignment_label(w) + " missing from path map");
  }
  return it->second;
}

// All binary vectors of length d with position `index` fixed to `value`.
std::vector<std::vector<int>> assignments_with(int d, int index, int value) {
  std::vector<std::vector<int>> out;
  const int count = 1 << (d - 1);
  for (int mask = 0; mask < count; ++mask) {
    std::vector<int> w(d, 0);
    int bit = 0;
    for (int i = 0; i < d; ++i) {
      if (i == index) {
        w[i] = value;
      } else {
        w[i] = (mask >> bit) & 1;
        ++bit;
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

MarginalEffects marginal_effects(const AssignmentPathMap& paths, int series_index, int d,
                                 int t_star) {
  if (series_index < 0 || series_index >= d) {
    throw invalid_argument("marginal_effects: series index outside [0, d)");
  }
  const auto treated = assignments_with(d, series_index, 1);
  const auto untreated = assignments_with(d, series_index, 0);

  PathDraws sum;
  for (const auto& w : treated) {
    const PathDraws& pw = paths_for(paths, w);
    check_path_shapes(pw, "marginal_effects");
    for (const auto& wt : untreated) {
      const PathDraws& pb = paths_for(paths, wt);
      if (pb.size() != pw.size() || pb[0].rows() != pw[0].rows()) {
        throw invalid_argument("marginal_effects: inconsistent draw shapes across assignments");
      }
      if (sum.empty()) {
        sum.assign(pw.size(), Matrix::Zero(pw[0].rows(), 1));
      }
      for (size_t s = 0; s < pw.size(); ++s) {
        sum[s].col(0) += pw[s].col(series_index) - pb[s].col(series_index);
      }
    }
  }

  MarginalEffects out;
  out.num_pairs = static_cast<int>(treated.size() * untreated.size());
  PathDraws mean = sum;
  for (auto& m : mean) m /= static_cast<double>(out.num_pairs);
  out.marginal = build_effect_draws(std::move(sum), t_star);
  out.mean_marginal = build_effect_draws(std::move(mean), t_star);
  const std::string label = "series " + std::to_string(series_index + 1);
  out.marginal.assignment = out.mean_marginal.assignment = label + " treated";
  out.marginal.baseline = out.mean_marginal.baseline = label + " untreated";
  return out;
}

EffectDraws conditional_effect(const AssignmentPathMap& paths, int series_index,
                               const std::vector<int>& fixed_w, int t_star) {
  const int d = static_cast<int>(fixed_w.size()) + 1;
  if (series_index < 0 || series_index >= d) {
    throw invalid_argument("conditional_effect: series index outside [0, d)");
  }
  auto insert_at = [&](int value) {
    std::vector<int> w;
    w.reserve(d);
    for (int i = 0, j = 0; i < d; ++i) {
      w.push_back(i == series_index ? value : fixed_w[j++]);
    }
    return w;
  };
  const std::vector<int> w_on = insert_at(1);
  const std::vector<int> w_off = insert_at(0);
  EffectDraws out = effect_draws_between(paths_for(paths, w_on), paths_for(paths, w_off), t_star);
  out.assignment = assignment_label(w_on);
  out.baseline = assignment_label(w_off);
  return out;
}

EffectDraws meta_analysis_summary(const std::vector<EffectDraws>& per_pair) {
  if (per_pair.empty()) throw invalid_argument("meta_analysis_summary: no groups");
  const int draws = per_pair[0].num_draws();
  const int k = per_pair[0].horizon();
  const int d = per_pair[0].num_series();
  for (const auto& e : per_pair) {
    if (e.num_draws() != draws || e.horizon() != k || e.num_series() != d) {
      throw invalid_argument("meta_analysis_summary: groups disagree in draws or horizons");
    }
  }
  EffectDraws out;
  out.t_star = per_pair[0].t_star;
  out.assignment = per_pair[0].assignment;
  out.baseline = per_pair[0].baseline;
  auto pool = [&](auto member) {
    PathDraws pooled(draws, Matrix::Zero(k, d));
    for (const auto& e : per_pair) {
      const PathDraws& src = e.*member;
      for (int s = 0; s < draws; ++s) pooled[s] += src[s];
    }
    for (auto& m : pooled) m /= static_cast<double>(per_pair.size());
    return pooled;
  };
  out.pointwise = pool(&EffectDraws::pointwise);
  out.cumulative = pool(&EffectDraws::cumulative);
  out.temporal_average = pool(&EffectDraws::temporal_average);
  return out;
}

}  // namespace mbsts
