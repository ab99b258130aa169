#ifndef MBSTS_PANEL_HPP_
#define MBSTS_PANEL_HPP_

#include <string>
#include <vector>

#include "mbsts/csv.hpp"
#include "mbsts/dates.hpp"
#include "mbsts/linalg.hpp"

namespace mbsts {

// One group (store-competitor pair): a d-variate outcome panel with
// covariates and a single persistent intervention after t_star rows.
struct TimeSeriesPanel {
  std::string group_id;
  std::vector<Date> dates;  // strictly increasing, equally spaced
  Matrix Y;                 // n x d outcomes
  Matrix X;                 // n x P covariates
  int t_star = 0;           // pre-intervention rows: Y.topRows(t_star)
  std::vector<std::string> outcome_names;
  std::vector<std::string> covariate_names;
  std::vector<bool> frozen;   // per covariate: held at its last pre value
  int spacing_days = 0;       // 0: accept whatever the first interval implies

  int n() const { return static_cast<int>(Y.rows()); }
  int d() const { return static_cast<int>(Y.cols()); }
  int num_covariates() const { return static_cast<int>(X.cols()); }
  int post_length() const { return n() - t_star; }

  Matrix pre_outcomes() const { return Y.topRows(t_star); }
  Matrix post_outcomes() const { return Y.bottomRows(post_length()); }
  Matrix pre_covariates() const { return X.topRows(t_star); }
  Matrix post_covariates() const { return X.bottomRows(post_length()); }

  void validate() const;
};

// Column roles for CSV ingestion. Frozen columns must be covariates; their
// post-intervention values are rewritten to the last pre-intervention value.
struct PanelSchema {
  std::string date_column = "date";
  std::vector<std::string> outcome_columns;
  std::vector<std::string> covariate_columns;
  std::vector<std::string> frozen_columns;
  Date intervention_date;  // first treated day
  int spacing_days = 1;    // expected gap between rows; 0 infers from the data
};

TimeSeriesPanel panel_from_table(const CsvTable& table, const PanelSchema& schema,
                                 const std::string& group_id = "");
TimeSeriesPanel load_panel_csv(const std::string& path, const PanelSchema& schema,
                               const std::string& group_id = "");
void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel);

}  // namespace mbsts

#endif  // MBSTS_PANEL_HPP_
