#include "mbsts/panel.hpp"

#include <algorithm>
#include <set>

namespace mbsts {

void TimeSeriesPanel::validate() const {
  const int len = n();
  if (len < 2) throw invalid_argument("panel: needs at least two rows");
  if (d() < 1) throw invalid_argument("panel: needs at least one outcome");
  if (static_cast<int>(dates.size()) != len) throw invalid_argument("panel: dates/outcome length mismatch");
  if (X.rows() != 0 && X.rows() != len) throw invalid_argument("panel: covariate length mismatch");
  const long spacing =
      spacing_days > 0 ? spacing_days : dates[1].to_days() - dates[0].to_days();
  for (size_t i = 1; i < dates.size(); ++i) {
    const long diff = dates[i].to_days() - dates[i - 1].to_days();
    if (diff == 0) throw invalid_argument("panel: duplicate date " + dates[i].to_string());
    if (diff < 0) throw invalid_argument("panel: dates not strictly increasing at " + dates[i].to_string());
    if (diff != spacing) {
      throw invalid_argument("panel: dates not equally spaced at " + dates[i].to_string());
    }
  }
  if (t_star < 1 || t_star > len - 1) {
    throw invalid_argument("panel: intervention index " + std::to_string(t_star) +
                           " outside [1, n-1] = [1, " + std::to_string(len - 1) + "]");
  }
  if (!Y.allFinite() || (X.size() > 0 && !X.allFinite())) {
    throw invalid_argument("panel: non-finite values present");
  }
  if (static_cast<int>(frozen.size()) != num_covariates()) {
    throw invalid_argument("panel: frozen flags must match covariate count");
  }
}

TimeSeriesPanel panel_from_table(const CsvTable& table, const PanelSchema& schema,
                                 const std::string& group_id) {
  if (schema.outcome_columns.empty()) throw invalid_argument("panel schema: no outcome columns");
  // Every file column must be mapped to a role.
  std::set<std::string> mapped(schema.outcome_columns.begin(), schema.outcome_columns.end());
  mapped.insert(schema.covariate_columns.begin(), schema.covariate_columns.end());
  mapped.insert(schema.date_column);
  for (const auto& col : table.header) {
    if (!mapped.count(col)) {
      throw invalid_argument("panel: column '" + col + "' in file is not mapped to any role");
    }
  }
  for (const auto& col : schema.frozen_columns) {
    if (std::find(schema.covariate_columns.begin(), schema.covariate_columns.end(), col) ==
        schema.covariate_columns.end()) {
      throw invalid_argument("panel: frozen column '" + col + "' is not a covariate");
    }
  }

  const int n = static_cast<int>(table.rows.size());
  if (n < 2) throw invalid_argument("panel: needs at least two data rows");
  const int d = static_cast<int>(schema.outcome_columns.size());
  const int p = static_cast<int>(schema.covariate_columns.size());

  TimeSeriesPanel panel;
  panel.group_id = group_id;
  panel.outcome_names = schema.outcome_columns;
  panel.covariate_names = schema.covariate_columns;
  panel.Y.resize(n, d);
  panel.X.resize(n, p);
  panel.dates.reserve(n);

  const int date_idx = table.require_col(schema.date_column);
  std::vector<int> y_idx(d), x_idx(p);
  for (int j = 0; j < d; ++j) y_idx[j] = table.require_col(schema.outcome_columns[j]);
  for (int j = 0; j < p; ++j) x_idx[j] = table.require_col(schema.covariate_columns[j]);

  for (int i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const std::string where = "panel row " + std::to_string(i + 2);
    panel.dates.push_back(Date::parse(row[date_idx]));
    for (int j = 0; j < d; ++j) {
      panel.Y(i, j) = parse_double(row[y_idx[j]], where + " column " + schema.outcome_columns[j]);
    }
    for (int j = 0; j < p; ++j) {
      panel.X(i, j) = parse_double(row[x_idx[j]], where + " column " + schema.covariate_columns[j]);
    }
  }

  // Intervention index: number of dates strictly before the first treated day.
  int t_star = 0;
  while (t_star < n && panel.dates[t_star] < schema.intervention_date) ++t_star;
  panel.t_star = t_star;

  panel.spacing_days = schema.spacing_days;
  panel.frozen.assign(p, false);
  for (const auto& col : schema.frozen_columns) {
    const auto it = std::find(schema.covariate_columns.begin(), schema.covariate_columns.end(), col);
    panel.frozen[it - schema.covariate_columns.begin()] = true;
  }
  panel.validate();

  // Structural enforcement of covariate invariance to treatment: frozen
  // columns keep their last pre-intervention value afterwards, regardless of
  // what the file says.
  for (int j = 0; j < p; ++j) {
    if (!panel.frozen[j]) continue;
    const double held = panel.X(panel.t_star - 1, j);
    for (int i = panel.t_star; i < n; ++i) panel.X(i, j) = held;
  }
  return panel;
}

TimeSeriesPanel load_panel_csv(const std::string& path, const PanelSchema& schema,
                               const std::string& group_id) {
  return panel_from_table(read_csv(path), schema, group_id);
}

void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel) {
  CsvTable table;
  table.header.push_back("date");
  for (const auto& name : panel.outcome_names) table.header.push_back(name);
  for (const auto& name : panel.covariate_names) table.header.push_back(name);
  for (int i = 0; i < panel.n(); ++i) {
    std::vector<std::string> row;
    row.push_back(panel.dates[i].to_string());
    for (int j = 0; j < panel.d(); ++j) row.push_back(format_double(panel.Y(i, j)));
    for (int j = 0; j < panel.num_covariates(); ++j) row.push_back(format_double(panel.X(i, j)));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

}  // namespace mbsts
