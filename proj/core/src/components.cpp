#include "mbsts/components.hpp"

#include <cmath>

namespace mbsts {

StateSpaceSystem assemble_system(const std::vector<ComponentSpec>& specs, int d,
                                 const Matrix& sigma, double h, const AssembleOptions& options) {
  if (specs.empty()) throw invalid_argument("assemble_system: empty component list");
  if (d < 1) throw invalid_argument("assemble_system: d >= 1 required");
  if (sigma.rows() != d || sigma.cols() != d) throw invalid_argument("assemble_system: Sigma must be d x d");
  require_spd(sigma, "assemble_system Sigma");
  if (h < 0) throw invalid_argument("assemble_system: H must be nonnegative");

  int m = 0;
  int num_stochastic = 0;
  bool have_dynamic = false;
  bool have_trend = false, have_seasonal = false, have_regression = false;
  for (const auto& spec : specs) {
    if (std::holds_alternative<LocalLevelTrend>(spec)) {
      if (have_trend) throw invalid_argument("assemble_system: duplicate trend component");
      have_trend = true;
      have_dynamic = true;
      m += 1;
      ++num_stochastic;
      if (std::get<LocalLevelTrend>(spec).c_scale < 0) {
        throw invalid_argument("assemble_system: trend scale must be nonnegative");
      }
    } else if (std::holds_alternative<Seasonal>(spec)) {
      if (have_seasonal) throw invalid_argument("assemble_system: duplicate seasonal component");
      have_seasonal = true;
      have_dynamic = true;
      const auto& s = std::get<Seasonal>(spec);
      if (s.period < 2) throw invalid_argument("assemble_system: seasonal period must be >= 2");
      if (s.c_scale < 0) throw invalid_argument("assemble_system: seasonal scale must be nonnegative");
      m += s.period - 1;
      ++num_stochastic;
    } else {
      if (have_regression) throw invalid_argument("assemble_system: duplicate regression component");
      have_regression = true;
      const auto& reg = std::get<Regression>(spec);
      if (reg.num_covariates < 0) throw invalid_argument("assemble_system: covariate count must be >= 0");
    }
  }
  if (!have_dynamic) {
    throw invalid_argument("assemble_system: at least one of trend/seasonal is required "
                           "(regression alone is not a state-space model)");
  }

  StateSpaceSystem sys;
  sys.d = d;
  sys.m = m;
  sys.r = num_stochastic;
  sys.Z = RowVector::Zero(m);
  sys.T = Matrix::Zero(m, m);
  sys.R = Matrix::Zero(m, num_stochastic);
  sys.c = Vector::Zero(num_stochastic);
  sys.H = h;
  sys.Sigma = sigma;
  sys.a1 = Matrix::Zero(m, d);
  sys.P1 = options.diffuse_kappa * Matrix::Identity(m, m);

  int row = 0, block = 0;
  for (const auto& spec : specs) {
    if (std::holds_alternative<LocalLevelTrend>(spec)) {
      sys.block_layout["trend"] = {row, row + 1};
      sys.Z(row) = 1.0;
      sys.T(row, row) = 1.0;
      sys.R(row, block) = 1.0;
      sys.c(block) = std::get<LocalLevelTrend>(spec).c_scale;
      row += 1;
      ++block;
    } else if (std::holds_alternative<Seasonal>(spec)) {
      const auto& s = std::get<Seasonal>(spec);
      const int rows = s.period - 1;
      sys.block_layout["seasonal"] = {row, row + rows};
      sys.Z(row) = 1.0;
      // gamma_{t+1} = -(gamma_t + ... + gamma_{t-S+2}) + eta; the remaining
      // rows shift the lagged values down.
      for (int j = 0; j < rows; ++j) sys.T(row, row + j) = -1.0;
      for (int j = 1; j < rows; ++j) sys.T(row + j, row + j - 1) = 1.0;
      sys.R(row, block) = 1.0;
      sys.c(block) = s.c_scale;
      row += rows;
      ++block;
    }
  }
  sys.validate();
  return sys;
}

int regression_covariates(const std::vector<ComponentSpec>& specs) {
  for (const auto& spec : specs) {
    if (std::holds_alternative<Regression>(spec)) return std::get<Regression>(spec).num_covariates;
  }
  return 0;
}

SelectionMode regression_selection(const std::vector<ComponentSpec>& specs) {
  for (const auto& spec : specs) {
    if (std::holds_alternative<Regression>(spec)) return std::get<Regression>(spec).selection;
  }
  return SelectionMode::kFixed;
}

std::vector<std::string> disturbance_block_names(const StateSpaceSystem& system) {
  std::vector<std::string> names;
  names.reserve(system.r);
  for (int k = 0; k < system.r; ++k) {
    int row = -1;
    for (int i = 0; i < system.m; ++i) {
      if (system.R(i, k) != 0.0) {
        row = i;
        break;
      }
    }
    std::string name = "state" + std::to_string(k + 1);
    for (const auto& [block, range] : system.block_layout) {
      if (row >= range.first && row < range.second) {
        name = block;
        break;
      }
    }
    names.push_back(std::move(name));
  }
  return names;
}

SimulatedSeries simulate_from_system(const StateSpaceSystem& system, const Matrix& beta,
                                     const Matrix& covariates, int n, Rng& rng) {
  system.validate();
  if (n < 1) throw invalid_argument("simulate_from_system: n >= 1 required");
  const int p = static_cast<int>(beta.rows());
  if (p > 0) {
    if (beta.cols() != system.d) throw invalid_argument("simulate_from_system: beta must be P x d");
    if (covariates.rows() < n || covariates.cols() != p) {
      throw invalid_argument("simulate_from_system: covariates must be at least n x P");
    }
  } else if (covariates.size() != 0 && covariates.cols() != 0) {
    throw invalid_argument("simulate_from_system: covariates supplied without regression coefficients");
  }

  const Matrix sigma_chol = cholesky(system.Sigma, "simulate_from_system Sigma");
  const Matrix p1_sqrt = psd_sqrt(system.P1);
  const Vector c_sqrt = system.c.array().sqrt();

  SimulatedSeries out;
  out.y.resize(n, system.d);
  out.states.reserve(n);

  Matrix state = system.a1 + p1_sqrt * rng.normal_matrix(system.m, system.d) * sigma_chol.transpose();
  for (int t = 0; t < n; ++t) {
    out.states.push_back(state);
    RowVector mean = system.Z_at(t) * state;
    if (p > 0) mean += covariates.row(t) * beta;
    const double h_sqrt = std::sqrt(system.H_at(t));
    out.y.row(t) = mean + h_sqrt * (rng.normal_matrix(1, system.d) * sigma_chol.transpose());
    Matrix eta = rng.normal_matrix(system.r, system.d) * sigma_chol.transpose();
    eta = c_sqrt.asDiagonal() * eta;
    state = system.T_at(t) * state + system.R_at(t) * eta;
  }
  return out;
}

}  // namespace mbsts
