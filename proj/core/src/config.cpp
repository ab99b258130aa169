#include "mbsts/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace mbsts {

using nlohmann::json;

SelectionMode ModelConfig::selection_mode() const {
  if (selection == "spike_slab") return SelectionMode::kSpikeSlab;
  if (selection == "fixed") return SelectionMode::kFixed;
  throw invalid_argument("model.selection must be 'spike_slab' or 'fixed', got '" + selection + "'");
}

std::vector<ComponentSpec> ModelConfig::component_specs(int num_covariates) const {
  std::vector<ComponentSpec> specs;
  if (trend) specs.push_back(LocalLevelTrend{});
  if (seasonal) specs.push_back(Seasonal{seasonal_period, 1.0});
  if (num_covariates > 0) specs.push_back(Regression{num_covariates, selection_mode()});
  return specs;
}

namespace {

PanelSchema schema_from_json(const json& j) {
  PanelSchema schema;
  schema.date_column = j.value("date_column", "date");
  schema.outcome_columns = j.at("outcomes").get<std::vector<std::string>>();
  if (j.contains("covariates")) {
    schema.covariate_columns = j.at("covariates").get<std::vector<std::string>>();
  }
  if (j.contains("frozen")) {
    schema.frozen_columns = j.at("frozen").get<std::vector<std::string>>();
  }
  schema.intervention_date = Date::parse(j.at("intervention_date").get<std::string>());
  return schema;
}

json schema_to_json(const PanelSchema& schema) {
  json j;
  j["date_column"] = schema.date_column;
  j["outcomes"] = schema.outcome_columns;
  j["covariates"] = schema.covariate_columns;
  j["frozen"] = schema.frozen_columns;
  j["intervention_date"] = schema.intervention_date.to_string();
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  try {
    RunConfig config;
    const json& data = j.at("data");
    const auto read_pair = [](const json& item) {
      DataConfig pair;
      pair.path = item.at("path").get<std::string>();
      pair.group_id = item.value("group_id", pair.path);
      pair.schema = schema_from_json(item);
      return pair;
    };
    if (data.is_array()) {
      for (const auto& item : data) config.pairs.push_back(read_pair(item));
    } else {
      config.pairs.push_back(read_pair(data));
    }

    if (j.contains("model")) {
      const json& m = j.at("model");
      config.model.trend = m.value("trend", true);
      config.model.seasonal = m.value("seasonal", true);
      config.model.seasonal_period = m.value("seasonal_period", 7);
      config.model.selection = m.value("selection", "spike_slab");
    }
    if (j.contains("prior")) {
      const json& p = j.at("prior");
      config.prior.rho = p.value("rho", 0.0);
      config.prior.h = p.value("h", 1.0);
      config.prior.k = p.value("k", 1.0);
      config.prior.g = p.value("g", 1.0);
      config.prior.pi = p.value("pi", 0.5);
      config.prior.sr_multiplier = p.value("sr_multiplier", 1.0);
    }
    if (j.contains("mcmc")) {
      const json& m = j.at("mcmc");
      config.mcmc.niter = m.value("niter", 1000);
      config.mcmc.burn_in = m.value("burn_in", -1);
      config.mcmc.seed = m.value("seed", std::uint64_t{1});
    }
    if (j.contains("horizons")) config.horizons = j.at("horizons").get<std::vector<int>>();
    if (j.contains("ppc")) {
      config.ppc_max_lag = j.at("ppc").value("max_lag", 20);
      config.ppc_extra_statistics = j.at("ppc").value("extra_statistics", false);
    }
    config.output_dir = j.value("output_dir", "out");
    config.threads = j.value("threads", 0);
    return config;
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void validate_run_config(const RunConfig& config) {
  if (config.pairs.empty()) throw invalid_argument("config: at least one data entry required");
  for (const auto& pair : config.pairs) {
    if (!std::filesystem::exists(pair.path)) {
      throw invalid_argument("config: data file '" + pair.path + "' does not exist");
    }
    if (pair.schema.outcome_columns.empty()) {
      throw invalid_argument("config: data entry '" + pair.group_id + "' has no outcome columns");
    }
  }
  if (config.horizons.empty()) throw invalid_argument("config: horizons must be non-empty");
  for (size_t i = 0; i < config.horizons.size(); ++i) {
    if (config.horizons[i] < 1) throw invalid_argument("config: horizons must be >= 1");
    if (i > 0 && config.horizons[i] <= config.horizons[i - 1]) {
      throw invalid_argument("config: horizons must be sorted ascending");
    }
  }
  if (!(std::abs(config.prior.rho) < 1.0)) throw invalid_argument("config: |prior.rho| < 1 required");
  if (config.prior.h <= 0 || config.prior.k <= 0 || config.prior.g <= 0 ||
      config.prior.sr_multiplier <= 0) {
    throw invalid_argument("config: prior scales must be positive");
  }
  if (!(config.prior.pi > 0 && config.prior.pi < 1)) {
    throw invalid_argument("config: prior.pi must lie in (0, 1)");
  }
  if (config.mcmc.niter < 1) throw invalid_argument("config: mcmc.niter must be >= 1");
  if (config.model.seasonal && config.model.seasonal_period < 2) {
    throw invalid_argument("config: seasonal_period must be >= 2");
  }
  if (!config.model.trend && !config.model.seasonal) {
    throw invalid_argument("config: at least one of trend/seasonal must be enabled");
  }
  config.model.selection_mode();  // validates the string
}

std::string canonical_config_json(const RunConfig& config) {
  // nlohmann::json orders object keys lexicographically, which makes dump()
  // canonical given canonical scalar formatting.
  json j;
  json data = json::array();
  for (const auto& pair : config.pairs) {
    json item = schema_to_json(pair.schema);
    item["path"] = pair.path;
    item["group_id"] = pair.group_id;
    data.push_back(item);
  }
  j["data"] = data;
  j["model"] = {{"trend", config.model.trend},
                {"seasonal", config.model.seasonal},
                {"seasonal_period", config.model.seasonal_period},
                {"selection", config.model.selection}};
  j["prior"] = {{"rho", config.prior.rho},   {"h", config.prior.h},
                {"k", config.prior.k},       {"g", config.prior.g},
                {"pi", config.prior.pi},     {"sr_multiplier", config.prior.sr_multiplier}};
  j["mcmc"] = {{"niter", config.mcmc.niter},
               {"burn_in", config.mcmc.burn_in},
               {"seed", config.mcmc.seed}};
  j["horizons"] = config.horizons;
  j["ppc"] = {{"max_lag", config.ppc_max_lag}, {"extra_statistics", config.ppc_extra_statistics}};
  // output_dir and threads are execution details, not statistical content;
  // they stay out of the canonical form so reruns hash identically.
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = canonical_config_json(config);
  std::uint64_t hash = 14695981039346656037ULL;  // FNV-1a
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MBSTS_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace mbsts
