#ifndef MBSTS_CONFIG_HPP_
#define MBSTS_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mbsts/components.hpp"
#include "mbsts/panel.hpp"

namespace mbsts {

struct DataConfig {
  std::string group_id;
  std::string path;
  PanelSchema schema;
};

struct ModelConfig {
  bool trend = true;
  bool seasonal = true;
  int seasonal_period = 7;
  std::string selection = "spike_slab";  // or "fixed"

  SelectionMode selection_mode() const;
  std::vector<ComponentSpec> component_specs(int num_covariates) const;
};

struct PriorSettings {
  double rho = 0.0;
  double h = 1.0;
  double k = 1.0;
  double g = 1.0;
  double pi = 0.5;
  double sr_multiplier = 1.0;  // S_r = multiplier * S_eps
};

struct McmcSettings {
  int niter = 1000;
  int burn_in = -1;  // -1: max(100, niter/10)
  std::uint64_t seed = 1;
};

struct RunConfig {
  std::vector<DataConfig> pairs;
  ModelConfig model;
  PriorSettings prior;
  McmcSettings mcmc;
  std::vector<int> horizons = {30, 90, 180};
  int ppc_max_lag = 20;
  bool ppc_extra_statistics = false;  // add mean/sd to the max statistic
  std::string output_dir = "out";
  int threads = 0;  // 0: MBSTS_THREADS env var, else hardware concurrency
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
// Validation that touches the filesystem (input files exist, horizons make
// sense); throws invalid_argument with a per-field diagnostic.
void validate_run_config(const RunConfig& config);

// Canonical JSON rendering (sorted keys, round-trip doubles); the FNV-1a hash
// of this string identifies a configuration in run manifests.
std::string canonical_config_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

// Thread-count resolution honoring the MBSTS_THREADS environment variable.
int resolve_threads(int requested);

}  // namespace mbsts

#endif  // MBSTS_CONFIG_HPP_
