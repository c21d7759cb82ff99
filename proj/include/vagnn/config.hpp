#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vagnn/data.hpp"
#include "vagnn/training.hpp"

namespace vagnn {

struct RunConfig {
  std::uint64_t seed = 0;
  PositiveRuleConfig rules;
  SyntheticConfig synth;
  TrainConfig train;  // carries loss weights, ablation flags, and walk settings
  std::vector<int> eval_ks{10, 20, 50};

  std::string raw_log;
  std::string dataset_dir = "data/processed";
  std::string checkpoint = "out/model.ckpt";
  std::string report_dir = "out";
};

// Parses a JSON config file and merges it over the defaults. Unknown keys or
// wrongly typed values raise ConfigError naming the dotted key. Empty path
// returns the defaults.
RunConfig load_run_config(const std::string& path);

// Applies one "dotted.key=value" assignment. The value is parsed as JSON when
// possible, otherwise taken as a literal string.
void apply_set_override(RunConfig& cfg, const std::string& assignment);

// Environment overrides exist for paths only: VAGNN_RAW_LOG, VAGNN_DATASET_DIR,
// VAGNN_CHECKPOINT, VAGNN_REPORT_DIR.
void apply_env_overrides(RunConfig& cfg);

// Canonical key-sorted dump of the whole config, paths included.
std::string canonical_config(const RunConfig& cfg);

// Digest over the canonical dump with the paths subtree removed, so moving
// artifacts around does not change the experiment identity.
std::uint64_t run_config_digest(const RunConfig& cfg);

// Pushes the root seed into the sub-configs, stamps the digest, validates.
void finalize_run_config(RunConfig& cfg);

}  // namespace vagnn
