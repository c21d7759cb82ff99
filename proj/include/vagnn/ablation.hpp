#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vagnn/eval.hpp"
#include "vagnn/training.hpp"

namespace vagnn {

struct AblationRow {
  std::string name;
  std::string description;
  AblationFlags flags;
  int best_epoch = -1;
  double best_val_recall = 0.0;
  MetricsReport report;
};

struct AblationTable {
  std::vector<int> ks;
  std::vector<AblationRow> rows;
};

// Full model plus variants A..E, each flipping exactly one flag off the base.
std::vector<AblationRow> ablation_variants(const AblationFlags& base);

// Runs the full forward pass for fixed parameters and scores the requested
// split. Walks are resampled from the configured seed, matching training's
// initial augmentation.
MetricsReport evaluate_params(const ModelParams& params, const Dataset& data,
                              const TrainConfig& cfg, Split split, const std::vector<int>& ks);

AblationTable run_ablation_suite(const Dataset& data, const TrainConfig& base_cfg,
                                 const std::vector<int>& ks, std::ostream* log = nullptr);

std::string format_ablation_table(const AblationTable& t);

}  // namespace vagnn
