#pragma once

#include <string>

#include "vagnn/config.hpp"

namespace vagnn {

struct EvaluateOptions {
  std::string split = "test";
  std::string report_path;          // default: <report_dir>/metrics_<split>.tsv
  bool json_report = false;         // also write <report>.json
  std::string dump_embeddings_dir;  // when set, write final embedding snapshots
};

struct RecommendOptions {
  std::string user;
  int k = 10;
};

int cmd_preprocess(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg, const EvaluateOptions& opts);
int cmd_ablate(const RunConfig& cfg);
int cmd_recommend(const RunConfig& cfg, const RecommendOptions& opts);

// Parses arguments, dispatches, and maps error families to exit codes.
int run_cli(int argc, char** argv);

}  // namespace vagnn
