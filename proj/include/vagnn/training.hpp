#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vagnn/data.hpp"
#include "vagnn/graph.hpp"
#include "vagnn/matrix.hpp"
#include "vagnn/model.hpp"
#include "vagnn/objective.hpp"
#include "vagnn/rng.hpp"

namespace vagnn {

enum class ContrastiveMode { kFullSet, kInBatch };

struct TrainConfig {
  int dim = 64;  // per-view width; final embeddings are 2*dim wide
  int layers = 3;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int batch_size = 4096;
  int negatives = 1;
  int max_epochs = 100;
  int patience = 10;
  std::uint64_t seed = 0;
  double init_std = 0.1;
  LayerAvgDenom layer_avg = LayerAvgDenom::kLayersPlusOne;
  LossWeights loss;
  AblationFlags ablation;
  ContrastiveMode contrastive_mode = ContrastiveMode::kFullSet;
  MetaPathConfig walks;
  int resample_walks_every = 0;  // 0 = sample walks once
  int eval_k = 10;               // early-stopping Recall@K on validation
  std::uint64_t config_digest = 0;
};

void validate_train_config(const TrainConfig& cfg);

struct BprPair {
  std::uint32_t user = 0;
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
};

struct LossBreakdown {
  double video_bpr = 0.0;
  double vlogger_bpr = 0.0;
  double cl = 0.0;
  double reg = 0.0;
  double total = 0.0;
};

struct Gradients {
  Matrix users, videos, vloggers, gate;
};

ModelParams init_params(std::size_t n_users, std::size_t n_videos, std::size_t n_vloggers, int dim,
                        double init_std, std::uint64_t seed);

// Uniform draw from [0, n_items) rejecting the user's sorted positives.
std::uint32_t sample_negative(const std::vector<std::uint32_t>& positives_sorted,
                              std::uint32_t n_items, std::mt19937_64& rng);

// Exact reverse-mode gradients of the total loss through both views,
// aggregation, layer averaging, gating, BPR, InfoNCE, and regularization.
LossBreakdown compute_gradients(const ModelParams& params, const ForwardResult& fwd,
                                const TripartiteGraph& g, const AugmentedNeighborhoods& aug,
                                const std::vector<BprPair>& video_pairs,
                                const std::vector<BprPair>& vlogger_pairs, const TrainConfig& cfg,
                                Gradients* grads);

struct AdamMoments {
  Matrix m, v;
};

struct AdamState {
  AdamMoments users, videos, vloggers, gate;
  std::int64_t step = 0;
};

AdamState make_adam_state(const ModelParams& params);

void adam_update(Matrix& param, const Matrix& grad, AdamMoments& mom, double lr, double beta1,
                 double beta2, double eps, std::int64_t step);

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg);

struct EpochLog {
  int epoch = 0;
  LossBreakdown loss;  // per-batch means over the epoch
  double val_recall = 0.0;
  bool improved = false;
};

struct TrainState {
  ModelParams params;
  AdamState opt;
  int epoch = 0;
  double best_val_recall = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
};

struct TrainResult {
  TrainState best;  // checkpoint with the best validation recall
  std::vector<EpochLog> history;
  int best_epoch = -1;
  double best_val_recall = 0.0;
};

// Trains on the training split (graph from train edges plus full user-vlogger
// and publishing sets), early-stops on validation Recall@eval_k, and returns
// the best checkpoint. One JSON record per epoch is written to `log` if given.
TrainResult train(const Dataset& data, const TrainConfig& cfg, std::ostream* log = nullptr);

void save_checkpoint(const std::string& path, const TrainState& state);
TrainState load_checkpoint(const std::string& path);
void check_checkpoint_shapes(const TrainState& state, std::size_t n_users, std::size_t n_videos,
                             std::size_t n_vloggers, int dim);

}  // namespace vagnn
