#pragma once

#include <vector>

#include "vagnn/graph.hpp"
#include "vagnn/matrix.hpp"
#include "vagnn/propagation.hpp"

namespace vagnn {

struct ModelParams {
  Matrix users;
  Matrix videos;
  Matrix vloggers;
  Matrix gate;  // 2d x 2d, d = per-view width
};

struct AblationFlags {
  bool contrastive = true;
  bool vlogger_task = true;
  bool video_view = true;
  bool vlogger_view = true;
  bool gate_blending = true;
};

struct ForwardResult {
  // video view: propagated user/video layers plus per-layer vlogger aggregates
  PropagatedLayers video_view;
  std::vector<Matrix> vlogger_agg_layers;
  Matrix vv_users, vv_videos, vv_vloggers;

  // vlogger view: propagated user/vlogger layers plus per-layer video aggregates
  PropagatedLayers vlogger_view;
  std::vector<Matrix> video_agg_layers;
  Matrix pv_users, pv_videos, pv_vloggers;

  // concatenated 2d tables
  Matrix users, videos, vloggers;
};

ForwardResult forward_model(const ModelParams& params, const TripartiteGraph& g,
                            const AugmentedNeighborhoods& aug, int layers, LayerAvgDenom denom,
                            const AblationFlags& ablation);

}  // namespace vagnn
