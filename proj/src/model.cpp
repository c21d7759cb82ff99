#include "vagnn/model.hpp"

#include "vagnn/errors.hpp"

namespace vagnn {

ForwardResult forward_model(const ModelParams& params, const TripartiteGraph& g,
                            const AugmentedNeighborhoods& aug, int layers, LayerAvgDenom denom,
                            const AblationFlags& ablation) {
  if (params.users.rows != g.n_users() || params.videos.rows != g.n_videos() ||
      params.vloggers.rows != g.n_vloggers()) {
    throw ShapeError("forward_model: parameter tables do not match the graph");
  }
  const std::size_t d = params.users.cols;
  if (params.videos.cols != d || params.vloggers.cols != d) {
    throw ShapeError("forward_model: embedding widths differ across entity classes");
  }
  if (params.gate.rows != 2 * d || params.gate.cols != 2 * d) {
    throw ShapeError("forward_model: gate matrix must be 2d x 2d");
  }

  ForwardResult out;

  if (ablation.video_view) {
    out.video_view = propagate_video_view(params.users, params.videos, aug, layers);
    out.vlogger_agg_layers = aggregate_vloggers_video_view(out.video_view.second, g);
    out.vv_users = average_layers(out.video_view.first, denom);
    out.vv_videos = average_layers(out.video_view.second, denom);
    out.vv_vloggers = average_layers(out.vlogger_agg_layers, denom);
  } else {
    out.vv_users = params.users;
    out.vv_videos = params.videos;
    out.vv_vloggers = params.vloggers;
  }

  if (ablation.vlogger_view) {
    out.vlogger_view = propagate_vlogger_view(params.users, params.vloggers, aug, layers);
    out.video_agg_layers = aggregate_videos_vlogger_view(out.vlogger_view.first, g);
    out.pv_users = average_layers(out.vlogger_view.first, denom);
    out.pv_vloggers = average_layers(out.vlogger_view.second, denom);
    out.pv_videos = average_layers(out.video_agg_layers, denom);
  } else {
    out.pv_users = params.users;
    out.pv_videos = params.videos;
    out.pv_vloggers = params.vloggers;
  }

  out.users = concat_views(out.vv_users, out.pv_users);
  out.videos = concat_views(out.vv_videos, out.pv_videos);
  out.vloggers = concat_views(out.vv_vloggers, out.pv_vloggers);
  return out;
}

}  // namespace vagnn
