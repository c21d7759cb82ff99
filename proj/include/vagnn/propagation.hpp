#pragma once

#include <string>
#include <vector>

#include "vagnn/graph.hpp"
#include "vagnn/matrix.hpp"

namespace vagnn {

// Divisor of the layer average: the uniform mean 1/(L+1) over layers 0..L, or
// the 1/L variant. Any positive rescaling is absorbed by training.
enum class LayerAvgDenom { kLayers = 0, kLayersPlusOne = 1 };

// Per-layer and layer-averaged tables for one view, covering all three entity
// classes (two propagated directly, the third aggregated cross-entity).
struct ViewEmbeddings {
  std::vector<Matrix> user_layers;     // 0..L
  std::vector<Matrix> video_layers;    // 0..L
  std::vector<Matrix> vlogger_layers;  // 0..L
  Matrix user_final, video_final, vlogger_final;
};

// One application of the video-view symmetric-normalized operator: each
// node's output is the sum of its augmented neighbors' inputs weighted by
// 1/(sqrt(deg_aug(node)) * sqrt(deg_aug(neighbor))). Nodes with empty
// neighbor sets produce zero. The operator is its own transpose.
void video_view_step(const Matrix& users_in, const Matrix& videos_in,
                     const AugmentedNeighborhoods& aug, Matrix& users_out, Matrix& videos_out);

void vlogger_view_step(const Matrix& users_in, const Matrix& vloggers_in,
                       const AugmentedNeighborhoods& aug, Matrix& users_out, Matrix& vloggers_out);

struct PropagatedLayers {
  std::vector<Matrix> first;   // users
  std::vector<Matrix> second;  // videos (video view) or vloggers (vlogger view)
};

// L sweeps of video_view_step starting from the base tables; layer 0 is the
// base. Throws NumericError if a non-finite value appears.
PropagatedLayers propagate_video_view(const Matrix& users0, const Matrix& videos0,
                                      const AugmentedNeighborhoods& aug, int layers);

PropagatedLayers propagate_vlogger_view(const Matrix& users0, const Matrix& vloggers0,
                                        const AugmentedNeighborhoods& aug, int layers);

// Per-layer vlogger tables in the video view: mean of the published videos'
// embeddings at the same layer; vloggers with no videos get zero.
std::vector<Matrix> aggregate_vloggers_video_view(const std::vector<Matrix>& video_layers,
                                                  const TripartiteGraph& g);

// Per-layer video tables in the vlogger view: mean over the video's user
// neighbors; videos with no interacting users get zero.
std::vector<Matrix> aggregate_videos_vlogger_view(const std::vector<Matrix>& user_layers,
                                                  const TripartiteGraph& g);

Matrix average_layers(const std::vector<Matrix>& layers, LayerAvgDenom denom);

// Width-2d concatenation: first d columns from the video view, last d from
// the vlogger view.
Matrix concat_views(const Matrix& video_view_final, const Matrix& vlogger_view_final);

// Embedding snapshot file: magic "VAEM", u32 version, u8 entity class,
// i32 layer tag (-1 = layer-averaged final), u64 count, u64 dim, then
// count*dim float64 little-endian values in row-major order.
struct EmbeddingSnapshot {
  EntityKind kind;
  std::int32_t layer_tag;
  Matrix table;
};

void write_embedding_snapshot(const std::string& path, EntityKind kind, std::int32_t layer_tag,
                              const Matrix& table);
EmbeddingSnapshot read_embedding_snapshot(const std::string& path);

}  // namespace vagnn
