#include "vagnn/propagation.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace vagnn {

namespace {

void check_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) {
    throw NumericError(std::string("non-finite values in ") + what);
  }
}

}  // namespace

void video_view_step(const Matrix& users_in, const Matrix& videos_in,
                     const AugmentedNeighborhoods& aug, Matrix& users_out, Matrix& videos_out) {
  const std::size_t d = users_in.cols;
  const std::size_t n_users = aug.user_videos.size();
  const std::size_t n_videos = aug.video_users.size();
  if (users_in.rows != n_users || videos_in.rows != n_videos || videos_in.cols != d) {
    throw ShapeError("video_view_step: table shapes do not match the graph");
  }
  users_out = Matrix(n_users, d);
  videos_out = Matrix(n_videos, d);

  for (std::uint32_t u = 0; u < n_users; ++u) {
    const double du = static_cast<double>(aug.video_view_user_degree(u));
    if (du == 0.0) continue;
    double* out = users_out.row(u);
    for (std::uint32_t v : aug.user_videos[u]) {
      const double w = 1.0 / (std::sqrt(du) * std::sqrt(static_cast<double>(aug.video_view_video_degree(v))));
      axpy({out, d}, videos_in.row_span(v), w);
    }
    for (std::uint32_t u2 : aug.user_users[u]) {
      const double w = 1.0 / (std::sqrt(du) * std::sqrt(static_cast<double>(aug.video_view_user_degree(u2))));
      axpy({out, d}, users_in.row_span(u2), w);
    }
  }
  for (std::uint32_t v = 0; v < n_videos; ++v) {
    const double dv = static_cast<double>(aug.video_view_video_degree(v));
    if (dv == 0.0) continue;
    double* out = videos_out.row(v);
    for (std::uint32_t u : aug.video_users[v]) {
      const double w = 1.0 / (std::sqrt(dv) * std::sqrt(static_cast<double>(aug.video_view_user_degree(u))));
      axpy({out, d}, users_in.row_span(u), w);
    }
  }
}

void vlogger_view_step(const Matrix& users_in, const Matrix& vloggers_in,
                       const AugmentedNeighborhoods& aug, Matrix& users_out, Matrix& vloggers_out) {
  const std::size_t d = users_in.cols;
  const std::size_t n_users = aug.user_vloggers.size();
  const std::size_t n_vloggers = aug.vlogger_users.size();
  if (users_in.rows != n_users || vloggers_in.rows != n_vloggers || vloggers_in.cols != d) {
    throw ShapeError("vlogger_view_step: table shapes do not match the graph");
  }
  users_out = Matrix(n_users, d);
  vloggers_out = Matrix(n_vloggers, d);

  for (std::uint32_t u = 0; u < n_users; ++u) {
    const double du = static_cast<double>(aug.vlogger_view_user_degree(u));
    if (du == 0.0) continue;
    double* out = users_out.row(u);
    for (std::uint32_t p : aug.user_vloggers[u]) {
      const double w = 1.0 / (std::sqrt(du) * std::sqrt(static_cast<double>(aug.vlogger_view_vlogger_degree(p))));
      axpy({out, d}, vloggers_in.row_span(p), w);
    }
  }
  for (std::uint32_t p = 0; p < n_vloggers; ++p) {
    const double dp = static_cast<double>(aug.vlogger_view_vlogger_degree(p));
    if (dp == 0.0) continue;
    double* out = vloggers_out.row(p);
    for (std::uint32_t u : aug.vlogger_users[p]) {
      const double w = 1.0 / (std::sqrt(dp) * std::sqrt(static_cast<double>(aug.vlogger_view_user_degree(u))));
      axpy({out, d}, users_in.row_span(u), w);
    }
  }
}

PropagatedLayers propagate_video_view(const Matrix& users0, const Matrix& videos0,
                                      const AugmentedNeighborhoods& aug, int layers) {
  PropagatedLayers out;
  out.first.push_back(users0);
  out.second.push_back(videos0);
  for (int l = 1; l <= layers; ++l) {
    Matrix u, v;
    video_view_step(out.first.back(), out.second.back(), aug, u, v);
    check_finite(u, "video-view user layer");
    check_finite(v, "video-view video layer");
    out.first.push_back(std::move(u));
    out.second.push_back(std::move(v));
  }
  return out;
}

PropagatedLayers propagate_vlogger_view(const Matrix& users0, const Matrix& vloggers0,
                                        const AugmentedNeighborhoods& aug, int layers) {
  PropagatedLayers out;
  out.first.push_back(users0);
  out.second.push_back(vloggers0);
  for (int l = 1; l <= layers; ++l) {
    Matrix u, p;
    vlogger_view_step(out.first.back(), out.second.back(), aug, u, p);
    check_finite(u, "vlogger-view user layer");
    check_finite(p, "vlogger-view vlogger layer");
    out.first.push_back(std::move(u));
    out.second.push_back(std::move(p));
  }
  return out;
}

std::vector<Matrix> aggregate_vloggers_video_view(const std::vector<Matrix>& video_layers,
                                                  const TripartiteGraph& g) {
  std::vector<Matrix> out;
  out.reserve(video_layers.size());
  for (const Matrix& videos : video_layers) {
    Matrix table(g.n_vloggers(), videos.cols);
    for (std::uint32_t p = 0; p < g.n_vloggers(); ++p) {
      const auto& published = g.videos_of_vlogger(p);
      if (published.empty()) continue;
      double* row = table.row(p);
      for (std::uint32_t v : published) axpy({row, videos.cols}, videos.row_span(v), 1.0);
      const double inv = 1.0 / static_cast<double>(published.size());
      for (std::size_t c = 0; c < videos.cols; ++c) row[c] *= inv;
    }
    out.push_back(std::move(table));
  }
  return out;
}

std::vector<Matrix> aggregate_videos_vlogger_view(const std::vector<Matrix>& user_layers,
                                                  const TripartiteGraph& g) {
  std::vector<Matrix> out;
  out.reserve(user_layers.size());
  for (const Matrix& users : user_layers) {
    Matrix table(g.n_videos(), users.cols);
    for (std::uint32_t v = 0; v < g.n_videos(); ++v) {
      const auto& watchers = g.users_of_video(v);
      if (watchers.empty()) continue;
      double* row = table.row(v);
      for (std::uint32_t u : watchers) axpy({row, users.cols}, users.row_span(u), 1.0);
      const double inv = 1.0 / static_cast<double>(watchers.size());
      for (std::size_t c = 0; c < users.cols; ++c) row[c] *= inv;
    }
    out.push_back(std::move(table));
  }
  return out;
}

Matrix average_layers(const std::vector<Matrix>& layers, LayerAvgDenom denom) {
  if (layers.empty()) throw ShapeError("average_layers: no layers");
  const int L = static_cast<int>(layers.size()) - 1;
  double div;
  if (denom == LayerAvgDenom::kLayersPlusOne) {
    div = static_cast<double>(L + 1);
  } else {
    if (L == 0) throw ConfigError("layer_avg_denominator=L requires at least one propagation layer");
    div = static_cast<double>(L);
  }
  Matrix out(layers[0].rows, layers[0].cols);
  for (const Matrix& layer : layers) {
    require_same_shape(out, layer, "average_layers");
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += layer.data[i];
  }
  const double inv = 1.0 / div;
  for (double& x : out.data) x *= inv;
  return out;
}

Matrix concat_views(const Matrix& video_view_final, const Matrix& vlogger_view_final) {
  if (video_view_final.rows != vlogger_view_final.rows ||
      video_view_final.cols != vlogger_view_final.cols) {
    throw ShapeError("concat_views: view tables differ in shape");
  }
  const std::size_t d = video_view_final.cols;
  Matrix out(video_view_final.rows, 2 * d);
  for (std::size_t r = 0; r < out.rows; ++r) {
    std::memcpy(out.row(r), video_view_final.row(r), d * sizeof(double));
    std::memcpy(out.row(r) + d, vlogger_view_final.row(r), d * sizeof(double));
  }
  return out;
}

namespace {

constexpr char kSnapshotMagic[4] = {'V', 'A', 'E', 'M'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void write_pod(std::ofstream& f, T value) {
  f.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f, const std::string& path) {
  T value;
  f.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!f) throw IoError("truncated snapshot file: " + path);
  return value;
}

}  // namespace

void write_embedding_snapshot(const std::string& path, EntityKind kind, std::int32_t layer_tag,
                              const Matrix& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open snapshot file for writing: " + path);
  f.write(kSnapshotMagic, 4);
  write_pod(f, kSnapshotVersion);
  write_pod(f, static_cast<std::uint8_t>(kind));
  write_pod(f, layer_tag);
  write_pod(f, static_cast<std::uint64_t>(table.rows));
  write_pod(f, static_cast<std::uint64_t>(table.cols));
  f.write(reinterpret_cast<const char*>(table.data.data()),
          static_cast<std::streamsize>(table.data.size() * sizeof(double)));
  if (!f) throw IoError("write failure on snapshot file: " + path);
}

EmbeddingSnapshot read_embedding_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open snapshot file: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kSnapshotMagic, 4) != 0) {
    throw IoError("not an embedding snapshot file: " + path);
  }
  auto version = read_pod<std::uint32_t>(f, path);
  if (version != kSnapshotVersion) {
    throw IoError("unsupported snapshot version " + std::to_string(version) + ": " + path);
  }
  EmbeddingSnapshot snap;
  snap.kind = static_cast<EntityKind>(read_pod<std::uint8_t>(f, path));
  snap.layer_tag = read_pod<std::int32_t>(f, path);
  auto rows = read_pod<std::uint64_t>(f, path);
  auto cols = read_pod<std::uint64_t>(f, path);
  snap.table = Matrix(rows, cols);
  f.read(reinterpret_cast<char*>(snap.table.data.data()),
         static_cast<std::streamsize>(snap.table.data.size() * sizeof(double)));
  if (!f) throw IoError("truncated snapshot file: " + path);
  return snap;
}

}  // namespace vagnn
