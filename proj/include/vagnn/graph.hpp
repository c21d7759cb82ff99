#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vagnn/errors.hpp"

namespace vagnn {

enum class EntityKind : std::uint8_t { kUser = 0, kVideo = 1, kVlogger = 2 };

const char* entity_kind_name(EntityKind kind);

struct NodeId {
  EntityKind kind;
  std::uint32_t index;

  bool operator==(const NodeId&) const = default;
};

using EdgeList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

constexpr std::uint32_t kNoPublisher = UINT32_MAX;

// Immutable tripartite adjacency over users, videos, and vloggers. Edges are
// stored in both directions; neighbor lists are sorted and duplicate-free.
class TripartiteGraph {
 public:
  // uv/up/pv use dense indices. Duplicate input edges are silently collapsed.
  // Throws GraphError on an empty user-video edge list, an out-of-range index,
  // or a video with more than one publisher among pv edges.
  static TripartiteGraph build(std::size_t n_users, std::size_t n_videos, std::size_t n_vloggers,
                               const EdgeList& user_video, const EdgeList& user_vlogger,
                               const EdgeList& vlogger_video);

  std::size_t n_users() const { return user_videos_.size(); }
  std::size_t n_videos() const { return video_users_.size(); }
  std::size_t n_vloggers() const { return vlogger_users_.size(); }

  const std::vector<std::uint32_t>& videos_of_user(std::uint32_t u) const { return user_videos_[u]; }
  const std::vector<std::uint32_t>& users_of_video(std::uint32_t v) const { return video_users_[v]; }
  const std::vector<std::uint32_t>& vloggers_of_user(std::uint32_t u) const { return user_vloggers_[u]; }
  const std::vector<std::uint32_t>& users_of_vlogger(std::uint32_t p) const { return vlogger_users_[p]; }
  const std::vector<std::uint32_t>& videos_of_vlogger(std::uint32_t p) const { return vlogger_videos_[p]; }

  bool has_publisher(std::uint32_t v) const { return publisher_[v] != kNoPublisher; }

  // Throws GraphError if the video has no publisher.
  std::uint32_t publisher_of(std::uint32_t v) const;

  std::size_t uv_edge_count() const { return uv_edge_count_; }
  std::size_t up_edge_count() const { return up_edge_count_; }
  std::size_t pv_edge_count() const { return pv_edge_count_; }

 private:
  std::vector<std::vector<std::uint32_t>> user_videos_, video_users_;
  std::vector<std::vector<std::uint32_t>> user_vloggers_, vlogger_users_;
  std::vector<std::vector<std::uint32_t>> vlogger_videos_;
  std::vector<std::uint32_t> publisher_;
  std::size_t uv_edge_count_ = 0, up_edge_count_ = 0, pv_edge_count_ = 0;
};

struct RawEdge {
  std::string src;
  std::string dst;
};

// Bijective raw-id <-> dense-index mapping for one entity class.
struct IdRemap {
  std::vector<std::string> to_raw;                       // dense -> raw
  std::unordered_map<std::string, std::uint32_t> to_dense;  // raw -> dense

  std::uint32_t add_or_get(const std::string& raw);
  std::size_t size() const { return to_raw.size(); }
};

struct BuiltGraph {
  TripartiteGraph graph;
  IdRemap users, videos, vloggers;
};

// Remaps raw ids to dense indices (first-appearance order: uv, then up, then
// pv edge lists) and builds the graph.
BuiltGraph build_graph(const std::vector<RawEdge>& user_video,
                       const std::vector<RawEdge>& user_vlogger,
                       const std::vector<RawEdge>& vlogger_video);

struct MetaPathConfig {
  double q1 = 0.5;  // probability of stepping user -> vlogger
  double q2 = 0.5;  // probability of vlogger -> user over vlogger -> video
  std::uint32_t walks_per_user = 10;
  std::uint32_t vlogger_view_walks_per_user = 10;
  std::uint64_t seed = 0;
  // Literal reading keeps user-vlogger-user endpoints inside the video view's
  // user neighbor sets; disable to drop those mixed-type edges.
  bool uvu_in_video_view = true;

  void validate() const;
};

// Deduplicated endpoint edges produced by meta-path random walks.
// user_user / user_video augment the video view; user_vlogger carries the
// vlogger attributed to each user-video-user walk and augments the vlogger view.
struct MetaPathWalks {
  EdgeList user_user;     // (min(u,u'), max(u,u'))
  EdgeList user_video;
  EdgeList user_vlogger;  // (endpoint user u', attributed vlogger p)
};

// One video-view walk attempt from user u: with probability q1 step to a
// vlogger p in P_u, then with probability q2 to another user in U_p, else to
// a video in V_p. Aborted attempts return kNone.
struct VideoViewWalkOutcome {
  enum class Kind { kNone, kUserEndpoint, kVideoEndpoint } kind = Kind::kNone;
  std::uint32_t endpoint = 0;
};
VideoViewWalkOutcome sample_video_view_walk(const TripartiteGraph& g, std::uint32_t u, double q1,
                                            double q2, std::mt19937_64& rng);

// One vlogger-view walk attempt from user u (gated by q1): uniform video
// v in V_u, uniform endpoint user u' != u in U_v, then a vlogger p drawn
// uniformly from P_u to attribute the co-engagement edge (u', p) to.
struct VloggerViewWalkOutcome {
  bool ok = false;
  std::uint32_t endpoint_user = 0;
  std::uint32_t vlogger = 0;
};
VloggerViewWalkOutcome sample_vlogger_view_walk(const TripartiteGraph& g, std::uint32_t u,
                                                double q1, std::mt19937_64& rng);

// Pure function of (graph, cfg): users visited in index order, attempts in a
// fixed sequence, single rng stream seeded from cfg.seed. Output edges are
// sorted and deduplicated.
MetaPathWalks sample_meta_paths(const TripartiteGraph& g, const MetaPathConfig& cfg);

// Per-view neighbor sets: base bipartite adjacency plus walk endpoints, all
// inserted symmetrically. The video view is a graph over users+videos whose
// user sets may contain both videos and users; the vlogger view is a graph
// over users+vloggers.
struct AugmentedNeighborhoods {
  // video view
  std::vector<std::vector<std::uint32_t>> user_videos;  // per user: video neighbors
  std::vector<std::vector<std::uint32_t>> user_users;   // per user: user endpoints of u-p-u walks
  std::vector<std::vector<std::uint32_t>> video_users;  // per video: user neighbors
  // vlogger view
  std::vector<std::vector<std::uint32_t>> user_vloggers;  // per user: vlogger neighbors
  std::vector<std::vector<std::uint32_t>> vlogger_users;  // per vlogger: user neighbors

  std::size_t video_view_user_degree(std::uint32_t u) const {
    return user_videos[u].size() + user_users[u].size();
  }
  std::size_t video_view_video_degree(std::uint32_t v) const { return video_users[v].size(); }
  std::size_t vlogger_view_user_degree(std::uint32_t u) const { return user_vloggers[u].size(); }
  std::size_t vlogger_view_vlogger_degree(std::uint32_t p) const { return vlogger_users[p].size(); }
};

// Unions walk endpoints into the base bipartite sets. Throws GraphError if a
// walk edge references a node outside the graph.
AugmentedNeighborhoods build_augmented_neighborhoods(const TripartiteGraph& g,
                                                     const MetaPathWalks& walks,
                                                     bool uvu_in_video_view = true);

}  // namespace vagnn
