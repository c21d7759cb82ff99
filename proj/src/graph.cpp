#include "vagnn/graph.hpp"

#include <algorithm>
#include <set>

#include "vagnn/rng.hpp"

namespace vagnn {

const char* entity_kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::kUser: return "user";
    case EntityKind::kVideo: return "video";
    case EntityKind::kVlogger: return "vlogger";
  }
  return "?";
}

namespace {

void sort_unique(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void check_range(std::uint32_t idx, std::size_t count, const char* what) {
  if (idx >= count) {
    throw GraphError(std::string(what) + " index " + std::to_string(idx) + " out of range (count " +
                     std::to_string(count) + ")");
  }
}

std::size_t count_edges(const std::vector<std::vector<std::uint32_t>>& adj) {
  std::size_t n = 0;
  for (const auto& l : adj) n += l.size();
  return n;
}

}  // namespace

TripartiteGraph TripartiteGraph::build(std::size_t n_users, std::size_t n_videos,
                                       std::size_t n_vloggers, const EdgeList& user_video,
                                       const EdgeList& user_vlogger, const EdgeList& vlogger_video) {
  if (user_video.empty()) {
    throw GraphError("empty user-video edge list");
  }
  TripartiteGraph g;
  g.user_videos_.resize(n_users);
  g.video_users_.resize(n_videos);
  g.user_vloggers_.resize(n_users);
  g.vlogger_users_.resize(n_vloggers);
  g.vlogger_videos_.resize(n_vloggers);
  g.publisher_.assign(n_videos, kNoPublisher);

  for (auto [u, v] : user_video) {
    check_range(u, n_users, "user");
    check_range(v, n_videos, "video");
    g.user_videos_[u].push_back(v);
    g.video_users_[v].push_back(u);
  }
  for (auto [u, p] : user_vlogger) {
    check_range(u, n_users, "user");
    check_range(p, n_vloggers, "vlogger");
    g.user_vloggers_[u].push_back(p);
    g.vlogger_users_[p].push_back(u);
  }
  for (auto [p, v] : vlogger_video) {
    check_range(p, n_vloggers, "vlogger");
    check_range(v, n_videos, "video");
    if (g.publisher_[v] != kNoPublisher && g.publisher_[v] != p) {
      throw GraphError("video " + std::to_string(v) + " has more than one publisher (" +
                       std::to_string(g.publisher_[v]) + " and " + std::to_string(p) + ")");
    }
    g.publisher_[v] = p;
    g.vlogger_videos_[p].push_back(v);
  }

  for (auto& l : g.user_videos_) sort_unique(l);
  for (auto& l : g.video_users_) sort_unique(l);
  for (auto& l : g.user_vloggers_) sort_unique(l);
  for (auto& l : g.vlogger_users_) sort_unique(l);
  for (auto& l : g.vlogger_videos_) sort_unique(l);

  for (std::size_t v = 0; v < n_videos; ++v) {
    if (!g.video_users_[v].empty() && g.publisher_[v] == kNoPublisher) {
      throw GraphError("video " + std::to_string(v) + " has interactions but no publisher");
    }
  }

  g.uv_edge_count_ = count_edges(g.user_videos_);
  g.up_edge_count_ = count_edges(g.user_vloggers_);
  g.pv_edge_count_ = count_edges(g.vlogger_videos_);
  return g;
}

std::uint32_t TripartiteGraph::publisher_of(std::uint32_t v) const {
  if (publisher_[v] == kNoPublisher) {
    throw GraphError("video " + std::to_string(v) + " has no publisher");
  }
  return publisher_[v];
}

std::uint32_t IdRemap::add_or_get(const std::string& raw) {
  auto it = to_dense.find(raw);
  if (it != to_dense.end()) return it->second;
  auto idx = static_cast<std::uint32_t>(to_raw.size());
  to_raw.push_back(raw);
  to_dense.emplace(raw, idx);
  return idx;
}

BuiltGraph build_graph(const std::vector<RawEdge>& user_video,
                       const std::vector<RawEdge>& user_vlogger,
                       const std::vector<RawEdge>& vlogger_video) {
  IdRemap users, videos, vloggers;
  EdgeList uv, up, pv;
  uv.reserve(user_video.size());
  for (const auto& e : user_video) {
    uv.emplace_back(users.add_or_get(e.src), videos.add_or_get(e.dst));
  }
  up.reserve(user_vlogger.size());
  for (const auto& e : user_vlogger) {
    up.emplace_back(users.add_or_get(e.src), vloggers.add_or_get(e.dst));
  }
  pv.reserve(vlogger_video.size());
  for (const auto& e : vlogger_video) {
    pv.emplace_back(vloggers.add_or_get(e.src), videos.add_or_get(e.dst));
  }
  TripartiteGraph g =
      TripartiteGraph::build(users.size(), videos.size(), vloggers.size(), uv, up, pv);
  return BuiltGraph{std::move(g), std::move(users), std::move(videos), std::move(vloggers)};
}

void MetaPathConfig::validate() const {
  if (!(q1 >= 0.0 && q1 <= 1.0)) throw ConfigError("q1 must lie in [0,1]");
  if (!(q2 >= 0.0 && q2 <= 1.0)) throw ConfigError("q2 must lie in [0,1]");
}

namespace {

// Uniform pick from a sorted list, excluding `excluded` if present. Returns
// false when no candidate remains.
bool pick_excluding(const std::vector<std::uint32_t>& list, std::uint32_t excluded,
                    std::mt19937_64& rng, std::uint32_t* out) {
  auto it = std::lower_bound(list.begin(), list.end(), excluded);
  bool contains = it != list.end() && *it == excluded;
  std::size_t m = list.size() - (contains ? 1 : 0);
  if (m == 0) return false;
  std::size_t k = static_cast<std::size_t>(uniform_below(rng, m));
  if (contains && k >= static_cast<std::size_t>(it - list.begin())) ++k;
  *out = list[k];
  return true;
}

std::uint32_t pick_uniform(const std::vector<std::uint32_t>& list, std::mt19937_64& rng) {
  return list[static_cast<std::size_t>(uniform_below(rng, list.size()))];
}

bool coin(double p, std::mt19937_64& rng) {
  return uniform_unit(rng) < p;
}

}  // namespace

VideoViewWalkOutcome sample_video_view_walk(const TripartiteGraph& g, std::uint32_t u, double q1,
                                            double q2, std::mt19937_64& rng) {
  VideoViewWalkOutcome out;
  if (!coin(q1, rng)) return out;
  const auto& vloggers = g.vloggers_of_user(u);
  if (vloggers.empty()) return out;
  std::uint32_t p = pick_uniform(vloggers, rng);
  if (coin(q2, rng)) {
    std::uint32_t other;
    if (!pick_excluding(g.users_of_vlogger(p), u, rng, &other)) return out;
    out.kind = VideoViewWalkOutcome::Kind::kUserEndpoint;
    out.endpoint = other;
  } else {
    const auto& videos = g.videos_of_vlogger(p);
    if (videos.empty()) return out;
    out.kind = VideoViewWalkOutcome::Kind::kVideoEndpoint;
    out.endpoint = pick_uniform(videos, rng);
  }
  return out;
}

VloggerViewWalkOutcome sample_vlogger_view_walk(const TripartiteGraph& g, std::uint32_t u,
                                                double q1, std::mt19937_64& rng) {
  VloggerViewWalkOutcome out;
  if (!coin(q1, rng)) return out;
  const auto& videos = g.videos_of_user(u);
  if (videos.empty()) return out;
  std::uint32_t v = pick_uniform(videos, rng);
  std::uint32_t other;
  if (!pick_excluding(g.users_of_video(v), u, rng, &other)) return out;
  const auto& vloggers = g.vloggers_of_user(u);
  if (vloggers.empty()) return out;  // no vlogger to attribute the edge to
  out.ok = true;
  out.endpoint_user = other;
  out.vlogger = pick_uniform(vloggers, rng);
  return out;
}

MetaPathWalks sample_meta_paths(const TripartiteGraph& g, const MetaPathConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng = make_rng(cfg.seed, RngStream::kWalks);

  std::set<std::pair<std::uint32_t, std::uint32_t>> uu, uv, up;
  for (std::uint32_t u = 0; u < g.n_users(); ++u) {
    for (std::uint32_t w = 0; w < cfg.walks_per_user; ++w) {
      auto o = sample_video_view_walk(g, u, cfg.q1, cfg.q2, rng);
      if (o.kind == VideoViewWalkOutcome::Kind::kUserEndpoint) {
        uu.emplace(std::min(u, o.endpoint), std::max(u, o.endpoint));
      } else if (o.kind == VideoViewWalkOutcome::Kind::kVideoEndpoint) {
        uv.emplace(u, o.endpoint);
      }
    }
    for (std::uint32_t w = 0; w < cfg.vlogger_view_walks_per_user; ++w) {
      auto o = sample_vlogger_view_walk(g, u, cfg.q1, rng);
      if (o.ok) up.emplace(o.endpoint_user, o.vlogger);
    }
  }

  MetaPathWalks walks;
  walks.user_user.assign(uu.begin(), uu.end());
  walks.user_video.assign(uv.begin(), uv.end());
  walks.user_vlogger.assign(up.begin(), up.end());
  return walks;
}

AugmentedNeighborhoods build_augmented_neighborhoods(const TripartiteGraph& g,
                                                     const MetaPathWalks& walks,
                                                     bool uvu_in_video_view) {
  AugmentedNeighborhoods aug;
  aug.user_videos.resize(g.n_users());
  aug.user_users.resize(g.n_users());
  aug.video_users.resize(g.n_videos());
  aug.user_vloggers.resize(g.n_users());
  aug.vlogger_users.resize(g.n_vloggers());

  for (std::uint32_t u = 0; u < g.n_users(); ++u) {
    aug.user_videos[u] = g.videos_of_user(u);
    aug.user_vloggers[u] = g.vloggers_of_user(u);
  }
  for (std::uint32_t v = 0; v < g.n_videos(); ++v) aug.video_users[v] = g.users_of_video(v);
  for (std::uint32_t p = 0; p < g.n_vloggers(); ++p) aug.vlogger_users[p] = g.users_of_vlogger(p);

  for (auto [u, v] : walks.user_video) {
    check_range(u, g.n_users(), "walk user");
    check_range(v, g.n_videos(), "walk video");
    aug.user_videos[u].push_back(v);
    aug.video_users[v].push_back(u);
  }
  if (uvu_in_video_view) {
    for (auto [a, b] : walks.user_user) {
      check_range(a, g.n_users(), "walk user");
      check_range(b, g.n_users(), "walk user");
      aug.user_users[a].push_back(b);
      aug.user_users[b].push_back(a);
    }
  }
  for (auto [u, p] : walks.user_vlogger) {
    check_range(u, g.n_users(), "walk user");
    check_range(p, g.n_vloggers(), "walk vlogger");
    aug.user_vloggers[u].push_back(p);
    aug.vlogger_users[p].push_back(u);
  }

  for (auto& l : aug.user_videos) sort_unique(l);
  for (auto& l : aug.user_users) sort_unique(l);
  for (auto& l : aug.video_users) sort_unique(l);
  for (auto& l : aug.user_vloggers) sort_unique(l);
  for (auto& l : aug.vlogger_users) sort_unique(l);
  return aug;
}

}  // namespace vagnn
