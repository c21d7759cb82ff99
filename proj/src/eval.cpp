#include "vagnn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "vagnn/errors.hpp"
#include "vagnn/objective.hpp"

namespace vagnn {

Scorer::Scorer(const Matrix& users, const Matrix& videos, const Matrix& vloggers,
               const Matrix& gate, const TripartiteGraph& g, bool gate_blending)
    : users_(&users), videos_(&videos), vloggers_(&vloggers), gate_blending_(gate_blending) {
  if (users.cols != videos.cols || users.cols != vloggers.cols) {
    throw ShapeError("Scorer: entity tables differ in width");
  }
  if (users.rows != g.n_users() || videos.rows != g.n_videos() || vloggers.rows != g.n_vloggers()) {
    throw ShapeError("Scorer: table row counts do not match the graph");
  }
  if (!gate_blending_) return;
  if (gate.rows != users.cols || gate.cols != users.cols) {
    throw ShapeError("Scorer: gate matrix shape does not match embedding width");
  }
  publisher_.resize(g.n_videos(), kNoPublisher);
  gate_w_.resize(g.n_videos(), 0.0);
  for (std::uint32_t v = 0; v < g.n_videos(); ++v) {
    if (!g.has_publisher(v)) continue;
    publisher_[v] = g.publisher_of(v);
    gate_w_[v] = gate_weight(videos.row_span(v), gate, vloggers.row_span(publisher_[v]));
  }
}

double Scorer::score(std::uint32_t user, std::uint32_t video) const {
  if (user >= users_->rows || video >= videos_->rows) {
    throw ValidationError("score: entity index out of range");
  }
  const auto e_u = users_->row_span(user);
  const auto e_v = videos_->row_span(video);
  if (!gate_blending_) return dot(e_u, e_v);
  const std::uint32_t p = publisher_[video];
  if (p == kNoPublisher) {
    throw GraphError("score: video " + std::to_string(video) + " has no publisher");
  }
  const double w = gate_w_[video];
  return w * dot(e_u, e_v) + (1.0 - w) * dot(e_u, vloggers_->row_span(p));
}

RankingResult rank_for_user(const Scorer& scorer, std::uint32_t user,
                            const std::vector<std::uint32_t>& exclusion, std::uint32_t target) {
  if (std::binary_search(exclusion.begin(), exclusion.end(), target)) {
    throw ValidationError("rank_for_user: target video is in the exclusion set (split leakage)");
  }
  RankingResult out;
  out.user = user;
  const std::size_t n = scorer.n_videos();
  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(n - exclusion.size());
  std::size_t ex = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    while (ex < exclusion.size() && exclusion[ex] < v) ++ex;
    if (ex < exclusion.size() && exclusion[ex] == v) continue;
    scored.emplace_back(scorer.score(user, v), v);
  }
  if (scored.empty()) throw ValidationError("rank_for_user: no candidate videos");
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  out.order.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    out.order.push_back(scored[i].second);
    if (scored[i].second == target) out.target_rank = i + 1;
  }
  return out;
}

double recall_at_k(const RankingResult& r, int k) {
  if (k < 1) throw ConfigError("recall_at_k: k must be >= 1");
  return (r.target_rank >= 1 && r.target_rank <= static_cast<std::size_t>(k)) ? 1.0 : 0.0;
}

double ndcg_at_k(const RankingResult& r, int k) {
  if (k < 1) throw ConfigError("ndcg_at_k: k must be >= 1");
  if (r.target_rank < 1 || r.target_rank > static_cast<std::size_t>(k)) return 0.0;
  return 1.0 / std::log2(static_cast<double>(r.target_rank) + 1.0);
}

const char* split_long_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "validation";
    case Split::kTest: return "test";
  }
  throw ValidationError("unknown split value");
}

MetricsReport evaluate(const Scorer& scorer, const Dataset& data, Split split,
                       const std::vector<int>& ks) {
  if (split == Split::kTrain) throw ConfigError("evaluate: split must be validation or test");
  if (ks.empty()) throw ConfigError("evaluate: no K values");
  for (int k : ks) {
    if (k < 1) throw ConfigError("evaluate: K values must be >= 1");
  }

  std::vector<std::vector<std::uint32_t>> exclusion(data.n_users());
  std::vector<std::int64_t> target(data.n_users(), -1);
  for (const Interaction& it : data.interactions) {
    const bool excluded =
        it.split == Split::kTrain || (split == Split::kTest && it.split == Split::kVal);
    if (excluded) {
      exclusion[it.user].push_back(it.video);
    } else if (it.split == split) {
      if (target[it.user] >= 0) {
        throw ValidationError("evaluate: user " + std::to_string(it.user) +
                              " has multiple held-out interactions");
      }
      target[it.user] = it.video;
    }
  }

  MetricsReport report;
  report.split = split_long_name(split);
  report.ks = ks;
  report.recall.assign(ks.size(), 0.0);
  report.ndcg.assign(ks.size(), 0.0);
  for (std::uint32_t u = 0; u < data.n_users(); ++u) {
    if (target[u] < 0) continue;
    std::sort(exclusion[u].begin(), exclusion[u].end());
    const RankingResult r =
        rank_for_user(scorer, u, exclusion[u], static_cast<std::uint32_t>(target[u]));
    for (std::size_t i = 0; i < ks.size(); ++i) {
      report.recall[i] += recall_at_k(r, ks[i]);
      report.ndcg[i] += ndcg_at_k(r, ks[i]);
    }
    ++report.evaluated_users;
  }
  if (report.evaluated_users == 0) {
    throw ValidationError(std::string("evaluate: no evaluable users for split ") +
                          split_long_name(split));
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    report.recall[i] /= static_cast<double>(report.evaluated_users);
    report.ndcg[i] /= static_cast<double>(report.evaluated_users);
  }
  return report;
}

namespace {

std::string fmt_metric(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10f", x);
  return buf;
}

}  // namespace

std::string format_metrics_text(const MetricsReport& r) {
  std::ostringstream out;
  out << "split\t" << r.split << '\n';
  out << "evaluated_users\t" << r.evaluated_users << '\n';
  out << "seed\t" << r.seed << '\n';
  out << "config_digest\t" << r.config_digest << '\n';
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    out << "recall@" << r.ks[i] << '\t' << fmt_metric(r.recall[i]) << '\n';
    out << "ndcg@" << r.ks[i] << '\t' << fmt_metric(r.ndcg[i]) << '\n';
  }
  return out.str();
}

std::string format_metrics_json(const MetricsReport& r) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"split\": \"" << r.split << "\",\n";
  out << "  \"evaluated_users\": " << r.evaluated_users << ",\n";
  out << "  \"seed\": " << r.seed << ",\n";
  out << "  \"config_digest\": \"" << r.config_digest << "\",\n";
  out << "  \"metrics\": {";
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    if (i) out << ",";
    out << "\n    \"recall@" << r.ks[i] << "\": " << fmt_metric(r.recall[i]) << ",";
    out << "\n    \"ndcg@" << r.ks[i] << "\": " << fmt_metric(r.ndcg[i]);
  }
  out << "\n  }\n}\n";
  return out.str();
}

}  // namespace vagnn
