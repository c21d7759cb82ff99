#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vagnn/data.hpp"
#include "vagnn/graph.hpp"
#include "vagnn/matrix.hpp"

namespace vagnn {

// Scores (user, video) pairs from final 2d-wide tables. Per-video gate weights
// are precomputed once since they do not depend on the user.
class Scorer {
 public:
  Scorer(const Matrix& users, const Matrix& videos, const Matrix& vloggers, const Matrix& gate,
         const TripartiteGraph& g, bool gate_blending);

  double score(std::uint32_t user, std::uint32_t video) const;
  std::size_t n_videos() const { return videos_->rows; }

 private:
  const Matrix* users_;
  const Matrix* videos_;
  const Matrix* vloggers_;
  bool gate_blending_;
  std::vector<std::uint32_t> publisher_;
  std::vector<double> gate_w_;
};

struct RankingResult {
  std::uint32_t user = 0;
  std::vector<std::uint32_t> order;  // descending score, ties by ascending index
  std::size_t target_rank = 0;       // 1-based; 0 = miss
};

RankingResult rank_for_user(const Scorer& scorer, std::uint32_t user,
                            const std::vector<std::uint32_t>& exclusion, std::uint32_t target);

double recall_at_k(const RankingResult& r, int k);
double ndcg_at_k(const RankingResult& r, int k);

struct MetricsReport {
  std::string split;
  std::vector<int> ks;
  std::vector<double> recall;
  std::vector<double> ndcg;
  std::size_t evaluated_users = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

const char* split_long_name(Split s);

MetricsReport evaluate(const Scorer& scorer, const Dataset& data, Split split,
                       const std::vector<int>& ks);

std::string format_metrics_text(const MetricsReport& r);
std::string format_metrics_json(const MetricsReport& r);

}  // namespace vagnn
