#include "vagnn/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "vagnn/objective.hpp"
#include "vagnn/rng.hpp"
#include "util.hpp"
#include "json.hpp"

using namespace vagnn;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data) x = sample_normal(rng);
  return m;
}

// d=1 tables make score(0, v) equal videos[v], turning ranking into sorting
struct ScalarScorer {
  Matrix users{1, 1}, videos, vloggers{1, 1}, gate{1, 1};
  TripartiteGraph g;
  Scorer scorer;

  explicit ScalarScorer(const std::vector<double>& scores)
      : videos(scores.size(), 1),
        g(TripartiteGraph::build(1, scores.size(), 1, {{0, 0}}, {}, pv(scores.size()))),
        scorer((users(0, 0) = 1.0, fill(scores), users), videos, vloggers, gate, g, false) {}

  static EdgeList pv(std::size_t n) {
    EdgeList e;
    for (std::uint32_t v = 0; v < n; ++v) e.emplace_back(0, v);
    return e;
  }
  const Matrix& fill(const std::vector<double>& scores) {
    for (std::size_t v = 0; v < scores.size(); ++v) videos(v, 0) = scores[v];
    return videos;
  }
};

TEST(Scorer, DotProductWithoutBlending) {
  TripartiteGraph g = TripartiteGraph::build(2, 2, 1, {{0, 0}, {1, 1}}, {}, {{0, 0}, {0, 1}});
  std::mt19937_64 rng = make_rng(1, RngStream::kInit);
  Matrix users = random_matrix(2, 3, rng);
  Matrix videos = random_matrix(2, 3, rng);
  Matrix vloggers = random_matrix(1, 3, rng);
  Matrix gate = random_matrix(3, 3, rng);
  Scorer scorer(users, videos, vloggers, gate, g, false);
  for (std::uint32_t u = 0; u < 2; ++u) {
    for (std::uint32_t v = 0; v < 2; ++v) {
      EXPECT_DOUBLE_EQ(scorer.score(u, v), dot(users.row_span(u), videos.row_span(v)));
    }
  }
  EXPECT_THROW(scorer.score(2, 0), ValidationError);
  EXPECT_THROW(scorer.score(0, 2), ValidationError);
}

TEST(Scorer, BlendsThroughPublisherGate) {
  TripartiteGraph g = TripartiteGraph::build(2, 3, 2, {{0, 0}, {1, 1}, {1, 2}}, {},
                                             {{0, 0}, {0, 1}, {1, 2}});
  std::mt19937_64 rng = make_rng(2, RngStream::kInit);
  Matrix users = random_matrix(2, 4, rng);
  Matrix videos = random_matrix(3, 4, rng);
  Matrix vloggers = random_matrix(2, 4, rng);
  Matrix gate = random_matrix(4, 4, rng);
  Scorer scorer(users, videos, vloggers, gate, g, true);
  for (std::uint32_t u = 0; u < 2; ++u) {
    for (std::uint32_t v = 0; v < 3; ++v) {
      const std::uint32_t p = g.publisher_of(v);
      const double expected = score_user_video(users.row_span(u), videos.row_span(v),
                                               vloggers.row_span(p), gate);
      EXPECT_NEAR(scorer.score(u, v), expected, 1e-12);
    }
  }
}

TEST(Scorer, RejectsMismatchedTables) {
  TripartiteGraph g = TripartiteGraph::build(2, 2, 1, {{0, 0}, {1, 1}}, {}, {{0, 0}, {0, 1}});
  Matrix users(2, 3), videos(2, 3), vloggers(1, 3), gate(3, 3);
  Matrix narrow(2, 2);
  EXPECT_THROW(Scorer(users, narrow, vloggers, gate, g, false), ShapeError);
  Matrix extra(3, 3);
  EXPECT_THROW(Scorer(extra, videos, vloggers, gate, g, false), ShapeError);
  Matrix badgate(2, 3);
  EXPECT_THROW(Scorer(users, videos, vloggers, badgate, g, true), ShapeError);
  EXPECT_NO_THROW(Scorer(users, videos, vloggers, badgate, g, false));
}

TEST(Ranking, MatchesSortOracleOnRandomScores) {
  std::mt19937_64 rng = make_rng(55, RngStream::kSynth);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + uniform_below(rng, 30);
    std::vector<double> scores(n);
    for (double& s : scores) s = sample_normal(rng);
    // duplicated scores exercise the tie rule
    if (n > 6) {
      scores[3] = scores[1];
      scores[5] = scores[1];
    }
    ScalarScorer fix(scores);

    std::vector<std::uint32_t> expected(n);
    for (std::uint32_t v = 0; v < n; ++v) expected[v] = v;
    std::sort(expected.begin(), expected.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return a < b;
    });

    const std::uint32_t target = static_cast<std::uint32_t>(uniform_below(rng, n));
    RankingResult r = rank_for_user(fix.scorer, 0, {}, target);
    EXPECT_EQ(r.order, expected) << "trial " << trial;
    const auto it = std::find(expected.begin(), expected.end(), target);
    EXPECT_EQ(r.target_rank, static_cast<std::size_t>(it - expected.begin()) + 1);
  }
}

TEST(Ranking, ExclusionRemovesCandidates) {
  ScalarScorer fix({5.0, 4.0, 3.0, 2.0, 1.0});
  RankingResult r = rank_for_user(fix.scorer, 0, {0, 1}, 3);
  EXPECT_EQ(r.order, (std::vector<std::uint32_t>{2, 3, 4}));
  EXPECT_EQ(r.target_rank, 2u);
}

TEST(Ranking, LeakageAndEmptyCandidatesAreErrors) {
  ScalarScorer fix({1.0, 2.0, 3.0});
  EXPECT_THROW(rank_for_user(fix.scorer, 0, {1}, 1), ValidationError);
  EXPECT_THROW(rank_for_user(fix.scorer, 0, {0, 1, 2}, 5), ValidationError);
}

TEST(Ranking, AbsentTargetScoresZero) {
  ScalarScorer fix({1.0, 2.0, 3.0});
  RankingResult r = rank_for_user(fix.scorer, 0, {}, UINT32_MAX);
  EXPECT_EQ(r.target_rank, 0u);
  EXPECT_DOUBLE_EQ(recall_at_k(r, 3), 0.0);
  EXPECT_DOUBLE_EQ(ndcg_at_k(r, 3), 0.0);
}

TEST(Metrics, ClosedFormsByRank) {
  RankingResult r;
  r.order = {0, 1, 2, 3};
  r.target_rank = 1;
  EXPECT_DOUBLE_EQ(recall_at_k(r, 1), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_k(r, 1), 1.0);
  r.target_rank = 2;
  EXPECT_DOUBLE_EQ(recall_at_k(r, 1), 0.0);
  EXPECT_DOUBLE_EQ(recall_at_k(r, 2), 1.0);
  EXPECT_NEAR(ndcg_at_k(r, 2), 1.0 / std::log2(3.0), 1e-15);
  r.target_rank = 4;
  EXPECT_DOUBLE_EQ(recall_at_k(r, 3), 0.0);
  EXPECT_DOUBLE_EQ(ndcg_at_k(r, 3), 0.0);
  EXPECT_NEAR(ndcg_at_k(r, 4), 1.0 / std::log2(5.0), 1e-15);
  EXPECT_THROW(recall_at_k(r, 0), ConfigError);
  EXPECT_THROW(ndcg_at_k(r, -1), ConfigError);
}

Dataset small_synth(std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.n_users = 30;
  cfg.n_vloggers = 6;
  cfg.videos_per_vlogger = 8;
  cfg.interactions_per_user = 12;
  cfg.preferred_per_user = 3;
  cfg.seed = seed;
  return generate_synthetic(cfg);
}

TEST(Evaluate, MatchesPerUserProtocolOracle) {
  Dataset data = small_synth(3);
  TripartiteGraph g = data.train_graph();
  std::mt19937_64 rng = make_rng(8, RngStream::kInit);
  Matrix users = random_matrix(data.n_users(), 4, rng);
  Matrix videos = random_matrix(data.n_videos(), 4, rng);
  Matrix vloggers = random_matrix(data.n_vloggers(), 4, rng);
  Matrix gate = random_matrix(4, 4, rng);
  Scorer scorer(users, videos, vloggers, gate, g, true);

  const std::vector<int> ks{1, 5, 10};
  for (Split split : {Split::kVal, Split::kTest}) {
    MetricsReport got = evaluate(scorer, data, split, ks);

    std::vector<double> recall(ks.size(), 0.0), ndcg(ks.size(), 0.0);
    std::size_t evaluated = 0;
    for (std::uint32_t u = 0; u < data.n_users(); ++u) {
      std::int64_t target = -1;
      std::set<std::uint32_t> excluded;
      for (const Interaction& it : data.interactions) {
        if (it.user != u) continue;
        if (it.split == Split::kTrain ||
            (split == Split::kTest && it.split == Split::kVal)) {
          excluded.insert(it.video);
        } else if (it.split == split) {
          target = it.video;
        }
      }
      if (target < 0) continue;
      ++evaluated;
      std::vector<std::pair<double, std::uint32_t>> scored;
      for (std::uint32_t v = 0; v < data.n_videos(); ++v) {
        if (!excluded.count(v)) scored.emplace_back(scorer.score(u, v), v);
      }
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      std::size_t rank = 0;
      for (std::size_t i = 0; i < scored.size(); ++i) {
        if (scored[i].second == static_cast<std::uint32_t>(target)) rank = i + 1;
      }
      ASSERT_GE(rank, 1u);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (rank <= static_cast<std::size_t>(ks[i])) {
          recall[i] += 1.0;
          ndcg[i] += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
        }
      }
    }
    ASSERT_GT(evaluated, 0u);
    EXPECT_EQ(got.evaluated_users, evaluated);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      EXPECT_NEAR(got.recall[i], recall[i] / evaluated, 1e-12) << split_long_name(split);
      EXPECT_NEAR(got.ndcg[i], ndcg[i] / evaluated, 1e-12) << split_long_name(split);
    }
  }
}

TEST(Evaluate, MonotoneInKAndNdcgBounded) {
  Dataset data = small_synth(4);
  TripartiteGraph g = data.train_graph();
  std::mt19937_64 rng = make_rng(9, RngStream::kInit);
  Matrix users = random_matrix(data.n_users(), 4, rng);
  Matrix videos = random_matrix(data.n_videos(), 4, rng);
  Matrix vloggers = random_matrix(data.n_vloggers(), 4, rng);
  Matrix gate = random_matrix(4, 4, rng);
  Scorer scorer(users, videos, vloggers, gate, g, true);

  MetricsReport r = evaluate(scorer, data, Split::kTest, {1, 2, 5, 10, 20, 48});
  for (std::size_t i = 1; i < r.ks.size(); ++i) {
    EXPECT_GE(r.recall[i], r.recall[i - 1]);
    EXPECT_GE(r.ndcg[i], r.ndcg[i - 1]);
  }
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    EXPECT_LE(r.ndcg[i], r.recall[i] + 1e-15);
    EXPECT_GE(r.recall[i], 0.0);
    EXPECT_LE(r.recall[i], 1.0);
  }
  // every video is reachable at K = catalog size
  EXPECT_DOUBLE_EQ(r.recall.back(), 1.0);
}

TEST(Evaluate, ValidatesSplitAndKs) {
  Dataset data = small_synth(5);
  TripartiteGraph g = data.train_graph();
  Matrix users(data.n_users(), 2), videos(data.n_videos(), 2), vloggers(data.n_vloggers(), 2);
  Matrix gate(2, 2);
  Scorer scorer(users, videos, vloggers, gate, g, false);
  EXPECT_THROW(evaluate(scorer, data, Split::kTrain, {10}), ConfigError);
  EXPECT_THROW(evaluate(scorer, data, Split::kTest, {}), ConfigError);
  EXPECT_THROW(evaluate(scorer, data, Split::kTest, {10, 0}), ConfigError);
}

Dataset handmade_dataset() {
  Dataset d;
  d.user_ids = {"u0"};
  d.video_ids = {"v0", "v1", "v2"};
  d.vlogger_ids = {"p0"};
  d.pv_edges = {{0, 0}, {0, 1}, {0, 2}};
  return d;
}

TEST(Evaluate, RejectsMultipleHeldOutPerUser) {
  Dataset d = handmade_dataset();
  d.interactions = {Interaction{0, 0, 1, 0, Split::kTrain}, Interaction{0, 1, 2, 1, Split::kTest},
                    Interaction{0, 2, 3, 2, Split::kTest}};
  TripartiteGraph g = d.train_graph();
  Matrix users(1, 2), videos(3, 2), vloggers(1, 2), gate(2, 2);
  Scorer scorer(users, videos, vloggers, gate, g, false);
  EXPECT_THROW(evaluate(scorer, d, Split::kTest, {1}), ValidationError);
}

TEST(Evaluate, RejectsWhenNoUserHasTarget) {
  Dataset d = handmade_dataset();
  d.interactions = {Interaction{0, 0, 1, 0, Split::kTrain}, Interaction{0, 1, 2, 1, Split::kTrain}};
  TripartiteGraph g = d.train_graph();
  Matrix users(1, 2), videos(3, 2), vloggers(1, 2), gate(2, 2);
  Scorer scorer(users, videos, vloggers, gate, g, false);
  EXPECT_THROW(evaluate(scorer, d, Split::kVal, {1}), ValidationError);
}

TEST(Reports, TextFormatIsStable) {
  MetricsReport r;
  r.split = "test";
  r.ks = {10, 20};
  r.recall = {0.25, 0.5};
  r.ndcg = {0.125, 0.25};
  r.evaluated_users = 42;
  r.seed = 7;
  r.config_digest = "00000000deadbeef";
  EXPECT_EQ(format_metrics_text(r),
            "split\ttest\n"
            "evaluated_users\t42\n"
            "seed\t7\n"
            "config_digest\t00000000deadbeef\n"
            "recall@10\t0.2500000000\n"
            "ndcg@10\t0.1250000000\n"
            "recall@20\t0.5000000000\n"
            "ndcg@20\t0.2500000000\n");
}

TEST(Reports, JsonFormatParsesBack) {
  MetricsReport r;
  r.split = "validation";
  r.ks = {10};
  r.recall = {0.3};
  r.ndcg = {0.2};
  r.evaluated_users = 9;
  r.seed = 123;
  r.config_digest = "abc";
  nlohmann::json j = nlohmann::json::parse(format_metrics_json(r));
  EXPECT_EQ(j["split"], "validation");
  EXPECT_EQ(j["evaluated_users"], 9);
  EXPECT_EQ(j["seed"], 123);
  EXPECT_EQ(j["config_digest"], "abc");
  EXPECT_DOUBLE_EQ(j["metrics"]["recall@10"].get<double>(), 0.3);
  EXPECT_DOUBLE_EQ(j["metrics"]["ndcg@10"].get<double>(), 0.2);
}

}  // namespace
