#include "vagnn/data.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vagnn/rng.hpp"
#include "util.hpp"

using namespace vagnn;

namespace {

constexpr const char* kHeader =
    "user_id\tvideo_id\tvlogger_id\ttimestamp\tcomment_post\tcomment_read\tlike\tshare\tfollow\t"
    "homepage_enter\twatch_time\tplay_progress\n";

std::string row(const std::string& u, const std::string& v, const std::string& p,
                std::int64_t ts, const std::string& flags, double watch, double prog) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%lld\t%s\t%.6g\t%.6g\n", static_cast<long long>(ts),
                flags.c_str(), watch, prog);
  return u + "\t" + v + "\t" + p + "\t" + buf;
}

const std::string kNoFlags = "0\t0\t0\t0\t0\t0";

TEST(RawLog, ParsesColumnsByHeaderName) {
  testutil::TempDir dir;
  const std::string path = dir / "log.tsv";
  std::string body =
      "extra\tuser_id\tvideo_id\tvlogger_id\ttimestamp\tlike\twatch_time\tplay_progress\n";
  body += "x\tu1\tv1\tp1\t100\t1\t12.5\t0.4\n";
  body += "y\tu2\tv2\tp2\t-5\t0\t0\t2.25\n";
  testutil::write_file(path, body);
  std::vector<RawBehaviorRecord> records = read_raw_log(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].user, "u1");
  EXPECT_EQ(records[0].video, "v1");
  EXPECT_EQ(records[0].vlogger, "p1");
  EXPECT_EQ(records[0].timestamp, 100);
  EXPECT_TRUE(records[0].like);
  EXPECT_FALSE(records[0].follow);
  EXPECT_DOUBLE_EQ(records[0].watch_time, 12.5);
  EXPECT_DOUBLE_EQ(records[0].play_progress, 0.4);
  EXPECT_EQ(records[0].input_seq, 0u);
  EXPECT_EQ(records[1].timestamp, -5);
  EXPECT_EQ(records[1].input_seq, 1u);
}

TEST(RawLog, HandlesCrlfAndBlankLines) {
  testutil::TempDir dir;
  const std::string path = dir / "log.tsv";
  std::string body = "user_id\tvideo_id\tvlogger_id\ttimestamp\r\n";
  body += "u1\tv1\tp1\t5\r\n";
  body += "\r\n";
  body += "u2\tv2\tp2\t6\n";
  testutil::write_file(path, body);
  std::vector<RawBehaviorRecord> records = read_raw_log(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].user, "u1");
  EXPECT_EQ(records[1].timestamp, 6);
}

TEST(RawLog, ErrorsNameTheLine) {
  testutil::TempDir dir;
  const std::string path = dir / "log.tsv";
  testutil::write_file(path, std::string(kHeader) +
                                 row("u1", "v1", "p1", 1, kNoFlags, 0.0, 0.0) +
                                 "u2\tv2\tp2\tnotanumber\t0\t0\t0\t0\t0\t0\t0\t0\n");
  try {
    read_raw_log(path);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("timestamp"), std::string::npos);
  }
}

TEST(RawLog, RejectsMalformedRows) {
  testutil::TempDir dir;
  auto expect_reject = [&](const std::string& name, const std::string& body) {
    const std::string path = dir / name;
    testutil::write_file(path, body);
    EXPECT_THROW(read_raw_log(path), ValidationError) << name;
  };
  expect_reject("missing_col.tsv", "user_id\tvideo_id\ttimestamp\nu1\tv1\t1\n");
  expect_reject("short_row.tsv", std::string(kHeader) + "u1\tv1\tp1\t1\t0\t0\n");
  expect_reject("bad_flag.tsv",
                std::string(kHeader) + "u1\tv1\tp1\t1\t2\t0\t0\t0\t0\t0\t0\t0\n");
  expect_reject("neg_watch.tsv",
                std::string(kHeader) + "u1\tv1\tp1\t1\t0\t0\t0\t0\t0\t0\t-1\t0\n");
  expect_reject("neg_prog.tsv",
                std::string(kHeader) + "u1\tv1\tp1\t1\t0\t0\t0\t0\t0\t0\t0\t-0.1\n");
  expect_reject("empty_id.tsv", std::string(kHeader) + "\tv1\tp1\t1\t0\t0\t0\t0\t0\t0\t0\t0\n");
  expect_reject("empty.tsv", "");
  EXPECT_THROW(read_raw_log(dir / "does_not_exist.tsv"), IoError);
}

TEST(Splits, NamesRoundTrip) {
  EXPECT_EQ(parse_split("train"), Split::kTrain);
  EXPECT_EQ(parse_split("val"), Split::kVal);
  EXPECT_EQ(parse_split("validation"), Split::kVal);
  EXPECT_EQ(parse_split("test"), Split::kTest);
  EXPECT_STREQ(split_name(Split::kVal), "val");
  EXPECT_THROW(parse_split("holdout"), ValidationError);
}

RawBehaviorRecord rec(const std::string& u, const std::string& v, const std::string& p,
                      std::int64_t ts, double watch, double prog) {
  RawBehaviorRecord r;
  r.user = u;
  r.video = v;
  r.vlogger = p;
  r.timestamp = ts;
  r.watch_time = watch;
  r.play_progress = prog;
  return r;
}

TEST(Positives, ThresholdsAreStrict) {
  PositiveRuleConfig rules;
  std::vector<RawBehaviorRecord> records{
      rec("u1", "v1", "p1", 1, 0.0, 1.5),       // at progress threshold: not positive
      rec("u1", "v2", "p1", 2, 0.0, 1.5001),    // above: positive
      rec("u1", "v3", "p1", 3, 60.0, 0.0),      // at time threshold: not positive
      rec("u1", "v4", "p1", 4, 60.0001, 0.0),   // above: positive
      rec("u1", "v5", "p1", 5, 0.0, 0.0),       // nothing
  };
  records.push_back(rec("u1", "v6", "p1", 6, 0.0, 0.0));
  records.back().comment_read = true;  // explicit signal alone suffices
  for (std::size_t i = 0; i < records.size(); ++i) records[i].input_seq = i;

  std::vector<RawPositive> got = derive_video_positives(records, rules);
  std::set<std::string> videos;
  for (const RawPositive& p : got) videos.insert(p.video);
  EXPECT_EQ(videos, (std::set<std::string>{"v2", "v4", "v6"}));
}

TEST(Positives, EachExplicitFlagCounts) {
  PositiveRuleConfig rules;
  const char* names[] = {"comment_post", "comment_read", "like", "share", "follow",
                         "homepage_enter"};
  for (int i = 0; i < 6; ++i) {
    RawBehaviorRecord r = rec("u1", "v1", "p1", 1, 0.0, 0.0);
    switch (i) {
      case 0: r.comment_post = true; break;
      case 1: r.comment_read = true; break;
      case 2: r.like = true; break;
      case 3: r.share = true; break;
      case 4: r.follow = true; break;
      case 5: r.homepage_enter = true; break;
    }
    EXPECT_EQ(derive_video_positives({r}, rules).size(), 1u) << names[i];
  }
}

TEST(Positives, DuplicatesKeepEarliestTimestampThenSeq) {
  PositiveRuleConfig rules;
  std::vector<RawBehaviorRecord> records{
      rec("u1", "v1", "p1", 900, 0.0, 2.0),
      rec("u1", "v1", "p1", 100, 0.0, 2.0),
      rec("u1", "v1", "p1", 100, 0.0, 2.0),
      rec("u2", "v1", "p1", 50, 0.0, 2.0),
  };
  for (std::size_t i = 0; i < records.size(); ++i) records[i].input_seq = i;
  std::vector<RawPositive> got = derive_video_positives(records, rules);
  ASSERT_EQ(got.size(), 2u);
  const RawPositive& u1 = got[0].user == "u1" ? got[0] : got[1];
  EXPECT_EQ(u1.timestamp, 100);
  EXPECT_EQ(u1.input_seq, 1u);
}

TEST(Publishing, ConflictingPublisherIsRejected) {
  std::vector<RawBehaviorRecord> ok{rec("u1", "v1", "p1", 1, 0, 0),
                                    rec("u2", "v1", "p1", 2, 0, 0),
                                    rec("u1", "v2", "p2", 3, 0, 0)};
  RawPublishing pub = derive_publishing(ok);
  EXPECT_EQ(pub.edges.size(), 2u);
  std::vector<RawBehaviorRecord> bad{rec("u1", "v1", "p1", 1, 0, 0),
                                     rec("u2", "v1", "p2", 2, 0, 0)};
  EXPECT_THROW(derive_publishing(bad), GraphError);
}

// One-entity-at-a-time replay of the degree rules; the production filter must
// land on the same fixpoint.
struct ReplayResult {
  std::set<std::string> users, videos, vloggers;
};

ReplayResult replay_filter(const std::vector<RawPositive>& positives, const RawPublishing& pub,
                           const PositiveRuleConfig& rules) {
  std::map<std::string, std::string> publisher;
  std::map<std::string, std::set<std::string>> videos_of;
  ReplayResult live;
  for (const auto& [video, vlogger] : pub.edges) {
    publisher[video] = vlogger;
    videos_of[vlogger].insert(video);
    live.videos.insert(video);
    live.vloggers.insert(vlogger);
  }
  for (const RawPositive& p : positives) live.users.insert(p.user);

  for (;;) {
    std::map<std::string, int> user_cnt, video_cnt;
    for (const RawPositive& p : positives) {
      if (live.users.count(p.user) && live.videos.count(p.video)) {
        ++user_cnt[p.user];
        ++video_cnt[p.video];
      }
    }
    bool changed = false;
    for (const std::string& u : live.users) {
      if (user_cnt[u] < rules.min_user_interactions) {
        live.users.erase(u);
        changed = true;
        break;
      }
    }
    if (changed) continue;
    for (const std::string& v : live.videos) {
      if (video_cnt[v] < rules.min_video_interactions) {
        live.videos.erase(v);
        changed = true;
        break;
      }
    }
    if (changed) continue;
    for (const std::string& p : live.vloggers) {
      int n = 0;
      for (const std::string& v : videos_of[p]) n += live.videos.count(v);
      if (n < rules.min_vlogger_videos) {
        live.vloggers.erase(p);
        for (const std::string& v : videos_of[p]) live.videos.erase(v);
        changed = true;
        break;
      }
    }
    if (!changed) break;
  }
  return live;
}

ReplayResult surviving_sets(const FilteredData& filtered) {
  ReplayResult out;
  for (const RawPositive& p : filtered.positives) out.users.insert(p.user);
  for (const auto& [video, vlogger] : filtered.publishing.edges) {
    out.videos.insert(video);
    out.vloggers.insert(vlogger);
  }
  return out;
}

TEST(Filter, MatchesOneAtATimeReplayOnRandomInstances) {
  PositiveRuleConfig rules;
  rules.min_user_interactions = 3;
  rules.min_video_interactions = 2;
  rules.min_vlogger_videos = 2;
  std::mt19937_64 rng = make_rng(404, RngStream::kSynth);
  int nonempty = 0;
  for (int trial = 0; trial < 30; ++trial) {
    RawPublishing pub;
    const std::size_t n_vloggers = 3 + uniform_below(rng, 3);
    std::vector<std::string> videos;
    for (std::size_t p = 0; p < n_vloggers; ++p) {
      const std::size_t k = 2 + uniform_below(rng, 3);
      for (std::size_t j = 0; j < k; ++j) {
        std::string vid = "v" + std::to_string(p) + "_" + std::to_string(j);
        pub.edges.emplace_back(vid, "p" + std::to_string(p));
        videos.push_back(vid);
      }
    }
    std::vector<RawPositive> positives;
    const std::size_t n_users = 6 + uniform_below(rng, 6);
    std::uint64_t seq = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
      std::set<std::string> seen;
      const std::size_t k = 1 + uniform_below(rng, 6);
      while (seen.size() < std::min(k, videos.size())) {
        seen.insert(videos[uniform_below(rng, videos.size())]);
      }
      for (const std::string& v : seen) {
        positives.push_back(RawPositive{"u" + std::to_string(u), v,
                                        static_cast<std::int64_t>(seq), seq});
        ++seq;
      }
    }

    ReplayResult expected = replay_filter(positives, pub, rules);
    if (expected.users.empty() || expected.videos.empty()) {
      EXPECT_THROW(filter_graph(positives, pub, rules), ValidationError) << "trial " << trial;
      continue;
    }
    ++nonempty;
    FilteredData got = filter_graph(positives, pub, rules);
    ReplayResult sets = surviving_sets(got);
    EXPECT_EQ(sets.users, expected.users) << "trial " << trial;
    EXPECT_EQ(sets.videos, expected.videos) << "trial " << trial;
    EXPECT_EQ(sets.vloggers, expected.vloggers) << "trial " << trial;
    for (const RawPositive& p : got.positives) {
      EXPECT_TRUE(expected.users.count(p.user));
      EXPECT_TRUE(expected.videos.count(p.video));
    }
  }
  EXPECT_GT(nonempty, 5);
}

TEST(Filter, CascadeRemovalChains) {
  PositiveRuleConfig rules;
  rules.min_user_interactions = 2;
  rules.min_video_interactions = 2;
  rules.min_vlogger_videos = 2;

  // va1, va2 (vlogger a) are solid: 2 users each. vb1 depends on u3, whose
  // other interaction vb2 has only one watcher, so u3's degree collapses and
  // takes vlogger b with it.
  RawPublishing pub;
  pub.edges = {{"va1", "a"}, {"va2", "a"}, {"vb1", "b"}, {"vb2", "b"}};
  std::vector<RawPositive> positives;
  std::uint64_t seq = 0;
  auto add = [&](const std::string& u, const std::string& v) {
    positives.push_back(RawPositive{u, v, static_cast<std::int64_t>(seq), seq});
    ++seq;
  };
  add("u1", "va1");
  add("u1", "va2");
  add("u2", "va1");
  add("u2", "va2");
  add("u3", "vb1");
  add("u3", "vb2");
  add("u1", "vb1");

  FilteredData got = filter_graph(positives, pub, rules);
  ReplayResult sets = surviving_sets(got);
  EXPECT_EQ(sets.users, (std::set<std::string>{"u1", "u2"}));
  EXPECT_EQ(sets.videos, (std::set<std::string>{"va1", "va2"}));
  EXPECT_EQ(sets.vloggers, (std::set<std::string>{"a"}));

  ReplayResult expected = replay_filter(positives, pub, rules);
  EXPECT_EQ(sets.users, expected.users);
  EXPECT_EQ(sets.videos, expected.videos);
  EXPECT_EQ(sets.vloggers, expected.vloggers);
}

TEST(Filter, RejectsUnpublishedOrEmptyInput) {
  PositiveRuleConfig rules;
  RawPublishing pub;
  pub.edges = {{"v1", "p1"}};
  EXPECT_THROW(filter_graph({}, pub, rules), ValidationError);
  std::vector<RawPositive> orphan{RawPositive{"u1", "vX", 1, 0}};
  EXPECT_THROW(filter_graph(orphan, pub, rules), GraphError);
  std::vector<RawPositive> sparse{RawPositive{"u1", "v1", 1, 0}};
  EXPECT_THROW(filter_graph(sparse, pub, rules), ValidationError);
}

FilteredData tiny_filtered() {
  FilteredData f;
  std::uint64_t seq = 0;
  auto add = [&](const std::string& u, const std::string& v) {
    f.positives.push_back(RawPositive{u, v, static_cast<std::int64_t>(seq), seq});
    ++seq;
  };
  add("u1", "va1");
  add("u1", "va2");
  add("u1", "va3");
  add("u2", "va1");
  add("u2", "vb1");
  f.publishing.edges = {{"va1", "a"}, {"va2", "a"}, {"va3", "a"}, {"vb1", "b"}};
  return f;
}

TEST(VloggerPositives, ExplicitFollowAndHomepageCount) {
  PositiveRuleConfig rules;
  rules.uvlogger_min_interactions = 1;
  rules.uvlogger_min_videos = 99;  // disable the distinct-path rule
  FilteredData f = tiny_filtered();

  RawBehaviorRecord follow = rec("u2", "vX", "a", 10, 0, 0);
  follow.follow = true;
  RawBehaviorRecord home = rec("u1", "vY", "b", 11, 0, 0);
  home.homepage_enter = true;
  RawBehaviorRecord dead_user = rec("uZ", "v", "a", 12, 0, 0);
  dead_user.follow = true;
  RawBehaviorRecord dead_vlogger = rec("u1", "v", "pZ", 13, 0, 0);
  dead_vlogger.follow = true;
  RawBehaviorRecord plain = rec("u1", "va1", "a", 14, 500.0, 3.0);  // watched, not followed

  auto got = derive_vlogger_positives({follow, home, dead_user, dead_vlogger, plain}, f, rules);
  std::set<std::pair<std::string, std::string>> pairs(got.begin(), got.end());
  EXPECT_EQ(pairs, (std::set<std::pair<std::string, std::string>>{{"u2", "a"}, {"u1", "b"}}));
}

TEST(VloggerPositives, DistinctVideoPathIsStrict) {
  PositiveRuleConfig rules;
  rules.uvlogger_min_interactions = 1;
  rules.uvlogger_min_videos = 2;
  FilteredData f = tiny_filtered();
  // u1 watched 3 distinct videos of vlogger a (strictly more than 2);
  // u2 watched 1 of a and 1 of b (not more than 2)
  auto got = derive_vlogger_positives({}, f, rules);
  std::set<std::pair<std::string, std::string>> pairs(got.begin(), got.end());
  EXPECT_EQ(pairs, (std::set<std::pair<std::string, std::string>>{{"u1", "a"}}));

  rules.uvlogger_min_videos = 3;
  EXPECT_TRUE(derive_vlogger_positives({}, f, rules).empty());
}

TEST(VloggerPositives, DegreeFilterIteratesToFixpoint) {
  PositiveRuleConfig rules;
  rules.uvlogger_min_interactions = 2;
  rules.uvlogger_min_videos = 99;
  FilteredData f = tiny_filtered();
  f.publishing.edges.emplace_back("vc1", "c");

  // u1 follows a and c, u2 follows a only; dropping u2 starves a, which in
  // turn drops u1 below two vloggers, emptying the set
  auto mk = [&](const std::string& u, const std::string& p) {
    RawBehaviorRecord r = rec(u, "vX", p, 1, 0, 0);
    r.follow = true;
    return r;
  };
  auto got = derive_vlogger_positives({mk("u1", "a"), mk("u1", "c"), mk("u2", "a")}, f, rules);
  EXPECT_TRUE(got.empty());

  // adding u2 -> c stabilizes every degree at exactly two
  auto got2 = derive_vlogger_positives(
      {mk("u1", "a"), mk("u1", "c"), mk("u2", "a"), mk("u2", "c")}, f, rules);
  EXPECT_EQ(got2.size(), 4u);
}

TEST(LeaveOneOut, LatestIsTestSecondLatestIsVal) {
  std::vector<Interaction> its;
  auto add = [&](std::uint32_t u, std::uint32_t v, std::int64_t ts, std::uint64_t seq) {
    its.push_back(Interaction{u, v, ts, seq, Split::kTrain});
  };
  add(0, 0, 50, 0);
  add(0, 1, 10, 1);
  add(0, 2, 99, 2);
  add(0, 3, 20, 3);
  add(1, 4, 5, 4);  // user 1 has only two interactions: both stay train
  add(1, 5, 6, 5);
  leave_one_out_split(its);
  EXPECT_EQ(its[2].split, Split::kTest);   // ts 99
  EXPECT_EQ(its[0].split, Split::kVal);    // ts 50
  EXPECT_EQ(its[1].split, Split::kTrain);
  EXPECT_EQ(its[3].split, Split::kTrain);
  EXPECT_EQ(its[4].split, Split::kTrain);
  EXPECT_EQ(its[5].split, Split::kTrain);
}

TEST(LeaveOneOut, TimestampTiesBreakByInputSeq) {
  std::vector<Interaction> its;
  for (std::uint64_t seq : {3u, 1u, 2u}) {
    its.push_back(Interaction{0, static_cast<std::uint32_t>(seq), 7, seq, Split::kTrain});
  }
  leave_one_out_split(its);
  EXPECT_EQ(its[0].split, Split::kTest);   // seq 3: latest
  EXPECT_EQ(its[2].split, Split::kVal);    // seq 2
  EXPECT_EQ(its[1].split, Split::kTrain);  // seq 1
}

TEST(MakeDataset, IndicesFollowLexicographicRawIds) {
  FilteredData f;
  std::uint64_t seq = 0;
  for (const char* u : {"zeta", "alpha", "mid"}) {
    for (int k = 0; k < 3; ++k) {
      f.positives.push_back(RawPositive{u, "v" + std::to_string(k), k, seq++});
    }
  }
  f.publishing.edges = {{"v2", "pz"}, {"v0", "pa"}, {"v1", "pa"}};
  std::sort(f.positives.begin(), f.positives.end(), [](const RawPositive& a, const RawPositive& b) {
    return std::tie(a.user, a.video) < std::tie(b.user, b.video);
  });
  Dataset data = make_dataset(f, {{"zeta", "pa"}, {"alpha", "pz"}});
  EXPECT_EQ(data.user_ids, (std::vector<std::string>{"alpha", "mid", "zeta"}));
  EXPECT_EQ(data.video_ids, (std::vector<std::string>{"v0", "v1", "v2"}));
  EXPECT_EQ(data.vlogger_ids, (std::vector<std::string>{"pa", "pz"}));
  EXPECT_EQ(data.up_edges, (EdgeList{{0, 1}, {2, 0}}));
  EXPECT_EQ(data.pv_edges, (EdgeList{{0, 0}, {0, 1}, {1, 2}}));
  EXPECT_EQ(data.interactions.size(), 9u);

  EXPECT_THROW(make_dataset(f, {{"ghost", "pa"}}), ValidationError);
  EXPECT_THROW(make_dataset(f, {{"zeta", "pghost"}}), ValidationError);
}

TEST(MakeDataset, SplitEdgeHelpers) {
  FilteredData f;
  std::uint64_t seq = 0;
  for (int u = 0; u < 2; ++u) {
    for (int k = 0; k < 4; ++k) {
      f.positives.push_back(
          RawPositive{"u" + std::to_string(u), "v" + std::to_string(k), k, seq++});
    }
  }
  f.publishing.edges = {{"v0", "p0"}, {"v1", "p0"}, {"v2", "p0"}, {"v3", "p0"}};
  Dataset data = make_dataset(f, {});
  EXPECT_EQ(data.uv_edges(Split::kTrain).size(), 4u);
  EXPECT_EQ(data.uv_edges(Split::kVal).size(), 2u);
  EXPECT_EQ(data.uv_edges(Split::kTest).size(), 2u);
  EXPECT_EQ(data.all_uv_edges().size(), 8u);
  TripartiteGraph g = data.train_graph();
  EXPECT_EQ(g.uv_edge_count(), 4u);
  EXPECT_EQ(g.n_vloggers(), 1u);
}

TEST(DatasetIo, RoundTripPreservesEverything) {
  SyntheticConfig cfg;
  cfg.n_users = 25;
  cfg.n_vloggers = 6;
  cfg.videos_per_vlogger = 8;
  cfg.interactions_per_user = 10;
  cfg.preferred_per_user = 3;
  cfg.seed = 7;
  Dataset data = generate_synthetic(cfg);
  testutil::TempDir dir;
  save_dataset(data, dir.str());
  Dataset loaded = load_dataset(dir.str());

  EXPECT_EQ(loaded.user_ids, data.user_ids);
  EXPECT_EQ(loaded.video_ids, data.video_ids);
  EXPECT_EQ(loaded.vlogger_ids, data.vlogger_ids);
  EXPECT_EQ(loaded.up_edges, data.up_edges);
  EXPECT_EQ(loaded.pv_edges, data.pv_edges);

  auto key = [](const Interaction& it) {
    return std::make_tuple(it.user, it.video, static_cast<int>(it.split));
  };
  std::set<std::tuple<std::uint32_t, std::uint32_t, int>> a, b;
  for (const Interaction& it : data.interactions) a.insert(key(it));
  for (const Interaction& it : loaded.interactions) b.insert(key(it));
  EXPECT_EQ(a, b);
}

TEST(DatasetIo, LoadRejectsCorruptTables) {
  SyntheticConfig cfg;
  cfg.n_users = 12;
  cfg.n_vloggers = 4;
  cfg.videos_per_vlogger = 6;
  cfg.interactions_per_user = 8;
  cfg.preferred_per_user = 2;
  Dataset data = generate_synthetic(cfg);

  EXPECT_THROW(load_dataset("/nonexistent/dataset/dir"), IoError);

  {
    testutil::TempDir dir;
    save_dataset(data, dir.str());
    testutil::write_file(dir / "user_ids.tsv", "ua\t0\nub\t0\n");
    EXPECT_THROW(load_dataset(dir.str()), ValidationError);
  }
  {
    testutil::TempDir dir;
    save_dataset(data, dir.str());
    testutil::write_file(dir / "user_ids.tsv", "ua\t0\nub\t5\n");
    EXPECT_THROW(load_dataset(dir.str()), ValidationError);
  }
  {
    testutil::TempDir dir;
    save_dataset(data, dir.str());
    std::string splits = testutil::read_file(dir / "splits.tsv");
    testutil::write_file(dir / "splits.tsv", splits + "ghost\tv000000\ttrain\n");
    EXPECT_THROW(load_dataset(dir.str()), ValidationError);
  }
  {
    testutil::TempDir dir;
    save_dataset(data, dir.str());
    std::string uv = testutil::read_file(dir / "user_video.tsv");
    const std::size_t cut = uv.find('\n');
    testutil::write_file(dir / "user_video.tsv", uv.substr(cut + 1));
    EXPECT_THROW(load_dataset(dir.str()), ValidationError);
  }
}

TEST(Synthetic, DeterministicForFixedSeed) {
  SyntheticConfig cfg;
  cfg.n_users = 20;
  cfg.n_vloggers = 5;
  cfg.videos_per_vlogger = 8;
  cfg.interactions_per_user = 10;
  cfg.preferred_per_user = 3;
  cfg.seed = 42;
  Dataset a = generate_synthetic(cfg);
  Dataset b = generate_synthetic(cfg);
  EXPECT_EQ(a.user_ids, b.user_ids);
  EXPECT_EQ(a.up_edges, b.up_edges);
  ASSERT_EQ(a.interactions.size(), b.interactions.size());
  for (std::size_t i = 0; i < a.interactions.size(); ++i) {
    EXPECT_EQ(a.interactions[i].user, b.interactions[i].user);
    EXPECT_EQ(a.interactions[i].video, b.interactions[i].video);
    EXPECT_EQ(a.interactions[i].split, b.interactions[i].split);
  }
  cfg.seed = 43;
  Dataset c = generate_synthetic(cfg);
  bool same = a.interactions.size() == c.interactions.size();
  if (same) {
    same = std::equal(a.interactions.begin(), a.interactions.end(), c.interactions.begin(),
                      [](const Interaction& x, const Interaction& y) {
                        return x.user == y.user && x.video == y.video;
                      });
  }
  EXPECT_FALSE(same);
}

TEST(Synthetic, FullAffinityKeepsUsersInsidePreferredVloggers) {
  SyntheticConfig cfg;
  cfg.n_users = 15;
  cfg.n_vloggers = 6;
  cfg.videos_per_vlogger = 10;
  cfg.interactions_per_user = 8;
  cfg.preferred_per_user = 1;
  cfg.affinity = 1.0;
  cfg.noise = 0.0;
  Dataset data = generate_synthetic(cfg);

  std::vector<std::uint32_t> publisher(data.n_videos());
  for (const auto& [p, v] : data.pv_edges) publisher[v] = p;
  std::map<std::uint32_t, std::set<std::uint32_t>> vloggers_of_user;
  for (const Interaction& it : data.interactions) {
    vloggers_of_user[it.user].insert(publisher[it.video]);
  }
  for (const auto& [u, ps] : vloggers_of_user) {
    EXPECT_EQ(ps.size(), 1u) << "user " << u;
  }
}

TEST(Synthetic, NoiseSpreadsInteractionsBeyondPreferred) {
  SyntheticConfig base;
  base.n_users = 30;
  base.n_vloggers = 10;
  base.videos_per_vlogger = 12;
  base.interactions_per_user = 12;
  base.preferred_per_user = 1;
  base.affinity = 1.0;
  base.noise = 0.0;
  base.seed = 11;

  auto mean_top_share = [](const Dataset& data) {
    std::vector<std::uint32_t> publisher(data.n_videos());
    for (const auto& [p, v] : data.pv_edges) publisher[v] = p;
    std::map<std::uint32_t, std::map<std::uint32_t, int>> cnt;
    std::map<std::uint32_t, int> total;
    for (const Interaction& it : data.interactions) {
      ++cnt[it.user][publisher[it.video]];
      ++total[it.user];
    }
    double acc = 0.0;
    for (const auto& [u, by_p] : cnt) {
      int top = 0;
      for (const auto& [p, n] : by_p) top = std::max(top, n);
      acc += static_cast<double>(top) / total[u];
    }
    return acc / static_cast<double>(cnt.size());
  };

  const double tight = mean_top_share(generate_synthetic(base));
  SyntheticConfig noisy = base;
  noisy.noise = 0.7;
  const double spread = mean_top_share(generate_synthetic(noisy));
  EXPECT_DOUBLE_EQ(tight, 1.0);
  EXPECT_LT(spread, 0.9);
  EXPECT_GT(spread, 0.2);
}

TEST(Synthetic, ValidatesConfigBounds) {
  SyntheticConfig cfg;
  cfg.n_users = 0;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.n_users = 1000000;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.n_vloggers = 1000;
  cfg.videos_per_vlogger = 1000;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.affinity = 0.0;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.affinity = 1.5;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.noise = 1.0;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.preferred_per_user = 100;
  cfg.n_vloggers = 10;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.interactions_per_user = 0;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SyntheticConfig{};
  cfg.n_vloggers = 2;
  cfg.videos_per_vlogger = 3;
  cfg.preferred_per_user = 2;
  cfg.interactions_per_user = 7;  // catalog has only 6 videos
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
}

TEST(Pipeline, FixtureLogProducesExpectedDataset) {
  const std::string path = testutil::fixtures_dir() + "/raw_log.tsv";
  std::vector<RawBehaviorRecord> records = read_raw_log(path);
  PositiveRuleConfig rules;
  std::vector<RawPositive> positives = derive_video_positives(records, rules);
  RawPublishing pub = derive_publishing(records);
  FilteredData filtered = filter_graph(positives, pub, rules);
  auto vlogger_pos = derive_vlogger_positives(records, filtered, rules);
  Dataset data = make_dataset(filtered, vlogger_pos);

  EXPECT_EQ(data.n_users(), 12u);
  EXPECT_EQ(data.n_videos(), 24u);
  EXPECT_EQ(data.n_vloggers(), 6u);
  EXPECT_EQ(data.interactions.size(), 167u);
  EXPECT_EQ(data.up_edges.size(), 65u);

  auto has = [](const std::vector<std::string>& ids, const std::string& raw) {
    return std::find(ids.begin(), ids.end(), raw) != ids.end();
  };
  EXPECT_FALSE(has(data.user_ids, "u13"));
  EXPECT_FALSE(has(data.user_ids, "u14"));
  EXPECT_FALSE(has(data.video_ids, "g1"));
  EXPECT_FALSE(has(data.vlogger_ids, "p7"));
  EXPECT_TRUE(has(data.vlogger_ids, "p6"));

  // p6 earns exactly the five distinct-path followers
  std::uint32_t p6 = 0;
  while (data.vlogger_ids[p6] != "p6") ++p6;
  int p6_degree = 0;
  for (const auto& [u, p] : data.up_edges) p6_degree += (p == p6);
  EXPECT_EQ(p6_degree, 5);

  // boundary rows sit exactly at the thresholds and stay out
  auto uidx = [&](const std::string& raw) {
    std::uint32_t i = 0;
    while (data.user_ids[i] != raw) ++i;
    return i;
  };
  auto vidx = [&](const std::string& raw) {
    std::uint32_t i = 0;
    while (data.video_ids[i] != raw) ++i;
    return i;
  };
  const std::uint32_t u01 = uidx("u01");
  for (const char* boundary : {"f2", "f3"}) {
    const std::uint32_t v = vidx(boundary);
    for (const Interaction& it : data.interactions) {
      EXPECT_FALSE(it.user == u01 && it.video == v) << boundary;
    }
  }

  // duplicate positives resolve to the earliest timestamp
  const std::uint32_t u02 = uidx("u02");
  const std::uint32_t a4 = vidx("a4");
  for (const Interaction& it : data.interactions) {
    if (it.user == u02 && it.video == a4) EXPECT_EQ(it.timestamp, 500);
  }
}

}  // namespace
