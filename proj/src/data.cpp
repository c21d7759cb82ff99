#include "vagnn/data.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "vagnn/errors.hpp"
#include "vagnn/rng.hpp"

namespace vagnn {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no, const std::string& msg) {
  throw ValidationError(path + ":" + std::to_string(line_no) + ": " + msg);
}

bool parse_bool(const std::string& s, bool* out) {
  if (s == "1" || s == "true") {
    *out = true;
    return true;
  }
  if (s == "0" || s == "false" || s.empty()) {
    *out = false;
    return true;
  }
  return false;
}

bool parse_i64(const std::string& s, std::int64_t* out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    *out = std::stoll(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

bool parse_f64(const std::string& s, double* out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    *out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

}  // namespace

std::vector<RawBehaviorRecord> read_raw_log(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open raw log: " + path);

  std::string line;
  if (!std::getline(f, line)) throw ValidationError("empty raw log (missing header): " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_tabs(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  for (const char* required : {"user_id", "video_id", "vlogger_id", "timestamp"}) {
    if (!col.count(required)) {
      throw ValidationError(path + ":1: header is missing required column '" +
                            std::string(required) + "'");
    }
  }

  auto lookup = [&](const char* name) {
    auto it = col.find(name);
    return it == col.end() ? static_cast<std::size_t>(-1) : it->second;
  };
  const std::size_t c_user = lookup("user_id"), c_video = lookup("video_id"),
                    c_vlogger = lookup("vlogger_id"), c_ts = lookup("timestamp"),
                    c_cpost = lookup("comment_post"), c_cread = lookup("comment_read"),
                    c_like = lookup("like"), c_share = lookup("share"),
                    c_follow = lookup("follow"), c_home = lookup("homepage_enter"),
                    c_time = lookup("watch_time"), c_prog = lookup("play_progress");

  std::vector<RawBehaviorRecord> records;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != header.size()) {
      line_error(path, line_no,
                 "expected " + std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    }
    RawBehaviorRecord r;
    r.user = fields[c_user];
    r.video = fields[c_video];
    r.vlogger = fields[c_vlogger];
    if (r.user.empty() || r.video.empty() || r.vlogger.empty()) {
      line_error(path, line_no, "empty id field");
    }
    if (!parse_i64(fields[c_ts], &r.timestamp)) line_error(path, line_no, "bad timestamp");
    auto flag = [&](std::size_t c, bool* out, const char* name) {
      if (c == static_cast<std::size_t>(-1)) return;
      if (!parse_bool(fields[c], out)) line_error(path, line_no, std::string("bad flag ") + name);
    };
    flag(c_cpost, &r.comment_post, "comment_post");
    flag(c_cread, &r.comment_read, "comment_read");
    flag(c_like, &r.like, "like");
    flag(c_share, &r.share, "share");
    flag(c_follow, &r.follow, "follow");
    flag(c_home, &r.homepage_enter, "homepage_enter");
    if (c_time != static_cast<std::size_t>(-1) && !parse_f64(fields[c_time], &r.watch_time)) {
      line_error(path, line_no, "bad watch_time");
    }
    if (c_prog != static_cast<std::size_t>(-1) && !parse_f64(fields[c_prog], &r.play_progress)) {
      line_error(path, line_no, "bad play_progress");
    }
    if (r.watch_time < 0.0) line_error(path, line_no, "negative watch_time");
    if (r.play_progress < 0.0) line_error(path, line_no, "negative play_progress");
    r.input_seq = records.size();
    records.push_back(std::move(r));
  }
  return records;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  throw ValidationError("unknown split value");
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val" || name == "validation") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split name: " + name);
}

std::vector<RawPositive> derive_video_positives(const std::vector<RawBehaviorRecord>& records,
                                                const PositiveRuleConfig& rules) {
  std::map<std::pair<std::string, std::string>, RawPositive> best;
  for (const RawBehaviorRecord& r : records) {
    const bool positive = r.any_explicit_flag() || r.play_progress > rules.progress_threshold ||
                          r.watch_time > rules.time_threshold_secs;
    if (!positive) continue;
    auto key = std::make_pair(r.user, r.video);
    auto it = best.find(key);
    if (it == best.end() || r.timestamp < it->second.timestamp ||
        (r.timestamp == it->second.timestamp && r.input_seq < it->second.input_seq)) {
      best[key] = RawPositive{r.user, r.video, r.timestamp, r.input_seq};
    }
  }
  std::vector<RawPositive> out;
  out.reserve(best.size());
  for (auto& [key, pos] : best) out.push_back(std::move(pos));
  return out;
}

RawPublishing derive_publishing(const std::vector<RawBehaviorRecord>& records) {
  std::map<std::string, std::string> publisher;
  for (const RawBehaviorRecord& r : records) {
    auto it = publisher.find(r.video);
    if (it == publisher.end()) {
      publisher.emplace(r.video, r.vlogger);
    } else if (it->second != r.vlogger) {
      throw GraphError("video '" + r.video + "' has conflicting publishers '" + it->second +
                       "' and '" + r.vlogger + "'");
    }
  }
  RawPublishing out;
  out.edges.reserve(publisher.size());
  for (auto& [video, vlogger] : publisher) out.edges.emplace_back(video, vlogger);
  return out;
}

FilteredData filter_graph(std::vector<RawPositive> positives, const RawPublishing& publishing,
                          const PositiveRuleConfig& rules) {
  if (positives.empty()) throw ValidationError("empty dataset: no positive interactions");

  std::unordered_map<std::string, std::string> publisher;
  std::unordered_map<std::string, std::vector<std::string>> videos_of;
  for (const auto& [video, vlogger] : publishing.edges) {
    publisher[video] = vlogger;
    videos_of[vlogger].push_back(video);
  }
  for (const RawPositive& p : positives) {
    if (!publisher.count(p.video)) {
      throw GraphError("video '" + p.video + "' has interactions but no publisher");
    }
  }

  std::unordered_set<std::string> live_users, live_videos, live_vloggers;
  for (const RawPositive& p : positives) live_users.insert(p.user);
  for (const auto& [video, vlogger] : publishing.edges) {
    live_videos.insert(video);
    live_vloggers.insert(vlogger);
  }

  for (;;) {
    std::unordered_map<std::string, int> user_cnt, video_cnt, vlogger_videos;
    for (const RawPositive& p : positives) {
      if (!live_users.count(p.user) || !live_videos.count(p.video)) continue;
      ++user_cnt[p.user];
      ++video_cnt[p.video];
    }
    for (const std::string& v : live_videos) {
      if (video_cnt[v] >= rules.min_video_interactions) ++vlogger_videos[publisher[v]];
    }

    std::vector<std::string> drop_users, drop_videos, drop_vloggers;
    for (const std::string& u : live_users) {
      if (user_cnt[u] < rules.min_user_interactions) drop_users.push_back(u);
    }
    for (const std::string& v : live_videos) {
      if (video_cnt[v] < rules.min_video_interactions) drop_videos.push_back(v);
    }
    for (const std::string& p : live_vloggers) {
      if (vlogger_videos[p] < rules.min_vlogger_videos) drop_vloggers.push_back(p);
    }
    if (drop_users.empty() && drop_videos.empty() && drop_vloggers.empty()) break;

    for (const std::string& u : drop_users) live_users.erase(u);
    for (const std::string& v : drop_videos) live_videos.erase(v);
    for (const std::string& p : drop_vloggers) {
      live_vloggers.erase(p);
      for (const std::string& v : videos_of[p]) live_videos.erase(v);
    }
    std::erase_if(positives, [&](const RawPositive& p) {
      return !live_users.count(p.user) || !live_videos.count(p.video);
    });
    if (positives.empty()) throw ValidationError("empty dataset: filtering removed everything");
  }

  FilteredData out;
  out.positives = std::move(positives);
  std::sort(out.positives.begin(), out.positives.end(), [](const RawPositive& a, const RawPositive& b) {
    return std::tie(a.user, a.video) < std::tie(b.user, b.video);
  });
  for (const auto& edge : publishing.edges) {
    if (live_videos.count(edge.first)) out.publishing.edges.push_back(edge);
  }
  if (out.positives.empty()) throw ValidationError("empty dataset: filtering removed everything");
  return out;
}

std::vector<std::pair<std::string, std::string>> derive_vlogger_positives(
    const std::vector<RawBehaviorRecord>& records, const FilteredData& filtered,
    const PositiveRuleConfig& rules) {
  std::unordered_map<std::string, std::string> publisher;
  std::unordered_set<std::string> live_vloggers;
  for (const auto& [video, vlogger] : filtered.publishing.edges) {
    publisher[video] = vlogger;
    live_vloggers.insert(vlogger);
  }
  std::unordered_set<std::string> live_users;
  for (const RawPositive& p : filtered.positives) live_users.insert(p.user);

  std::set<std::pair<std::string, std::string>> pairs;
  for (const RawBehaviorRecord& r : records) {
    if (!(r.follow || r.homepage_enter)) continue;
    if (live_users.count(r.user) && live_vloggers.count(r.vlogger)) {
      pairs.emplace(r.user, r.vlogger);
    }
  }
  std::map<std::pair<std::string, std::string>, std::set<std::string>> distinct;
  for (const RawPositive& p : filtered.positives) {
    distinct[{p.user, publisher.at(p.video)}].insert(p.video);
  }
  for (const auto& [key, videos] : distinct) {
    if (static_cast<int>(videos.size()) > rules.uvlogger_min_videos) pairs.insert(key);
  }

  for (;;) {
    std::map<std::string, int> user_cnt, vlogger_cnt;
    for (const auto& [u, p] : pairs) {
      ++user_cnt[u];
      ++vlogger_cnt[p];
    }
    const std::size_t before = pairs.size();
    std::erase_if(pairs, [&](const std::pair<std::string, std::string>& e) {
      return user_cnt[e.first] < rules.uvlogger_min_interactions ||
             vlogger_cnt[e.second] < rules.uvlogger_min_interactions;
    });
    if (pairs.size() == before) break;
  }
  return {pairs.begin(), pairs.end()};
}

void leave_one_out_split(std::vector<Interaction>& interactions) {
  std::unordered_map<std::uint32_t, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    by_user[interactions[i].user].push_back(i);
  }
  for (auto& [user, idx] : by_user) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(interactions[a].timestamp, interactions[a].input_seq) <
             std::tie(interactions[b].timestamp, interactions[b].input_seq);
    });
    for (std::size_t i : idx) interactions[i].split = Split::kTrain;
    if (idx.size() >= 3) {
      interactions[idx[idx.size() - 1]].split = Split::kTest;
      interactions[idx[idx.size() - 2]].split = Split::kVal;
    }
  }
}

Dataset make_dataset(const FilteredData& filtered,
                     const std::vector<std::pair<std::string, std::string>>& vlogger_positives) {
  Dataset out;
  {
    std::set<std::string> users, videos, vloggers;
    for (const RawPositive& p : filtered.positives) users.insert(p.user);
    for (const auto& [video, vlogger] : filtered.publishing.edges) {
      videos.insert(video);
      vloggers.insert(vlogger);
    }
    out.user_ids.assign(users.begin(), users.end());
    out.video_ids.assign(videos.begin(), videos.end());
    out.vlogger_ids.assign(vloggers.begin(), vloggers.end());
  }
  std::unordered_map<std::string, std::uint32_t> u_of, v_of, p_of;
  for (std::uint32_t i = 0; i < out.user_ids.size(); ++i) u_of[out.user_ids[i]] = i;
  for (std::uint32_t i = 0; i < out.video_ids.size(); ++i) v_of[out.video_ids[i]] = i;
  for (std::uint32_t i = 0; i < out.vlogger_ids.size(); ++i) p_of[out.vlogger_ids[i]] = i;

  for (const RawPositive& p : filtered.positives) {
    out.interactions.push_back(
        Interaction{u_of.at(p.user), v_of.at(p.video), p.timestamp, p.input_seq, Split::kTrain});
  }
  leave_one_out_split(out.interactions);

  for (const auto& [user, vlogger] : vlogger_positives) {
    auto u = u_of.find(user);
    auto p = p_of.find(vlogger);
    if (u == u_of.end() || p == p_of.end()) {
      throw ValidationError("vlogger positive references filtered-out entity: " + user + " / " +
                            vlogger);
    }
    out.up_edges.emplace_back(u->second, p->second);
  }
  for (const auto& [video, vlogger] : filtered.publishing.edges) {
    out.pv_edges.emplace_back(p_of.at(vlogger), v_of.at(video));
  }
  std::sort(out.up_edges.begin(), out.up_edges.end());
  std::sort(out.pv_edges.begin(), out.pv_edges.end());
  return out;
}

EdgeList Dataset::uv_edges(Split split) const {
  EdgeList out;
  for (const Interaction& it : interactions) {
    if (it.split == split) out.emplace_back(it.user, it.video);
  }
  std::sort(out.begin(), out.end());
  return out;
}

EdgeList Dataset::all_uv_edges() const {
  EdgeList out;
  out.reserve(interactions.size());
  for (const Interaction& it : interactions) out.emplace_back(it.user, it.video);
  std::sort(out.begin(), out.end());
  return out;
}

TripartiteGraph Dataset::train_graph() const {
  return TripartiteGraph::build(n_users(), n_videos(), n_vloggers(), uv_edges(Split::kTrain),
                                up_edges, pv_edges);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  return f;
}

void write_id_table(const std::filesystem::path& path, const std::vector<std::string>& ids) {
  std::ofstream f = open_out(path);
  for (std::size_t i = 0; i < ids.size(); ++i) f << ids[i] << '\t' << i << '\n';
  if (!f.flush()) throw IoError("write failure: " + path.string());
}

std::vector<std::string> read_id_table(const std::filesystem::path& path) {
  std::ifstream f = open_in(path);
  std::vector<std::pair<std::uint64_t, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    std::int64_t dense = 0;
    if (fields.size() != 2 || !parse_i64(fields[1], &dense) || dense < 0) {
      line_error(path.string(), line_no, "bad id table row");
    }
    rows.emplace_back(static_cast<std::uint64_t>(dense), fields[0]);
  }
  std::vector<std::string> ids(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (auto& [dense, raw] : rows) {
    if (dense >= ids.size() || seen[dense]) {
      throw ValidationError("id table is not a dense 0..n-1 mapping: " + path.string());
    }
    seen[dense] = true;
    ids[dense] = std::move(raw);
  }
  return ids;
}

struct RawLookup {
  std::unordered_map<std::string, std::uint32_t> map;
  explicit RawLookup(const std::vector<std::string>& ids) {
    for (std::uint32_t i = 0; i < ids.size(); ++i) {
      if (!map.emplace(ids[i], i).second) {
        throw ValidationError("duplicate raw id in table: " + ids[i]);
      }
    }
  }
  std::uint32_t at(const std::string& raw, const std::string& path, std::size_t line_no) const {
    auto it = map.find(raw);
    if (it == map.end()) line_error(path, line_no, "unknown raw id '" + raw + "'");
    return it->second;
  }
};

}  // namespace

void save_dataset(const Dataset& data, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create dataset directory: " + dir);

  write_id_table(fs::path(dir) / "user_ids.tsv", data.user_ids);
  write_id_table(fs::path(dir) / "video_ids.tsv", data.video_ids);
  write_id_table(fs::path(dir) / "vlogger_ids.tsv", data.vlogger_ids);

  std::vector<const Interaction*> rows;
  rows.reserve(data.interactions.size());
  for (const Interaction& it : data.interactions) rows.push_back(&it);
  std::sort(rows.begin(), rows.end(), [](const Interaction* a, const Interaction* b) {
    return std::tie(a->user, a->video) < std::tie(b->user, b->video);
  });

  {
    std::ofstream uv = open_out(fs::path(dir) / "user_video.tsv");
    std::ofstream sp = open_out(fs::path(dir) / "splits.tsv");
    for (const Interaction* it : rows) {
      uv << data.user_ids[it->user] << '\t' << data.video_ids[it->video] << '\n';
      sp << data.user_ids[it->user] << '\t' << data.video_ids[it->video] << '\t'
         << split_name(it->split) << '\n';
    }
    if (!uv.flush() || !sp.flush()) throw IoError("write failure under " + dir);
  }
  {
    std::ofstream up = open_out(fs::path(dir) / "user_vlogger.tsv");
    EdgeList edges = data.up_edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& [u, p] : edges) {
      up << data.user_ids[u] << '\t' << data.vlogger_ids[p] << '\n';
    }
    if (!up.flush()) throw IoError("write failure under " + dir);
  }
  {
    std::ofstream pv = open_out(fs::path(dir) / "vlogger_video.tsv");
    EdgeList edges = data.pv_edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& [p, v] : edges) {
      pv << data.vlogger_ids[p] << '\t' << data.video_ids[v] << '\n';
    }
    if (!pv.flush()) throw IoError("write failure under " + dir);
  }
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  Dataset out;
  out.user_ids = read_id_table(fs::path(dir) / "user_ids.tsv");
  out.video_ids = read_id_table(fs::path(dir) / "video_ids.tsv");
  out.vlogger_ids = read_id_table(fs::path(dir) / "vlogger_ids.tsv");
  RawLookup users(out.user_ids), videos(out.video_ids), vloggers(out.vlogger_ids);

  const std::string sp_path = (fs::path(dir) / "splits.tsv").string();
  {
    std::ifstream f = open_in(sp_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto fields = split_tabs(line);
      if (fields.size() != 3) line_error(sp_path, line_no, "expected 3 fields");
      Interaction it;
      it.user = users.at(fields[0], sp_path, line_no);
      it.video = videos.at(fields[1], sp_path, line_no);
      it.split = parse_split(fields[2]);
      it.input_seq = line_no;
      out.interactions.push_back(it);
    }
  }
  {
    const std::string uv_path = (fs::path(dir) / "user_video.tsv").string();
    std::ifstream f = open_in(uv_path);
    std::set<std::pair<std::uint32_t, std::uint32_t>> uv_set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto fields = split_tabs(line);
      if (fields.size() != 2) line_error(uv_path, line_no, "expected 2 fields");
      uv_set.emplace(users.at(fields[0], uv_path, line_no), videos.at(fields[1], uv_path, line_no));
    }
    std::set<std::pair<std::uint32_t, std::uint32_t>> sp_set;
    for (const Interaction& it : out.interactions) sp_set.emplace(it.user, it.video);
    if (uv_set != sp_set) {
      throw ValidationError("splits.tsv and user_video.tsv disagree under " + dir);
    }
  }
  auto read_edges = [&](const char* name, const RawLookup& src, const RawLookup& dst) {
    const std::string path = (fs::path(dir) / name).string();
    std::ifstream f = open_in(path);
    EdgeList edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto fields = split_tabs(line);
      if (fields.size() != 2) line_error(path, line_no, "expected 2 fields");
      edges.emplace_back(src.at(fields[0], path, line_no), dst.at(fields[1], path, line_no));
    }
    std::sort(edges.begin(), edges.end());
    return edges;
  };
  out.up_edges = read_edges("user_vlogger.tsv", users, vloggers);
  out.pv_edges = read_edges("vlogger_video.tsv", vloggers, videos);
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_users == 0 || cfg.n_vloggers == 0 || cfg.videos_per_vlogger == 0) {
    throw ConfigError("synthetic entity counts must be positive");
  }
  if (cfg.n_users > 999999 || cfg.n_vloggers > 999999 ||
      static_cast<std::uint64_t>(cfg.n_vloggers) * cfg.videos_per_vlogger > 999999) {
    throw ConfigError("synthetic entity counts exceed id-format capacity");
  }
  if (!(cfg.affinity > 0.0 && cfg.affinity <= 1.0)) {
    throw ConfigError("synthetic affinity must lie in (0, 1]");
  }
  if (cfg.noise < 0.0 || cfg.noise >= 1.0) throw ConfigError("synthetic noise must lie in [0, 1)");
  if (cfg.preferred_per_user == 0 || cfg.preferred_per_user > cfg.n_vloggers) {
    throw ConfigError("preferred_per_user must lie in [1, n_vloggers]");
  }
  const std::uint64_t catalog = static_cast<std::uint64_t>(cfg.n_vloggers) * cfg.videos_per_vlogger;
  if (cfg.interactions_per_user == 0 || cfg.interactions_per_user > catalog) {
    throw ConfigError("interactions_per_user must lie in [1, catalog size]");
  }

  auto uid = [](char prefix, std::uint32_t i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%06u", i);
    return std::string(1, prefix) + buf;
  };

  std::mt19937_64 rng = make_rng(cfg.seed, RngStream::kSynth);

  FilteredData filtered;
  for (std::uint32_t p = 0; p < cfg.n_vloggers; ++p) {
    for (std::uint32_t j = 0; j < cfg.videos_per_vlogger; ++j) {
      filtered.publishing.edges.emplace_back(uid('v', p * cfg.videos_per_vlogger + j), uid('p', p));
    }
  }

  std::uint64_t seq = 0;
  for (std::uint32_t u = 0; u < cfg.n_users; ++u) {
    std::set<std::uint32_t> preferred_set;
    while (preferred_set.size() < cfg.preferred_per_user) {
      preferred_set.insert(static_cast<std::uint32_t>(uniform_below(rng, cfg.n_vloggers)));
    }
    const std::vector<std::uint32_t> preferred(preferred_set.begin(), preferred_set.end());

    std::set<std::uint32_t> picked;
    for (std::uint32_t t = 0; t < cfg.interactions_per_user; ++t) {
      std::uint32_t video = 0;
      int attempts = 0;
      do {
        if (++attempts > 10000) throw ValidationError("synthetic sampling exhausted");
        const bool uniform_pick =
            uniform_unit(rng) < cfg.noise || !(uniform_unit(rng) < cfg.affinity);
        if (uniform_pick) {
          video = static_cast<std::uint32_t>(uniform_below(rng, catalog));
        } else {
          const std::uint32_t p =
              preferred[static_cast<std::size_t>(uniform_below(rng, preferred.size()))];
          video = p * cfg.videos_per_vlogger +
                  static_cast<std::uint32_t>(uniform_below(rng, cfg.videos_per_vlogger));
        }
      } while (picked.count(video));
      picked.insert(video);
      filtered.positives.push_back(
          RawPositive{uid('u', u), uid('v', video), static_cast<std::int64_t>(t), seq++});
    }
  }

  std::sort(filtered.positives.begin(), filtered.positives.end(),
            [](const RawPositive& a, const RawPositive& b) {
              return std::tie(a.user, a.video) < std::tie(b.user, b.video);
            });
  PositiveRuleConfig rules;
  return make_dataset(filtered, derive_vlogger_positives({}, filtered, rules));
}

}  // namespace vagnn
