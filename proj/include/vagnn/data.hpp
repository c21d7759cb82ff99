#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vagnn/graph.hpp"

namespace vagnn {

struct RawBehaviorRecord {
  std::string user;
  std::string video;
  std::string vlogger;
  std::int64_t timestamp = 0;
  bool comment_post = false;
  bool comment_read = false;
  bool like = false;
  bool share = false;
  bool follow = false;
  bool homepage_enter = false;
  double watch_time = 0.0;
  double play_progress = 0.0;
  std::uint64_t input_seq = 0;

  bool any_explicit_flag() const {
    return comment_post || comment_read || like || share || follow || homepage_enter;
  }
};

// Header line names the columns; unknown columns are ignored.
std::vector<RawBehaviorRecord> read_raw_log(const std::string& path);

struct PositiveRuleConfig {
  double progress_threshold = 1.5;
  double time_threshold_secs = 60.0;
  int min_user_interactions = 5;
  int min_video_interactions = 5;
  int min_vlogger_videos = 3;
  int uvlogger_min_videos = 2;
  int uvlogger_min_interactions = 5;
};

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };
const char* split_name(Split s);
Split parse_split(const std::string& name);

struct RawPositive {
  std::string user;
  std::string video;
  std::int64_t timestamp = 0;
  std::uint64_t input_seq = 0;
};

struct RawPublishing {
  // video raw id -> vlogger raw id, one publisher per video
  std::vector<std::pair<std::string, std::string>> edges;
};

std::vector<RawPositive> derive_video_positives(const std::vector<RawBehaviorRecord>& records,
                                                const PositiveRuleConfig& rules);

RawPublishing derive_publishing(const std::vector<RawBehaviorRecord>& records);

struct FilteredData {
  std::vector<RawPositive> positives;
  RawPublishing publishing;  // surviving videos only
};

FilteredData filter_graph(std::vector<RawPositive> positives, const RawPublishing& publishing,
                          const PositiveRuleConfig& rules);

std::vector<std::pair<std::string, std::string>> derive_vlogger_positives(
    const std::vector<RawBehaviorRecord>& records, const FilteredData& filtered,
    const PositiveRuleConfig& rules);

struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t video = 0;
  std::int64_t timestamp = 0;
  std::uint64_t input_seq = 0;
  Split split = Split::kTrain;
};

struct Dataset {
  std::vector<std::string> user_ids;
  std::vector<std::string> video_ids;
  std::vector<std::string> vlogger_ids;
  std::vector<Interaction> interactions;
  EdgeList up_edges;
  EdgeList pv_edges;

  std::size_t n_users() const { return user_ids.size(); }
  std::size_t n_videos() const { return video_ids.size(); }
  std::size_t n_vloggers() const { return vlogger_ids.size(); }

  EdgeList uv_edges(Split split) const;
  EdgeList all_uv_edges() const;
  TripartiteGraph train_graph() const;
};

// Assigns dense indices in byte-lexicographic raw-id order and splits leave-one-out.
Dataset make_dataset(const FilteredData& filtered,
                     const std::vector<std::pair<std::string, std::string>>& vlogger_positives);

void leave_one_out_split(std::vector<Interaction>& interactions);

void save_dataset(const Dataset& data, const std::string& dir);
Dataset load_dataset(const std::string& dir);

struct SyntheticConfig {
  std::uint32_t n_users = 500;
  std::uint32_t n_vloggers = 40;
  std::uint32_t videos_per_vlogger = 25;
  double affinity = 0.9;
  double noise = 0.0;
  std::uint32_t interactions_per_user = 40;
  // large enough that the derived user-vlogger set survives its >=5 filter
  std::uint32_t preferred_per_user = 6;
  std::uint64_t seed = 0;
};

Dataset generate_synthetic(const SyntheticConfig& cfg);

}  // namespace vagnn
