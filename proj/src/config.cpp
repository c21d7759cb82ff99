#include "vagnn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vagnn/digest.hpp"
#include "vagnn/errors.hpp"

#include "json.hpp"

namespace vagnn {

namespace {

using nlohmann::json;

std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const json& expect_object(const json& j, const std::string& name) {
  if (!j.is_object()) throw ConfigError("config key " + name + " must be an object");
  return j;
}

double get_double(const json& obj, const std::string& prefix, const char* key, double& out) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("config key " + join_key(prefix, key) + " must be a number");
  out = v.get<double>();
  return out;
}

void get_int(const json& obj, const std::string& prefix, const char* key, int& out) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError("config key " + join_key(prefix, key) + " must be an integer");
  }
  out = v.get<int>();
}

void get_u32(const json& obj, const std::string& prefix, const char* key, std::uint32_t& out) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError("config key " + join_key(prefix, key) + " must be a non-negative integer");
  }
  out = v.get<std::uint32_t>();
}

void get_u64(const json& obj, const std::string& prefix, const char* key, std::uint64_t& out) {
  const json& v = obj.at(key);
  const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) {
    throw ConfigError("config key " + join_key(prefix, key) + " must be a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void get_bool(const json& obj, const std::string& prefix, const char* key, bool& out) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("config key " + join_key(prefix, key) + " must be a boolean");
  out = v.get<bool>();
}

void get_string(const json& obj, const std::string& prefix, const char* key, std::string& out) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("config key " + join_key(prefix, key) + " must be a string");
  out = v.get<std::string>();
}

json config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["paths"] = {{"raw_log", c.raw_log},
                {"dataset_dir", c.dataset_dir},
                {"checkpoint", c.checkpoint},
                {"report_dir", c.report_dir}};
  j["rules"] = {{"progress_threshold", c.rules.progress_threshold},
                {"time_threshold_secs", c.rules.time_threshold_secs},
                {"min_user_interactions", c.rules.min_user_interactions},
                {"min_video_interactions", c.rules.min_video_interactions},
                {"min_vlogger_videos", c.rules.min_vlogger_videos},
                {"uvlogger_min_videos", c.rules.uvlogger_min_videos},
                {"uvlogger_min_interactions", c.rules.uvlogger_min_interactions}};
  j["walks"] = {{"q1", c.train.walks.q1},
                {"q2", c.train.walks.q2},
                {"walks_per_user", c.train.walks.walks_per_user},
                {"vlogger_view_walks_per_user", c.train.walks.vlogger_view_walks_per_user},
                {"uvu_in_video_view", c.train.walks.uvu_in_video_view}};
  j["train"] = {{"dim", c.train.dim},
                {"layers", c.train.layers},
                {"lr", c.train.lr},
                {"beta1", c.train.beta1},
                {"beta2", c.train.beta2},
                {"eps", c.train.eps},
                {"batch_size", c.train.batch_size},
                {"negatives", c.train.negatives},
                {"max_epochs", c.train.max_epochs},
                {"patience", c.train.patience},
                {"init_std", c.train.init_std},
                {"layer_avg_denominator",
                 c.train.layer_avg == LayerAvgDenom::kLayersPlusOne ? "L_plus_1" : "L"},
                {"contrastive_mode",
                 c.train.contrastive_mode == ContrastiveMode::kFullSet ? "full_set" : "in_batch"},
                {"resample_walks_every", c.train.resample_walks_every},
                {"eval_k", c.train.eval_k}};
  j["loss"] = {{"lambda1", c.train.loss.lambda1},
               {"lambda2", c.train.loss.lambda2},
               {"lambda3", c.train.loss.lambda3},
               {"tau", c.train.loss.tau}};
  j["ablation"] = {{"contrastive", c.train.ablation.contrastive},
                   {"vlogger_task", c.train.ablation.vlogger_task},
                   {"video_view", c.train.ablation.video_view},
                   {"vlogger_view", c.train.ablation.vlogger_view},
                   {"gate_blending", c.train.ablation.gate_blending}};
  j["synth"] = {{"n_users", c.synth.n_users},
                {"n_vloggers", c.synth.n_vloggers},
                {"videos_per_vlogger", c.synth.videos_per_vlogger},
                {"affinity", c.synth.affinity},
                {"noise", c.synth.noise},
                {"interactions_per_user", c.synth.interactions_per_user},
                {"preferred_per_user", c.synth.preferred_per_user}};
  j["eval"] = {{"ks", c.eval_ks}};
  return j;
}

void check_known_keys(const json& obj, const std::string& prefix, const json& reference) {
  for (const auto& [key, value] : obj.items()) {
    if (!reference.contains(key)) {
      throw ConfigError("unknown config key: " + join_key(prefix, key));
    }
    if (reference.at(key).is_object()) {
      check_known_keys(expect_object(value, join_key(prefix, key)), join_key(prefix, key),
                       reference.at(key));
    }
  }
}

RunConfig config_from_json(const json& j) {
  check_known_keys(j, "", config_to_json(RunConfig{}));
  RunConfig c;
  get_u64(j, "", "seed", c.seed);

  const json& paths = expect_object(j.at("paths"), "paths");
  get_string(paths, "paths", "raw_log", c.raw_log);
  get_string(paths, "paths", "dataset_dir", c.dataset_dir);
  get_string(paths, "paths", "checkpoint", c.checkpoint);
  get_string(paths, "paths", "report_dir", c.report_dir);

  const json& rules = expect_object(j.at("rules"), "rules");
  get_double(rules, "rules", "progress_threshold", c.rules.progress_threshold);
  get_double(rules, "rules", "time_threshold_secs", c.rules.time_threshold_secs);
  get_int(rules, "rules", "min_user_interactions", c.rules.min_user_interactions);
  get_int(rules, "rules", "min_video_interactions", c.rules.min_video_interactions);
  get_int(rules, "rules", "min_vlogger_videos", c.rules.min_vlogger_videos);
  get_int(rules, "rules", "uvlogger_min_videos", c.rules.uvlogger_min_videos);
  get_int(rules, "rules", "uvlogger_min_interactions", c.rules.uvlogger_min_interactions);

  const json& walks = expect_object(j.at("walks"), "walks");
  get_double(walks, "walks", "q1", c.train.walks.q1);
  get_double(walks, "walks", "q2", c.train.walks.q2);
  get_u32(walks, "walks", "walks_per_user", c.train.walks.walks_per_user);
  get_u32(walks, "walks", "vlogger_view_walks_per_user",
          c.train.walks.vlogger_view_walks_per_user);
  get_bool(walks, "walks", "uvu_in_video_view", c.train.walks.uvu_in_video_view);

  const json& train = expect_object(j.at("train"), "train");
  get_int(train, "train", "dim", c.train.dim);
  get_int(train, "train", "layers", c.train.layers);
  get_double(train, "train", "lr", c.train.lr);
  get_double(train, "train", "beta1", c.train.beta1);
  get_double(train, "train", "beta2", c.train.beta2);
  get_double(train, "train", "eps", c.train.eps);
  get_int(train, "train", "batch_size", c.train.batch_size);
  get_int(train, "train", "negatives", c.train.negatives);
  get_int(train, "train", "max_epochs", c.train.max_epochs);
  get_int(train, "train", "patience", c.train.patience);
  get_double(train, "train", "init_std", c.train.init_std);
  std::string denom;
  get_string(train, "train", "layer_avg_denominator", denom);
  if (denom == "L_plus_1") {
    c.train.layer_avg = LayerAvgDenom::kLayersPlusOne;
  } else if (denom == "L") {
    c.train.layer_avg = LayerAvgDenom::kLayers;
  } else {
    throw ConfigError("config key train.layer_avg_denominator must be \"L\" or \"L_plus_1\"");
  }
  std::string cmode;
  get_string(train, "train", "contrastive_mode", cmode);
  if (cmode == "full_set") {
    c.train.contrastive_mode = ContrastiveMode::kFullSet;
  } else if (cmode == "in_batch") {
    c.train.contrastive_mode = ContrastiveMode::kInBatch;
  } else {
    throw ConfigError("config key train.contrastive_mode must be \"full_set\" or \"in_batch\"");
  }
  get_int(train, "train", "resample_walks_every", c.train.resample_walks_every);
  get_int(train, "train", "eval_k", c.train.eval_k);

  const json& loss = expect_object(j.at("loss"), "loss");
  get_double(loss, "loss", "lambda1", c.train.loss.lambda1);
  get_double(loss, "loss", "lambda2", c.train.loss.lambda2);
  get_double(loss, "loss", "lambda3", c.train.loss.lambda3);
  get_double(loss, "loss", "tau", c.train.loss.tau);

  const json& ab = expect_object(j.at("ablation"), "ablation");
  get_bool(ab, "ablation", "contrastive", c.train.ablation.contrastive);
  get_bool(ab, "ablation", "vlogger_task", c.train.ablation.vlogger_task);
  get_bool(ab, "ablation", "video_view", c.train.ablation.video_view);
  get_bool(ab, "ablation", "vlogger_view", c.train.ablation.vlogger_view);
  get_bool(ab, "ablation", "gate_blending", c.train.ablation.gate_blending);

  const json& synth = expect_object(j.at("synth"), "synth");
  get_u32(synth, "synth", "n_users", c.synth.n_users);
  get_u32(synth, "synth", "n_vloggers", c.synth.n_vloggers);
  get_u32(synth, "synth", "videos_per_vlogger", c.synth.videos_per_vlogger);
  get_double(synth, "synth", "affinity", c.synth.affinity);
  get_double(synth, "synth", "noise", c.synth.noise);
  get_u32(synth, "synth", "interactions_per_user", c.synth.interactions_per_user);
  get_u32(synth, "synth", "preferred_per_user", c.synth.preferred_per_user);

  const json& ev = expect_object(j.at("eval"), "eval");
  const json& ks = ev.at("ks");
  if (!ks.is_array() || ks.empty()) throw ConfigError("config key eval.ks must be a non-empty array");
  c.eval_ks.clear();
  for (const json& k : ks) {
    if (!k.is_number_integer() || k.get<int>() < 1) {
      throw ConfigError("config key eval.ks entries must be integers >= 1");
    }
    c.eval_ks.push_back(k.get<int>());
  }
  return c;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  json file_json;
  try {
    file_json = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " + e.what());
  }
  if (!file_json.is_object()) throw ConfigError("config root must be an object: " + path);
  json merged = config_to_json(RunConfig{});
  merged.update(file_json, true);
  return config_from_json(merged);
}

void apply_set_override(RunConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + assignment);
  }
  const std::string dotted = assignment.substr(0, eq);
  const std::string raw_value = assignment.substr(eq + 1);

  std::string pointer = "/";
  for (char ch : dotted) pointer += (ch == '.') ? '/' : ch;

  json value = json::parse(raw_value, nullptr, false);
  if (value.is_discarded()) value = raw_value;

  json j = config_to_json(cfg);
  try {
    j[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw ConfigError("cannot apply override " + assignment + ": " + e.what());
  }
  cfg = config_from_json(j);
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* v = std::getenv("VAGNN_RAW_LOG")) cfg.raw_log = v;
  if (const char* v = std::getenv("VAGNN_DATASET_DIR")) cfg.dataset_dir = v;
  if (const char* v = std::getenv("VAGNN_CHECKPOINT")) cfg.checkpoint = v;
  if (const char* v = std::getenv("VAGNN_REPORT_DIR")) cfg.report_dir = v;
}

std::string canonical_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

std::uint64_t run_config_digest(const RunConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("paths");
  return fnv1a64(j.dump());
}

void finalize_run_config(RunConfig& cfg) {
  cfg.train.seed = cfg.seed;
  cfg.synth.seed = cfg.seed;
  cfg.train.config_digest = run_config_digest(cfg);
  validate_train_config(cfg.train);
  if (cfg.eval_ks.empty()) throw ConfigError("eval.ks must not be empty");
  for (int k : cfg.eval_ks) {
    if (k < 1) throw ConfigError("eval.ks entries must be >= 1");
  }
}

}  // namespace vagnn
