#include "vagnn/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "vagnn/ablation.hpp"
#include "vagnn/digest.hpp"
#include "vagnn/errors.hpp"
#include "vagnn/eval.hpp"
#include "vagnn/model.hpp"
#include "vagnn/propagation.hpp"
#include "vagnn/training.hpp"

#include "CLI11.hpp"

namespace vagnn {

namespace fs = std::filesystem;

namespace {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << text;
  if (!f.flush()) throw IoError("write failure: " + path);
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string fmt_score(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10f", x);
  return buf;
}

struct ForwardArtifacts {
  TripartiteGraph g;
  AugmentedNeighborhoods aug;
  ForwardResult fwd;
};

ForwardArtifacts build_artifacts(const ModelParams& params, const Dataset& data,
                                 const TrainConfig& cfg) {
  ForwardArtifacts a;
  a.g = data.train_graph();
  MetaPathConfig wcfg = cfg.walks;
  wcfg.seed = cfg.seed;
  a.aug = build_augmented_neighborhoods(a.g, sample_meta_paths(a.g, wcfg), wcfg.uvu_in_video_view);
  a.fwd = forward_model(params, a.g, a.aug, cfg.layers, cfg.layer_avg, cfg.ablation);
  return a;
}

// Evaluation and recommendation reconstruct the training-time forward pass
// from the checkpoint's own seed and digest, not the current command line.
TrainConfig checkpoint_config(const RunConfig& cfg, const TrainState& state) {
  TrainConfig ecfg = cfg.train;
  ecfg.seed = state.seed;
  ecfg.config_digest = state.config_digest;
  return ecfg;
}

void print_dataset_summary(const RunConfig& cfg, const Dataset& data) {
  std::cout << "config_digest\t" << hex64(run_config_digest(cfg)) << "\n"
            << "users\t" << data.n_users() << "\n"
            << "videos\t" << data.n_videos() << "\n"
            << "vloggers\t" << data.n_vloggers() << "\n"
            << "interactions\t" << data.interactions.size() << "\n"
            << "user_vlogger_edges\t" << data.up_edges.size() << "\n"
            << "dataset_dir\t" << cfg.dataset_dir << "\n";
}

}  // namespace

int cmd_preprocess(const RunConfig& cfg) {
  if (cfg.raw_log.empty()) {
    throw ConfigError(
        "preprocess needs a raw log path (paths.raw_log, --raw-log, or VAGNN_RAW_LOG)");
  }
  const auto records = read_raw_log(cfg.raw_log);
  const auto positives = derive_video_positives(records, cfg.rules);
  const auto publishing = derive_publishing(records);
  const FilteredData filtered = filter_graph(positives, publishing, cfg.rules);
  const auto vlogger_pos = derive_vlogger_positives(records, filtered, cfg.rules);
  const Dataset data = make_dataset(filtered, vlogger_pos);
  save_dataset(data, cfg.dataset_dir);
  print_dataset_summary(cfg, data);
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg) {
  const Dataset data = generate_synthetic(cfg.synth);
  save_dataset(data, cfg.dataset_dir);
  print_dataset_summary(cfg, data);
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg.dataset_dir);
  fs::create_directories(cfg.report_dir);
  ensure_parent_dir(cfg.checkpoint);

  const std::string log_path = cfg.report_dir + "/train_log.jsonl";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw IoError("cannot open for writing: " + log_path);
  const TrainResult result = train(data, cfg.train, &log);
  if (!log.flush()) throw IoError("write failure: " + log_path);

  save_checkpoint(cfg.checkpoint, result.best);
  std::cout << "config_digest\t" << hex64(cfg.train.config_digest) << "\n"
            << "epochs_run\t" << result.history.size() << "\n"
            << "best_epoch\t" << result.best_epoch << "\n"
            << "best_val_recall@" << cfg.train.eval_k << "\t" << fmt_score(result.best_val_recall)
            << "\n"
            << "checkpoint\t" << cfg.checkpoint << "\n"
            << "train_log\t" << log_path << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, const EvaluateOptions& opts) {
  const Dataset data = load_dataset(cfg.dataset_dir);
  const TrainState state = load_checkpoint(cfg.checkpoint);
  check_checkpoint_shapes(state, data.n_users(), data.n_videos(), data.n_vloggers(),
                          cfg.train.dim);
  const Split split = parse_split(opts.split);
  const TrainConfig ecfg = checkpoint_config(cfg, state);

  const ForwardArtifacts a = build_artifacts(state.params, data, ecfg);
  const Scorer scorer(a.fwd.users, a.fwd.videos, a.fwd.vloggers, state.params.gate, a.g,
                      ecfg.ablation.gate_blending);
  MetricsReport report = evaluate(scorer, data, split, cfg.eval_ks);
  report.seed = state.seed;
  report.config_digest = hex64(state.config_digest);

  fs::create_directories(cfg.report_dir);
  const std::string path = opts.report_path.empty()
                               ? cfg.report_dir + "/metrics_" + split_long_name(split) + ".tsv"
                               : opts.report_path;
  ensure_parent_dir(path);
  const std::string text = format_metrics_text(report);
  write_text_file(path, text);
  if (opts.json_report) write_text_file(path + ".json", format_metrics_json(report));

  if (!opts.dump_embeddings_dir.empty()) {
    fs::create_directories(opts.dump_embeddings_dir);
    write_embedding_snapshot(opts.dump_embeddings_dir + "/users.vaem", EntityKind::kUser, -1,
                             a.fwd.users);
    write_embedding_snapshot(opts.dump_embeddings_dir + "/videos.vaem", EntityKind::kVideo, -1,
                             a.fwd.videos);
    write_embedding_snapshot(opts.dump_embeddings_dir + "/vloggers.vaem", EntityKind::kVlogger, -1,
                             a.fwd.vloggers);
  }
  std::cout << text;
  return kExitOk;
}

int cmd_ablate(const RunConfig& cfg) {
  const Dataset data = load_dataset(cfg.dataset_dir);
  fs::create_directories(cfg.report_dir);
  const std::string log_path = cfg.report_dir + "/ablation_train_log.jsonl";
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw IoError("cannot open for writing: " + log_path);
  const AblationTable table = run_ablation_suite(data, cfg.train, cfg.eval_ks, &log);
  if (!log.flush()) throw IoError("write failure: " + log_path);
  const std::string text = format_ablation_table(table);
  write_text_file(cfg.report_dir + "/ablation.tsv", text);
  std::cout << text;
  return kExitOk;
}

int cmd_recommend(const RunConfig& cfg, const RecommendOptions& opts) {
  if (opts.k < 1) throw ConfigError("recommend: k must be >= 1");
  const Dataset data = load_dataset(cfg.dataset_dir);
  const TrainState state = load_checkpoint(cfg.checkpoint);
  check_checkpoint_shapes(state, data.n_users(), data.n_videos(), data.n_vloggers(),
                          cfg.train.dim);

  std::uint32_t user = 0;
  bool found = false;
  for (std::uint32_t i = 0; i < data.n_users(); ++i) {
    if (data.user_ids[i] == opts.user) {
      user = i;
      found = true;
      break;
    }
  }
  if (!found) throw ValidationError("unknown user id: " + opts.user);

  std::vector<std::uint32_t> exclusion;
  for (const Interaction& it : data.interactions) {
    if (it.user == user && it.split != Split::kTest) exclusion.push_back(it.video);
  }
  std::sort(exclusion.begin(), exclusion.end());

  const TrainConfig ecfg = checkpoint_config(cfg, state);
  const ForwardArtifacts a = build_artifacts(state.params, data, ecfg);
  const Scorer scorer(a.fwd.users, a.fwd.videos, a.fwd.vloggers, state.params.gate, a.g,
                      ecfg.ablation.gate_blending);
  const RankingResult r =
      rank_for_user(scorer, user, exclusion, std::numeric_limits<std::uint32_t>::max());

  std::cout << "# user\t" << opts.user << "\n"
            << "# seed\t" << state.seed << "\n"
            << "# config_digest\t" << hex64(state.config_digest) << "\n"
            << "rank\tvideo\tscore\n";
  const std::size_t top = std::min<std::size_t>(r.order.size(), static_cast<std::size_t>(opts.k));
  for (std::size_t i = 0; i < top; ++i) {
    const std::uint32_t v = r.order[i];
    std::cout << (i + 1) << "\t" << data.video_ids[v] << "\t" << fmt_score(scorer.score(user, v))
              << "\n";
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"vagnn: vlogger-augmented micro-video recommendation"};
  app.fallthrough(true);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed_flag = 0;
  std::string raw_log_flag, dataset_dir_flag, checkpoint_flag, report_dir_flag;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", sets, "override a config entry, key.path=value")->take_all();
  auto* o_seed = app.add_option("--seed", seed_flag, "root random seed");
  auto* o_raw = app.add_option("--raw-log", raw_log_flag, "raw behavior log (TSV)");
  auto* o_data = app.add_option("--dataset-dir", dataset_dir_flag, "processed dataset directory");
  auto* o_ckpt = app.add_option("--checkpoint", checkpoint_flag, "model checkpoint path");
  auto* o_rep = app.add_option("--report-dir", report_dir_flag, "report output directory");

  auto* sub_pre = app.add_subcommand("preprocess", "derive a processed dataset from a raw log");
  auto* sub_synth = app.add_subcommand("synth", "generate the planted synthetic dataset");
  auto* sub_train = app.add_subcommand("train", "train the model and write a checkpoint");

  EvaluateOptions eopts;
  auto* sub_eval = app.add_subcommand("evaluate", "score a checkpoint on a held-out split");
  sub_eval->add_option("--split", eopts.split, "validation or test (default test)");
  sub_eval->add_option("--report", eopts.report_path, "metrics report path");
  sub_eval->add_flag("--json", eopts.json_report, "also write a JSON report");
  sub_eval->add_option("--dump-embeddings", eopts.dump_embeddings_dir,
                       "write final embedding snapshots into this directory");

  auto* sub_ablate = app.add_subcommand("ablate", "train and compare the ablation variants");

  RecommendOptions ropts;
  auto* sub_rec = app.add_subcommand("recommend", "top-K videos for one user");
  sub_rec->add_option("--user", ropts.user, "raw user id")->required();
  sub_rec->add_option("-k,--top-k", ropts.k, "number of videos to return (default 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    apply_env_overrides(cfg);
    for (const std::string& s : sets) apply_set_override(cfg, s);
    if (o_seed->count() > 0) cfg.seed = seed_flag;
    if (o_raw->count() > 0) cfg.raw_log = raw_log_flag;
    if (o_data->count() > 0) cfg.dataset_dir = dataset_dir_flag;
    if (o_ckpt->count() > 0) cfg.checkpoint = checkpoint_flag;
    if (o_rep->count() > 0) cfg.report_dir = report_dir_flag;
    finalize_run_config(cfg);

    if (sub_pre->parsed()) return cmd_preprocess(cfg);
    if (sub_synth->parsed()) return cmd_synth(cfg);
    if (sub_train->parsed()) return cmd_train(cfg);
    if (sub_eval->parsed()) return cmd_evaluate(cfg, eopts);
    if (sub_ablate->parsed()) return cmd_ablate(cfg);
    if (sub_rec->parsed()) return cmd_recommend(cfg, ropts);
    std::cerr << "error: no command given\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace vagnn
