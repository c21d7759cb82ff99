#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <limits>
#include <sstream>

#include "vagnn/ablation.hpp"
#include "vagnn/data.hpp"
#include "vagnn/errors.hpp"
#include "vagnn/eval.hpp"
#include "vagnn/model.hpp"
#include "vagnn/training.hpp"

namespace py = pybind11;

namespace {

using namespace vagnn;

// A trained model plus the settings needed to rebuild its forward pass.
struct PyModel {
  TrainState state;
  TrainConfig cfg;
  std::vector<EpochLog> history;
};

TrainConfig make_train_config(int dim, int layers, double lr, int batch_size, int negatives,
                              int max_epochs, int patience, std::uint64_t seed, double init_std,
                              double lambda1, double lambda2, double lambda3, double tau,
                              int eval_k, std::uint32_t walks_per_user,
                              std::uint32_t vlogger_view_walks_per_user, bool contrastive,
                              bool vlogger_task, bool video_view, bool vlogger_view,
                              bool gate_blending) {
  TrainConfig cfg;
  cfg.dim = dim;
  cfg.layers = layers;
  cfg.lr = lr;
  cfg.batch_size = batch_size;
  cfg.negatives = negatives;
  cfg.max_epochs = max_epochs;
  cfg.patience = patience;
  cfg.seed = seed;
  cfg.init_std = init_std;
  cfg.loss.lambda1 = lambda1;
  cfg.loss.lambda2 = lambda2;
  cfg.loss.lambda3 = lambda3;
  cfg.loss.tau = tau;
  cfg.eval_k = eval_k;
  cfg.walks.walks_per_user = walks_per_user;
  cfg.walks.vlogger_view_walks_per_user = vlogger_view_walks_per_user;
  cfg.ablation.contrastive = contrastive;
  cfg.ablation.vlogger_task = vlogger_task;
  cfg.ablation.video_view = video_view;
  cfg.ablation.vlogger_view = vlogger_view;
  cfg.ablation.gate_blending = gate_blending;
  return cfg;
}

py::dict report_to_dict(const MetricsReport& r) {
  py::dict d;
  d["split"] = r.split;
  d["evaluated_users"] = r.evaluated_users;
  d["seed"] = r.seed;
  d["config_digest"] = r.config_digest;
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    d[py::str("recall@" + std::to_string(r.ks[i]))] = r.recall[i];
    d[py::str("ndcg@" + std::to_string(r.ks[i]))] = r.ndcg[i];
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "vlogger-augmented micro-video recommendation core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n_users", &Dataset::n_users)
      .def_property_readonly("n_videos", &Dataset::n_videos)
      .def_property_readonly("n_vloggers", &Dataset::n_vloggers)
      .def_property_readonly("n_interactions",
                             [](const Dataset& d) { return d.interactions.size(); })
      .def_property_readonly("n_user_vlogger_edges",
                             [](const Dataset& d) { return d.up_edges.size(); })
      .def_property_readonly("user_ids", [](const Dataset& d) { return d.user_ids; })
      .def_property_readonly("video_ids", [](const Dataset& d) { return d.video_ids; })
      .def_property_readonly("vlogger_ids", [](const Dataset& d) { return d.vlogger_ids; })
      .def("save", [](const Dataset& d, const std::string& dir) { save_dataset(d, dir); },
           py::arg("dir"))
      .def_static("load", &load_dataset, py::arg("dir"));

  m.def(
      "generate_synthetic",
      [](std::uint32_t n_users, std::uint32_t n_vloggers, std::uint32_t videos_per_vlogger,
         double affinity, double noise, std::uint32_t interactions_per_user,
         std::uint32_t preferred_per_user, std::uint64_t seed) {
        SyntheticConfig cfg;
        cfg.n_users = n_users;
        cfg.n_vloggers = n_vloggers;
        cfg.videos_per_vlogger = videos_per_vlogger;
        cfg.affinity = affinity;
        cfg.noise = noise;
        cfg.interactions_per_user = interactions_per_user;
        cfg.preferred_per_user = preferred_per_user;
        cfg.seed = seed;
        return generate_synthetic(cfg);
      },
      py::arg("n_users") = 500, py::arg("n_vloggers") = 40, py::arg("videos_per_vlogger") = 25,
      py::arg("affinity") = 0.9, py::arg("noise") = 0.0, py::arg("interactions_per_user") = 40,
      py::arg("preferred_per_user") = 6, py::arg("seed") = 0);

  m.def(
      "preprocess",
      [](const std::string& raw_log, double progress_threshold, double time_threshold_secs,
         int min_user_interactions, int min_video_interactions, int min_vlogger_videos,
         int uvlogger_min_videos, int uvlogger_min_interactions) {
        PositiveRuleConfig rules;
        rules.progress_threshold = progress_threshold;
        rules.time_threshold_secs = time_threshold_secs;
        rules.min_user_interactions = min_user_interactions;
        rules.min_video_interactions = min_video_interactions;
        rules.min_vlogger_videos = min_vlogger_videos;
        rules.uvlogger_min_videos = uvlogger_min_videos;
        rules.uvlogger_min_interactions = uvlogger_min_interactions;
        const auto records = read_raw_log(raw_log);
        const auto positives = derive_video_positives(records, rules);
        const auto publishing = derive_publishing(records);
        const FilteredData filtered = filter_graph(positives, publishing, rules);
        const auto vlogger_pos = derive_vlogger_positives(records, filtered, rules);
        return make_dataset(filtered, vlogger_pos);
      },
      py::arg("raw_log"), py::arg("progress_threshold") = 1.5,
      py::arg("time_threshold_secs") = 60.0, py::arg("min_user_interactions") = 5,
      py::arg("min_video_interactions") = 5, py::arg("min_vlogger_videos") = 3,
      py::arg("uvlogger_min_videos") = 2, py::arg("uvlogger_min_interactions") = 5);

  py::class_<PyModel>(m, "Model")
      .def_property_readonly("best_epoch", [](const PyModel& s) { return s.state.epoch; })
      .def_property_readonly("best_val_recall",
                             [](const PyModel& s) { return s.state.best_val_recall; })
      .def_property_readonly("seed", [](const PyModel& s) { return s.state.seed; })
      .def_property_readonly("history",
                             [](const PyModel& s) {
                               py::list out;
                               for (const EpochLog& e : s.history) {
                                 py::dict d;
                                 d["epoch"] = e.epoch;
                                 d["total"] = e.loss.total;
                                 d["video_bpr"] = e.loss.video_bpr;
                                 d["vlogger_bpr"] = e.loss.vlogger_bpr;
                                 d["cl"] = e.loss.cl;
                                 d["reg"] = e.loss.reg;
                                 d["val_recall"] = e.val_recall;
                                 d["improved"] = e.improved;
                                 out.append(d);
                               }
                               return out;
                             })
      .def("save", [](const PyModel& s, const std::string& path) { save_checkpoint(path, s.state); },
           py::arg("path"));

  m.def(
      "train",
      [](const Dataset& data, int dim, int layers, double lr, int batch_size, int negatives,
         int max_epochs, int patience, std::uint64_t seed, double init_std, double lambda1,
         double lambda2, double lambda3, double tau, int eval_k, std::uint32_t walks_per_user,
         std::uint32_t vlogger_view_walks_per_user, bool contrastive, bool vlogger_task,
         bool video_view, bool vlogger_view, bool gate_blending) {
        const TrainConfig cfg = make_train_config(
            dim, layers, lr, batch_size, negatives, max_epochs, patience, seed, init_std, lambda1,
            lambda2, lambda3, tau, eval_k, walks_per_user, vlogger_view_walks_per_user,
            contrastive, vlogger_task, video_view, vlogger_view, gate_blending);
        PyModel out;
        out.cfg = cfg;
        TrainResult r = train(data, cfg);
        out.state = std::move(r.best);
        out.history = std::move(r.history);
        return out;
      },
      py::arg("data"), py::arg("dim") = 64, py::arg("layers") = 3, py::arg("lr") = 1e-3,
      py::arg("batch_size") = 4096, py::arg("negatives") = 1, py::arg("max_epochs") = 100,
      py::arg("patience") = 10, py::arg("seed") = 0, py::arg("init_std") = 0.1,
      py::arg("lambda1") = 5.0, py::arg("lambda2") = 5e-4, py::arg("lambda3") = 1e-4,
      py::arg("tau") = 0.5, py::arg("eval_k") = 10, py::arg("walks_per_user") = 10,
      py::arg("vlogger_view_walks_per_user") = 10, py::arg("contrastive") = true,
      py::arg("vlogger_task") = true, py::arg("video_view") = true, py::arg("vlogger_view") = true,
      py::arg("gate_blending") = true);

  m.def(
      "evaluate",
      [](const PyModel& model, const Dataset& data, const std::string& split,
         const std::vector<int>& ks) {
        return report_to_dict(
            evaluate_params(model.state.params, data, model.cfg, parse_split(split), ks));
      },
      py::arg("model"), py::arg("data"), py::arg("split") = "test",
      py::arg("ks") = std::vector<int>{10, 20, 50});

  m.def(
      "recommend",
      [](const PyModel& model, const Dataset& data, const std::string& user, int k) {
        if (k < 1) throw ConfigError("recommend: k must be >= 1");
        std::uint32_t u = 0;
        bool found = false;
        for (std::uint32_t i = 0; i < data.n_users(); ++i) {
          if (data.user_ids[i] == user) {
            u = i;
            found = true;
            break;
          }
        }
        if (!found) throw ValidationError("unknown user id: " + user);
        std::vector<std::uint32_t> exclusion;
        for (const Interaction& it : data.interactions) {
          if (it.user == u && it.split != Split::kTest) exclusion.push_back(it.video);
        }
        std::sort(exclusion.begin(), exclusion.end());

        const TripartiteGraph g = data.train_graph();
        MetaPathConfig wcfg = model.cfg.walks;
        wcfg.seed = model.cfg.seed;
        const AugmentedNeighborhoods aug =
            build_augmented_neighborhoods(g, sample_meta_paths(g, wcfg), wcfg.uvu_in_video_view);
        const ForwardResult fwd = forward_model(model.state.params, g, aug, model.cfg.layers,
                                                model.cfg.layer_avg, model.cfg.ablation);
        const Scorer scorer(fwd.users, fwd.videos, fwd.vloggers, model.state.params.gate, g,
                            model.cfg.ablation.gate_blending);
        const RankingResult r =
            rank_for_user(scorer, u, exclusion, std::numeric_limits<std::uint32_t>::max());
        py::list out;
        const std::size_t top = std::min<std::size_t>(r.order.size(), static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < top; ++i) {
          const std::uint32_t v = r.order[i];
          out.append(py::make_tuple(data.video_ids[v], scorer.score(u, v)));
        }
        return out;
      },
      py::arg("model"), py::arg("data"), py::arg("user"), py::arg("k") = 10);
}
