#include "vagnn/ablation.hpp"

#include <cstdio>
#include <sstream>

#include "vagnn/digest.hpp"
#include "vagnn/model.hpp"

namespace vagnn {

std::vector<AblationRow> ablation_variants(const AblationFlags& base) {
  std::vector<AblationRow> rows(6);
  rows[0].name = "full";
  rows[0].description = "full model";
  rows[0].flags = base;
  rows[1].name = "A";
  rows[1].description = "no contrastive loss";
  rows[1].flags = base;
  rows[1].flags.contrastive = false;
  rows[2].name = "B";
  rows[2].description = "no vlogger task";
  rows[2].flags = base;
  rows[2].flags.vlogger_task = false;
  rows[3].name = "C";
  rows[3].description = "no video view";
  rows[3].flags = base;
  rows[3].flags.video_view = false;
  rows[4].name = "D";
  rows[4].description = "no vlogger view";
  rows[4].flags = base;
  rows[4].flags.vlogger_view = false;
  rows[5].name = "E";
  rows[5].description = "no gate blending";
  rows[5].flags = base;
  rows[5].flags.gate_blending = false;
  return rows;
}

MetricsReport evaluate_params(const ModelParams& params, const Dataset& data,
                              const TrainConfig& cfg, Split split, const std::vector<int>& ks) {
  TripartiteGraph g = data.train_graph();
  MetaPathConfig wcfg = cfg.walks;
  wcfg.seed = cfg.seed;
  const AugmentedNeighborhoods aug =
      build_augmented_neighborhoods(g, sample_meta_paths(g, wcfg), wcfg.uvu_in_video_view);
  const ForwardResult fwd =
      forward_model(params, g, aug, cfg.layers, cfg.layer_avg, cfg.ablation);
  const Scorer scorer(fwd.users, fwd.videos, fwd.vloggers, params.gate, g,
                      cfg.ablation.gate_blending);
  MetricsReport r = evaluate(scorer, data, split, ks);
  r.seed = cfg.seed;
  r.config_digest = hex64(cfg.config_digest);
  return r;
}

AblationTable run_ablation_suite(const Dataset& data, const TrainConfig& base_cfg,
                                 const std::vector<int>& ks, std::ostream* log) {
  AblationTable table;
  table.ks = ks;
  table.rows = ablation_variants(base_cfg.ablation);
  for (AblationRow& row : table.rows) {
    TrainConfig cfg = base_cfg;
    cfg.ablation = row.flags;
    if (log) *log << "# variant " << row.name << " (" << row.description << ")\n";
    const TrainResult r = train(data, cfg, log);
    row.best_epoch = r.best_epoch;
    row.best_val_recall = r.best_val_recall;
    row.report = evaluate_params(r.best.params, data, cfg, Split::kTest, ks);
  }
  return table;
}

namespace {

std::string fmt_metric(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10f", x);
  return buf;
}

}  // namespace

std::string format_ablation_table(const AblationTable& t) {
  std::ostringstream os;
  os << "variant\tdescription\tbest_epoch\tval_recall";
  for (int k : t.ks) os << "\trecall@" << k << "\tndcg@" << k;
  os << "\n";
  for (const AblationRow& row : t.rows) {
    os << row.name << "\t" << row.description << "\t" << row.best_epoch << "\t"
       << fmt_metric(row.best_val_recall);
    for (std::size_t i = 0; i < t.ks.size(); ++i) {
      os << "\t" << fmt_metric(row.report.recall[i]) << "\t" << fmt_metric(row.report.ndcg[i]);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace vagnn
