#include "vagnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "vagnn/errors.hpp"
#include "vagnn/eval.hpp"
#include "vagnn/propagation.hpp"

namespace vagnn {

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.dim < 1) throw ConfigError("dim must be positive");
  if (cfg.layers < 1) throw ConfigError("layers must be positive");
  if (cfg.lr <= 0.0) throw ConfigError("lr must be positive");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (cfg.negatives < 1) throw ConfigError("negatives must be positive");
  if (cfg.max_epochs < 0) throw ConfigError("max_epochs must be non-negative");
  if (cfg.patience < 1) throw ConfigError("patience must be >= 1");
  if (cfg.init_std < 0.0) throw ConfigError("init_std must be non-negative");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
  if (cfg.eps <= 0.0) throw ConfigError("eps must be positive");
  if (cfg.loss.tau <= 0.0) throw ConfigError("tau must be positive");
  if (cfg.loss.lambda1 < 0.0 || cfg.loss.lambda2 < 0.0 || cfg.loss.lambda3 < 0.0) {
    throw ConfigError("loss weights must be non-negative");
  }
  if (cfg.resample_walks_every < 0) throw ConfigError("resample_walks_every must be >= 0");
  if (cfg.eval_k < 1) throw ConfigError("eval_k must be >= 1");
  cfg.walks.validate();
}

ModelParams init_params(std::size_t n_users, std::size_t n_videos, std::size_t n_vloggers, int dim,
                        double init_std, std::uint64_t seed) {
  if (n_users == 0 || n_videos == 0 || n_vloggers == 0) {
    throw ConfigError("init_params: entity counts must be positive");
  }
  if (dim < 1) throw ConfigError("init_params: dim must be positive");
  std::mt19937_64 rng = make_rng(seed, RngStream::kInit);
  auto fill = [&](Matrix& m) {
    for (double& x : m.data) x = init_std * sample_normal(rng);
  };
  ModelParams p;
  p.users = Matrix(n_users, static_cast<std::size_t>(dim));
  p.videos = Matrix(n_videos, static_cast<std::size_t>(dim));
  p.vloggers = Matrix(n_vloggers, static_cast<std::size_t>(dim));
  p.gate = Matrix(2 * static_cast<std::size_t>(dim), 2 * static_cast<std::size_t>(dim));
  fill(p.users);
  fill(p.videos);
  fill(p.vloggers);
  fill(p.gate);
  return p;
}

std::uint32_t sample_negative(const std::vector<std::uint32_t>& positives_sorted,
                              std::uint32_t n_items, std::mt19937_64& rng) {
  if (positives_sorted.size() >= n_items) {
    throw ValidationError("negative sampling exhausted: every item is a positive");
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const auto cand = static_cast<std::uint32_t>(uniform_below(rng, n_items));
    if (!std::binary_search(positives_sorted.begin(), positives_sorted.end(), cand)) return cand;
  }
  throw ValidationError("negative sampling exhausted after 1000 attempts");
}

namespace {

double layer_avg_div(int layers, LayerAvgDenom denom) {
  if (denom == LayerAvgDenom::kLayersPlusOne) return static_cast<double>(layers + 1);
  if (layers == 0) throw ConfigError("layer_avg_denominator=L requires at least one layer");
  return static_cast<double>(layers);
}

void add_scaled(Matrix& dst, const Matrix& src, double s) {
  require_same_shape(dst, src, "add_scaled");
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += s * src.data[i];
}

Matrix half_cols(const Matrix& m, std::size_t d, bool second) {
  Matrix out(m.rows, d);
  const std::size_t off = second ? d : 0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::memcpy(out.row(r), m.row(r) + off, d * sizeof(double));
  }
  return out;
}

double vec_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void matvec(const Matrix& q, std::span<const double> x, std::vector<double>& y) {
  y.assign(q.rows, 0.0);
  for (std::size_t r = 0; r < q.rows; ++r) y[r] = dot(q.row_span(r), x);
}

void matvec_t(const Matrix& q, std::span<const double> x, std::vector<double>& y) {
  y.assign(q.cols, 0.0);
  for (std::size_t r = 0; r < q.rows; ++r) axpy({y.data(), y.size()}, q.row_span(r), x[r]);
}

struct ScoreCtx {
  std::uint32_t u = 0, v = 0, p = kNoPublisher;
  double y = 0.0, w = 0.0, s1 = 0.0, s2 = 0.0;
  std::vector<double> qep, qtev;  // Q e_p and Q^T e_v
};

ScoreCtx score_video_forward(const ForwardResult& fwd, const ModelParams& params,
                             const TripartiteGraph& g, bool blending, std::uint32_t u,
                             std::uint32_t v) {
  ScoreCtx c;
  c.u = u;
  c.v = v;
  const auto e_u = fwd.users.row_span(u);
  const auto e_v = fwd.videos.row_span(v);
  c.s1 = dot(e_u, e_v);
  if (!blending) {
    c.y = c.s1;
    return c;
  }
  c.p = g.publisher_of(v);
  const auto e_p = fwd.vloggers.row_span(c.p);
  matvec(params.gate, e_p, c.qep);
  matvec_t(params.gate, e_v, c.qtev);
  c.w = gate_from_preactivation(dot(e_v, {c.qep.data(), c.qep.size()}));
  c.s2 = dot(e_u, e_p);
  c.y = c.w * c.s1 + (1.0 - c.w) * c.s2;
  return c;
}

// Adds coeff * d(score)/d(finals) into the final-table gradients.
void score_video_backward(const ScoreCtx& c, double coeff, const ForwardResult& fwd, bool blending,
                          Matrix& dU, Matrix& dV, Matrix& dP, Matrix& dQ) {
  const auto e_u = fwd.users.row_span(c.u);
  const auto e_v = fwd.videos.row_span(c.v);
  if (!blending) {
    axpy(dU.row_span(c.u), e_v, coeff);
    axpy(dV.row_span(c.v), e_u, coeff);
    return;
  }
  const auto e_p = fwd.vloggers.row_span(c.p);
  axpy(dU.row_span(c.u), e_v, coeff * c.w);
  axpy(dU.row_span(c.u), e_p, coeff * (1.0 - c.w));
  const double cw = coeff * (c.s1 - c.s2) * c.w * (1.0 - c.w);
  axpy(dV.row_span(c.v), e_u, coeff * c.w);
  axpy(dV.row_span(c.v), {c.qep.data(), c.qep.size()}, cw);
  axpy(dP.row_span(c.p), e_u, coeff * (1.0 - c.w));
  axpy(dP.row_span(c.p), {c.qtev.data(), c.qtev.size()}, cw);
  for (std::size_t r = 0; r < dQ.rows; ++r) {
    axpy(dQ.row_span(r), e_p, cw * e_v[r]);
  }
}

// Adds g * dcos(a,b)/da into da and g * dcos(a,b)/db into db. Zero norms mean
// the cosine is the constant 0, so nothing flows.
void cosine_backward(std::span<const double> a, std::span<const double> b, double na, double nb,
                     double g, std::span<double> da, std::span<double> db) {
  if (na == 0.0 || nb == 0.0) return;
  const double c = dot(a, b) / (na * nb);
  axpy(da, b, g / (na * nb));
  axpy(da, a, -g * c / (na * na));
  axpy(db, a, g / (na * nb));
  axpy(db, b, -g * c / (nb * nb));
}

// InfoNCE over one entity class. `fin` is the concatenated table; the anchor
// view is columns [0,d) and the paired view columns [d,2d). Returns the raw
// (unweighted) loss; gradient scaled by `weight` goes into dFin when present.
double infonce_class(const Matrix& fin, const std::vector<std::uint32_t>& anchors,
                     const std::vector<std::uint32_t>& candidates, double tau, double weight,
                     Matrix* dFin) {
  if (anchors.empty() || candidates.empty()) return 0.0;
  const std::size_t d = fin.cols / 2;
  const double n_anchor = static_cast<double>(anchors.size());

  std::vector<double> nb(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    nb[k] = vec_norm({fin.row(candidates[k]) + d, d});
  }

  double total = 0.0;
  std::vector<double> logits(candidates.size());
  for (std::uint32_t i : anchors) {
    const std::span<const double> a{fin.row(i), d};
    const double na = vec_norm(a);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const std::span<const double> b{fin.row(candidates[k]) + d, d};
      const double c = (na == 0.0 || nb[k] == 0.0) ? 0.0 : dot(a, b) / (na * nb[k]);
      logits[k] = c / tau;
      max_logit = std::max(max_logit, logits[k]);
    }
    double denom = 0.0;
    for (double s : logits) denom += std::exp(s - max_logit);

    const std::span<const double> bi{fin.row(i) + d, d};
    const double nbi = vec_norm(bi);
    const double cpos = (na == 0.0 || nbi == 0.0) ? 0.0 : dot(a, bi) / (na * nbi);
    total += (max_logit + std::log(denom)) - cpos / tau;

    if (dFin == nullptr) continue;
    const std::span<double> da{dFin->row(i), d};
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double p = std::exp(logits[k] - max_logit) / denom;
      const double g = weight * p / (n_anchor * tau);
      const std::span<const double> b{fin.row(candidates[k]) + d, d};
      cosine_backward(a, b, na, nb[k], g, da, {dFin->row(candidates[k]) + d, d});
    }
    const double gpos = -weight / (n_anchor * tau);
    cosine_backward(a, bi, na, nbi, gpos, da, {dFin->row(i) + d, d});
  }
  return total / n_anchor;
}

std::vector<std::uint32_t> all_indices(std::size_t n) {
  std::vector<std::uint32_t> out(n);
  std::iota(out.begin(), out.end(), 0u);
  return out;
}

void check_grad_finite(const Matrix& m, const char* name) {
  if (!all_finite(m)) throw NumericError(std::string("non-finite gradient for ") + name);
}

void check_loss_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw NumericError(std::string("non-finite ") + name + " loss");
}

}  // namespace

LossBreakdown compute_gradients(const ModelParams& params, const ForwardResult& fwd,
                                const TripartiteGraph& g, const AugmentedNeighborhoods& aug,
                                const std::vector<BprPair>& video_pairs,
                                const std::vector<BprPair>& vlogger_pairs, const TrainConfig& cfg,
                                Gradients* grads) {
  const std::size_t d = params.users.cols;
  const std::size_t n_u = params.users.rows;
  const std::size_t n_v = params.videos.rows;
  const std::size_t n_p = params.vloggers.rows;
  const AblationFlags& ab = cfg.ablation;

  grads->users = Matrix(n_u, d);
  grads->videos = Matrix(n_v, d);
  grads->vloggers = Matrix(n_p, d);
  grads->gate = Matrix(2 * d, 2 * d);

  Matrix dU_fin(n_u, 2 * d), dV_fin(n_v, 2 * d), dP_fin(n_p, 2 * d);
  LossBreakdown out;

  // video-task BPR
  for (const BprPair& pair : video_pairs) {
    ScoreCtx pos = score_video_forward(fwd, params, g, ab.gate_blending, pair.user, pair.pos);
    ScoreCtx neg = score_video_forward(fwd, params, g, ab.gate_blending, pair.user, pair.neg);
    const double delta = pos.y - neg.y;
    out.video_bpr += softplus(-delta);
    const double c = stable_sigmoid(-delta);
    score_video_backward(pos, -c, fwd, ab.gate_blending, dU_fin, dV_fin, dP_fin, grads->gate);
    score_video_backward(neg, c, fwd, ab.gate_blending, dU_fin, dV_fin, dP_fin, grads->gate);
  }

  // vlogger-task BPR
  if (ab.vlogger_task) {
    const double l1 = cfg.loss.lambda1;
    for (const BprPair& pair : vlogger_pairs) {
      const auto e_u = fwd.users.row_span(pair.user);
      const auto e_pos = fwd.vloggers.row_span(pair.pos);
      const auto e_neg = fwd.vloggers.row_span(pair.neg);
      const double delta = dot(e_u, e_pos) - dot(e_u, e_neg);
      out.vlogger_bpr += softplus(-delta);
      const double c = l1 * stable_sigmoid(-delta);
      axpy(dU_fin.row_span(pair.user), e_pos, -c);
      axpy(dU_fin.row_span(pair.user), e_neg, c);
      axpy(dP_fin.row_span(pair.pos), e_u, -c);
      axpy(dP_fin.row_span(pair.neg), e_u, c);
    }
  }

  // cross-view contrastive
  if (ab.contrastive) {
    const double weight = cfg.loss.lambda2 / 3.0;
    std::vector<std::uint32_t> cu, cv, cp;
    if (cfg.contrastive_mode == ContrastiveMode::kFullSet) {
      cu = all_indices(n_u);
      cv = all_indices(n_v);
      cp = all_indices(n_p);
    } else {
      std::set<std::uint32_t> su, sv, sp;
      for (const BprPair& pair : video_pairs) {
        su.insert(pair.user);
        sv.insert(pair.pos);
        sv.insert(pair.neg);
        if (g.has_publisher(pair.pos)) sp.insert(g.publisher_of(pair.pos));
        if (g.has_publisher(pair.neg)) sp.insert(g.publisher_of(pair.neg));
      }
      if (ab.vlogger_task) {
        for (const BprPair& pair : vlogger_pairs) {
          su.insert(pair.user);
          sp.insert(pair.pos);
          sp.insert(pair.neg);
        }
      }
      cu.assign(su.begin(), su.end());
      cv.assign(sv.begin(), sv.end());
      cp.assign(sp.begin(), sp.end());
    }
    const double cl_u = infonce_class(fwd.users, cu, cu, cfg.loss.tau, weight, &dU_fin);
    const double cl_v = infonce_class(fwd.videos, cv, cv, cfg.loss.tau, weight, &dV_fin);
    const double cl_p = infonce_class(fwd.vloggers, cp, cp, cfg.loss.tau, weight, &dP_fin);
    out.cl = contrastive_total(cl_u, cl_v, cl_p);
  }

  // batchwise L2 regularization over base embeddings plus the gate matrix
  {
    const double l3 = cfg.loss.lambda3;
    std::set<std::uint32_t> ru, rv, rp;
    for (const BprPair& pair : video_pairs) {
      ru.insert(pair.user);
      rv.insert(pair.pos);
      rv.insert(pair.neg);
      if (ab.gate_blending) {
        rp.insert(g.publisher_of(pair.pos));
        rp.insert(g.publisher_of(pair.neg));
      }
    }
    if (ab.vlogger_task) {
      for (const BprPair& pair : vlogger_pairs) {
        ru.insert(pair.user);
        rp.insert(pair.pos);
        rp.insert(pair.neg);
      }
    }
    auto reg_rows = [&](const std::set<std::uint32_t>& idx, const Matrix& base, Matrix& grad) {
      for (std::uint32_t i : idx) {
        const auto row = base.row_span(i);
        out.reg += dot(row, row);
        axpy(grad.row_span(i), row, 2.0 * l3);
      }
    };
    reg_rows(ru, params.users, grads->users);
    reg_rows(rv, params.videos, grads->videos);
    reg_rows(rp, params.vloggers, grads->vloggers);
    if (ab.gate_blending) {
      for (std::size_t i = 0; i < params.gate.data.size(); ++i) {
        out.reg += params.gate.data[i] * params.gate.data[i];
        grads->gate.data[i] += 2.0 * l3 * params.gate.data[i];
      }
    }
  }

  // video view: layer averaging, vlogger aggregation, reversed propagation
  {
    Matrix du = half_cols(dU_fin, d, false);
    Matrix dv = half_cols(dV_fin, d, false);
    Matrix dp = half_cols(dP_fin, d, false);
    if (ab.video_view) {
      const double inv = 1.0 / layer_avg_div(cfg.layers, cfg.layer_avg);
      Matrix seed_u(n_u, d), seed_v(n_v, d);
      add_scaled(seed_u, du, inv);
      add_scaled(seed_v, dv, inv);
      for (std::uint32_t p = 0; p < n_p; ++p) {
        const auto& vids = g.videos_of_vlogger(p);
        if (vids.empty()) continue;
        const double s = inv / static_cast<double>(vids.size());
        for (std::uint32_t v : vids) axpy(seed_v.row_span(v), dp.row_span(p), s);
      }
      Matrix tu = seed_u, tv = seed_v;
      for (int l = 0; l < cfg.layers; ++l) {
        Matrix su, sv;
        video_view_step(tu, tv, aug, su, sv);
        add_scaled(su, seed_u, 1.0);
        add_scaled(sv, seed_v, 1.0);
        tu = std::move(su);
        tv = std::move(sv);
      }
      add_scaled(grads->users, tu, 1.0);
      add_scaled(grads->videos, tv, 1.0);
    } else {
      add_scaled(grads->users, du, 1.0);
      add_scaled(grads->videos, dv, 1.0);
      add_scaled(grads->vloggers, dp, 1.0);
    }
  }

  // vlogger view: layer averaging, video aggregation, reversed propagation
  {
    Matrix du = half_cols(dU_fin, d, true);
    Matrix dv = half_cols(dV_fin, d, true);
    Matrix dp = half_cols(dP_fin, d, true);
    if (ab.vlogger_view) {
      const double inv = 1.0 / layer_avg_div(cfg.layers, cfg.layer_avg);
      Matrix seed_u(n_u, d), seed_p(n_p, d);
      add_scaled(seed_u, du, inv);
      add_scaled(seed_p, dp, inv);
      for (std::uint32_t v = 0; v < n_v; ++v) {
        const auto& us = g.users_of_video(v);
        if (us.empty()) continue;
        const double s = inv / static_cast<double>(us.size());
        for (std::uint32_t u : us) axpy(seed_u.row_span(u), dv.row_span(v), s);
      }
      Matrix tu = seed_u, tp = seed_p;
      for (int l = 0; l < cfg.layers; ++l) {
        Matrix su, sp;
        vlogger_view_step(tu, tp, aug, su, sp);
        add_scaled(su, seed_u, 1.0);
        add_scaled(sp, seed_p, 1.0);
        tu = std::move(su);
        tp = std::move(sp);
      }
      add_scaled(grads->users, tu, 1.0);
      add_scaled(grads->vloggers, tp, 1.0);
    } else {
      add_scaled(grads->users, du, 1.0);
      add_scaled(grads->videos, dv, 1.0);
      add_scaled(grads->vloggers, dp, 1.0);
    }
  }

  out.total = total_loss(out.video_bpr, out.vlogger_bpr, out.cl, out.reg, cfg.loss);
  check_loss_finite(out.video_bpr, "video BPR");
  check_loss_finite(out.vlogger_bpr, "vlogger BPR");
  check_loss_finite(out.cl, "contrastive");
  check_loss_finite(out.reg, "regularization");
  check_grad_finite(grads->users, "users");
  check_grad_finite(grads->videos, "videos");
  check_grad_finite(grads->vloggers, "vloggers");
  check_grad_finite(grads->gate, "gate");
  return out;
}

AdamState make_adam_state(const ModelParams& params) {
  AdamState s;
  auto init = [](AdamMoments& m, const Matrix& t) {
    m.m = Matrix(t.rows, t.cols);
    m.v = Matrix(t.rows, t.cols);
  };
  init(s.users, params.users);
  init(s.videos, params.videos);
  init(s.vloggers, params.vloggers);
  init(s.gate, params.gate);
  return s;
}

void adam_update(Matrix& param, const Matrix& grad, AdamMoments& mom, double lr, double beta1,
                 double beta2, double eps, std::int64_t step) {
  require_same_shape(param, grad, "adam_update");
  require_same_shape(param, mom.m, "adam_update moments");
  if (step < 1) throw ConfigError("adam_update: step must be >= 1");
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.data.size(); ++i) {
    const double g = grad.data[i];
    mom.m.data[i] = beta1 * mom.m.data[i] + (1.0 - beta1) * g;
    mom.v.data[i] = beta2 * mom.v.data[i] + (1.0 - beta2) * g * g;
    const double mhat = mom.m.data[i] / bc1;
    const double vhat = mom.v.data[i] / bc2;
    param.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg) {
  ++state.step;
  adam_update(params.users, grads.users, state.users, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps,
              state.step);
  adam_update(params.videos, grads.videos, state.videos, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps,
              state.step);
  adam_update(params.vloggers, grads.vloggers, state.vloggers, cfg.lr, cfg.beta1, cfg.beta2,
              cfg.eps, state.step);
  adam_update(params.gate, grads.gate, state.gate, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps,
              state.step);
}

namespace {

std::string fmt_loss(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

void log_epoch(std::ostream* log, const EpochLog& e, int eval_k) {
  if (!log) return;
  *log << "{\"epoch\":" << e.epoch << ",\"video_bpr\":" << fmt_loss(e.loss.video_bpr)
       << ",\"vlogger_bpr\":" << fmt_loss(e.loss.vlogger_bpr) << ",\"cl\":" << fmt_loss(e.loss.cl)
       << ",\"reg\":" << fmt_loss(e.loss.reg) << ",\"total\":" << fmt_loss(e.loss.total)
       << ",\"val_recall@" << eval_k << "\":" << fmt_loss(e.val_recall)
       << ",\"improved\":" << (e.improved ? "true" : "false") << "}\n";
}

}  // namespace

TrainResult train(const Dataset& data, const TrainConfig& cfg, std::ostream* log) {
  validate_train_config(cfg);
  TripartiteGraph g = data.train_graph();

  MetaPathConfig wcfg = cfg.walks;
  wcfg.seed = cfg.seed;
  AugmentedNeighborhoods aug =
      build_augmented_neighborhoods(g, sample_meta_paths(g, wcfg), wcfg.uvu_in_video_view);

  ModelParams params =
      init_params(data.n_users(), data.n_videos(), data.n_vloggers(), cfg.dim, cfg.init_std,
                  cfg.seed);
  AdamState opt = make_adam_state(params);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> train_pos;
  for (const Interaction& it : data.interactions) {
    if (it.split == Split::kTrain) train_pos.emplace_back(it.user, it.video);
  }
  std::sort(train_pos.begin(), train_pos.end());
  if (train_pos.empty()) throw ValidationError("train: no training-split interactions");

  std::mt19937_64 rng_neg = make_rng(cfg.seed, RngStream::kNegatives);
  std::mt19937_64 rng_shuffle = make_rng(cfg.seed, RngStream::kShuffle);
  auto shuffle_idx = [&](std::vector<std::size_t>& idx) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(uniform_below(rng_shuffle, i))]);
    }
  };

  std::vector<std::size_t> order(train_pos.size());
  std::iota(order.begin(), order.end(), 0u);
  const bool has_up = cfg.ablation.vlogger_task && !data.up_edges.empty();
  std::vector<std::size_t> up_order(data.up_edges.size());
  std::iota(up_order.begin(), up_order.end(), 0u);
  std::size_t up_cursor = up_order.size();  // forces an initial shuffle

  TrainResult result;
  result.best.params = params;
  result.best.opt = opt;
  result.best.epoch = -1;
  result.best.seed = cfg.seed;
  result.best.config_digest = cfg.config_digest;

  double best_val = -1.0;
  int since = 0;
  Gradients grads;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.resample_walks_every > 0 && epoch > 0 && epoch % cfg.resample_walks_every == 0) {
      MetaPathConfig rcfg = wcfg;
      rcfg.seed = cfg.seed ^ splitmix64(static_cast<std::uint64_t>(epoch / cfg.resample_walks_every));
      aug = build_augmented_neighborhoods(g, sample_meta_paths(g, rcfg), rcfg.uvu_in_video_view);
    }

    shuffle_idx(order);
    LossBreakdown sums;
    int n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<BprPair> vpairs;
      vpairs.reserve((end - start) * static_cast<std::size_t>(cfg.negatives));
      for (std::size_t i = start; i < end; ++i) {
        const auto [u, pos] = train_pos[order[i]];
        for (int k = 0; k < cfg.negatives; ++k) {
          vpairs.push_back(BprPair{u, pos,
                                   sample_negative(g.videos_of_user(u),
                                                   static_cast<std::uint32_t>(data.n_videos()),
                                                   rng_neg)});
        }
      }
      std::vector<BprPair> ppairs;
      if (has_up) {
        ppairs.reserve(vpairs.size());
        for (std::size_t i = start; i < end; ++i) {
          if (up_cursor == up_order.size()) {
            shuffle_idx(up_order);
            up_cursor = 0;
          }
          const auto [u, pos] = data.up_edges[up_order[up_cursor++]];
          for (int k = 0; k < cfg.negatives; ++k) {
            ppairs.push_back(BprPair{u, pos,
                                     sample_negative(g.vloggers_of_user(u),
                                                     static_cast<std::uint32_t>(data.n_vloggers()),
                                                     rng_neg)});
          }
        }
      }

      try {
        const ForwardResult fwd =
            forward_model(params, g, aug, cfg.layers, cfg.layer_avg, cfg.ablation);
        const LossBreakdown b =
            compute_gradients(params, fwd, g, aug, vpairs, ppairs, cfg, &grads);
        adam_step(params, grads, opt, cfg);
        sums.video_bpr += b.video_bpr;
        sums.vlogger_bpr += b.vlogger_bpr;
        sums.cl += b.cl;
        sums.reg += b.reg;
        sums.total += b.total;
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(n_batches) + ")");
      }
      ++n_batches;
    }

    EpochLog elog;
    elog.epoch = epoch;
    const double inv_b = 1.0 / static_cast<double>(n_batches);
    elog.loss.video_bpr = sums.video_bpr * inv_b;
    elog.loss.vlogger_bpr = sums.vlogger_bpr * inv_b;
    elog.loss.cl = sums.cl * inv_b;
    elog.loss.reg = sums.reg * inv_b;
    elog.loss.total = sums.total * inv_b;

    const ForwardResult fwd =
        forward_model(params, g, aug, cfg.layers, cfg.layer_avg, cfg.ablation);
    const Scorer scorer(fwd.users, fwd.videos, fwd.vloggers, params.gate, g,
                        cfg.ablation.gate_blending);
    elog.val_recall = evaluate(scorer, data, Split::kVal, {cfg.eval_k}).recall[0];
    elog.improved = elog.val_recall > best_val;
    if (elog.improved) {
      best_val = elog.val_recall;
      since = 0;
      result.best.params = params;
      result.best.opt = opt;
      result.best.epoch = epoch;
      result.best.best_val_recall = best_val;
      result.best_epoch = epoch;
    } else {
      ++since;
    }
    result.history.push_back(elog);
    log_epoch(log, elog, cfg.eval_k);
    if (since >= cfg.patience) break;
  }

  result.best_val_recall = std::max(best_val, 0.0);
  return result;
}

namespace {

constexpr char kCkptMagic[4] = {'V', 'A', 'C', 'K'};
constexpr std::uint32_t kCkptVersion = 1;

template <typename T>
void write_pod(std::ofstream& f, T value) {
  f.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f, const std::string& path) {
  T value;
  f.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!f) throw IoError("truncated checkpoint file: " + path);
  return value;
}

void write_tensor(std::ofstream& f, const Matrix& m) {
  f.write(reinterpret_cast<const char*>(m.data.data()),
          static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

void read_tensor(std::ifstream& f, Matrix& m, std::size_t rows, std::size_t cols,
                 const std::string& path) {
  m = Matrix(rows, cols);
  f.read(reinterpret_cast<char*>(m.data.data()),
         static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!f) throw IoError("truncated checkpoint file: " + path);
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainState& state) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint for writing: " + path);
  f.write(kCkptMagic, 4);
  write_pod(f, kCkptVersion);
  write_pod(f, state.seed);
  write_pod(f, state.config_digest);
  write_pod(f, static_cast<std::int32_t>(state.epoch));
  write_pod(f, state.best_val_recall);
  write_pod(f, state.opt.step);
  write_pod(f, static_cast<std::uint64_t>(state.params.users.rows));
  write_pod(f, static_cast<std::uint64_t>(state.params.videos.rows));
  write_pod(f, static_cast<std::uint64_t>(state.params.vloggers.rows));
  write_pod(f, static_cast<std::uint64_t>(state.params.users.cols));
  write_tensor(f, state.params.users);
  write_tensor(f, state.params.videos);
  write_tensor(f, state.params.vloggers);
  write_tensor(f, state.params.gate);
  for (const AdamMoments* m : {&state.opt.users, &state.opt.videos, &state.opt.vloggers,
                               &state.opt.gate}) {
    write_tensor(f, m->m);
    write_tensor(f, m->v);
  }
  if (!f.flush()) throw IoError("write failure on checkpoint: " + path);
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kCkptMagic, 4) != 0) {
    throw IoError("not a checkpoint file: " + path);
  }
  const auto version = read_pod<std::uint32_t>(f, path);
  if (version != kCkptVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  TrainState state;
  state.seed = read_pod<std::uint64_t>(f, path);
  state.config_digest = read_pod<std::uint64_t>(f, path);
  state.epoch = read_pod<std::int32_t>(f, path);
  state.best_val_recall = read_pod<double>(f, path);
  state.opt.step = read_pod<std::int64_t>(f, path);
  const auto n_u = read_pod<std::uint64_t>(f, path);
  const auto n_v = read_pod<std::uint64_t>(f, path);
  const auto n_p = read_pod<std::uint64_t>(f, path);
  const auto dim = read_pod<std::uint64_t>(f, path);
  read_tensor(f, state.params.users, n_u, dim, path);
  read_tensor(f, state.params.videos, n_v, dim, path);
  read_tensor(f, state.params.vloggers, n_p, dim, path);
  read_tensor(f, state.params.gate, 2 * dim, 2 * dim, path);
  for (AdamMoments* m : {&state.opt.users, &state.opt.videos, &state.opt.vloggers,
                         &state.opt.gate}) {
    const Matrix& shape = (m == &state.opt.users)      ? state.params.users
                          : (m == &state.opt.videos)   ? state.params.videos
                          : (m == &state.opt.vloggers) ? state.params.vloggers
                                                       : state.params.gate;
    read_tensor(f, m->m, shape.rows, shape.cols, path);
    read_tensor(f, m->v, shape.rows, shape.cols, path);
  }
  return state;
}

void check_checkpoint_shapes(const TrainState& state, std::size_t n_users, std::size_t n_videos,
                             std::size_t n_vloggers, int dim) {
  if (state.params.users.cols != static_cast<std::size_t>(dim)) {
    throw ShapeError("checkpoint embedding dimension " + std::to_string(state.params.users.cols) +
                     " does not match configured dimension " + std::to_string(dim));
  }
  auto check_rows = [](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      throw ShapeError(std::string("checkpoint has ") + std::to_string(got) + " " + what +
                       " but the dataset has " + std::to_string(want));
    }
  };
  check_rows(state.params.users.rows, n_users, "users");
  check_rows(state.params.videos.rows, n_videos, "videos");
  check_rows(state.params.vloggers.rows, n_vloggers, "vloggers");
}

}  // namespace vagnn
