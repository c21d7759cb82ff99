#include "vagnn/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vagnn/errors.hpp"

namespace vagnn {

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine: length mismatch");
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num / (std::sqrt(na) * std::sqrt(nb));
}

double score_user_vlogger(std::span<const double> e_u, std::span<const double> e_p) {
  return dot(e_u, e_p);
}

double gate_from_preactivation(double t) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(stable_sigmoid(t), lo, hi);
}

double gate_weight(std::span<const double> e_v, const Matrix& q, std::span<const double> e_pv) {
  if (q.rows != e_v.size() || q.cols != e_pv.size()) {
    throw ShapeError("gate_weight: gate matrix shape does not match embedding widths");
  }
  double t = 0.0;
  for (std::size_t r = 0; r < q.rows; ++r) {
    double acc = 0.0;
    const double* qr = q.row(r);
    for (std::size_t c = 0; c < q.cols; ++c) acc += qr[c] * e_pv[c];
    t += e_v[r] * acc;
  }
  return gate_from_preactivation(t);
}

double score_user_video(std::span<const double> e_u, std::span<const double> e_v,
                        std::span<const double> e_pv, const Matrix& q) {
  const double w = gate_weight(e_v, q, e_pv);
  return w * dot(e_u, e_v) + (1.0 - w) * dot(e_u, e_pv);
}

double bpr_loss(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.size() != neg_scores.size()) {
    throw ShapeError("bpr_loss: positive and negative score counts differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pos_scores.size(); ++i) {
    total += softplus(neg_scores[i] - pos_scores[i]);
  }
  return total;
}

double infonce_cross_view(const Matrix& view_a, const Matrix& view_b,
                          const std::vector<std::uint32_t>& anchors,
                          const std::vector<std::uint32_t>& candidates, double tau) {
  require_same_shape(view_a, view_b, "infonce_cross_view");
  if (tau <= 0.0) throw ConfigError("infonce temperature must be positive");
  if (anchors.empty() || candidates.empty()) return 0.0;

  std::vector<double> logits(candidates.size());
  double total = 0.0;
  for (std::uint32_t i : anchors) {
    if (i >= view_a.rows) throw ShapeError("infonce_cross_view: anchor index out of range");
    const auto a = view_a.row_span(i);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const std::uint32_t j = candidates[k];
      if (j >= view_b.rows) throw ShapeError("infonce_cross_view: candidate index out of range");
      logits[k] = cosine(a, view_b.row_span(j)) / tau;
      max_logit = std::max(max_logit, logits[k]);
    }
    double denom = 0.0;
    for (double s : logits) denom += std::exp(s - max_logit);
    const double pos = cosine(a, view_b.row_span(i)) / tau;
    total += (max_logit + std::log(denom)) - pos;
  }
  return total / static_cast<double>(anchors.size());
}

double contrastive_total(double user_cl, double video_cl, double vlogger_cl) {
  return (user_cl + video_cl + vlogger_cl) / 3.0;
}

double total_loss(double video_bpr, double vlogger_bpr, double cl, double reg,
                  const LossWeights& w) {
  return video_bpr + w.lambda1 * vlogger_bpr + w.lambda2 * cl + w.lambda3 * reg;
}

}  // namespace vagnn
