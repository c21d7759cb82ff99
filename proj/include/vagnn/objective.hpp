#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vagnn/matrix.hpp"

namespace vagnn {

struct LossWeights {
  double lambda1 = 5.0;
  double lambda2 = 0.0005;
  double lambda3 = 1e-4;
  double tau = 0.5;
};

double stable_sigmoid(double x);
double softplus(double x);
double cosine(std::span<const double> a, std::span<const double> b);

// Sigmoid clamped to the open interval (0, 1) at f64 granularity.
double gate_from_preactivation(double t);

double score_user_vlogger(std::span<const double> e_u, std::span<const double> e_p);

// w = sigmoid(e_v^T Q e_pv), clamped to the open interval (0, 1) at f64 granularity.
double gate_weight(std::span<const double> e_v, const Matrix& q, std::span<const double> e_pv);

double score_user_video(std::span<const double> e_u, std::span<const double> e_v,
                        std::span<const double> e_pv, const Matrix& q);

// Sum over pairs of -ln sigmoid(pos - neg).
double bpr_loss(std::span<const double> pos_scores, std::span<const double> neg_scores);

// Mean over anchors of -ln( exp(cos(a_i, b_i)/tau) / sum_{j in candidates} exp(cos(a_i, b_j)/tau) ).
double infonce_cross_view(const Matrix& view_a, const Matrix& view_b,
                          const std::vector<std::uint32_t>& anchors,
                          const std::vector<std::uint32_t>& candidates, double tau);

double contrastive_total(double user_cl, double video_cl, double vlogger_cl);

double total_loss(double video_bpr, double vlogger_bpr, double cl, double reg,
                  const LossWeights& w);

}  // namespace vagnn
