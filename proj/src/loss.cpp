#include "omnilabel/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omnilabel/error.hpp"
#include "omnilabel/matching.hpp"

namespace omnilabel {

namespace {

// log(sigmoid(z)) without overflow.
double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double focal_term(double logit, bool positive, double gamma, double alpha) {
  const double p = 1.0 / (1.0 + std::exp(-logit));
  const double ce = positive ? -log_sigmoid(logit) : -log_sigmoid(-logit);
  const double p_t = positive ? p : 1.0 - p;
  const double alpha_t = positive ? alpha : 1.0 - alpha;
  return alpha_t * ce * std::pow(1.0 - p_t, gamma);
}

}  // namespace

LossBreakdown eval_loss(const TeacherPrediction& pred, std::span<const LabeledBox> labels,
                        const LossConfig& cfg) {
  const std::size_t k_count = pred.num_queries();
  const std::size_t c_count = pred.num_classes();
  if (labels.size() > k_count) {
    throw DimensionError(std::to_string(labels.size()) + " labels exceed " +
                         std::to_string(k_count) + " predictions");
  }
  for (const auto& l : labels) {
    if (l.class_id < 0 || static_cast<std::size_t>(l.class_id) >= c_count) {
      throw InputError("label class " + std::to_string(l.class_id) + " outside the prediction's classes");
    }
  }

  // target_class[k] = matched label class, -1 for background.
  std::vector<int> target_class(k_count, -1);
  LossBreakdown out{0.0, 0.0, 0.0, cfg.alpha, cfg.beta};

  if (!labels.empty()) {
    const ScoredPrediction sp = score(pred);
    const auto& boxes = pred.boxes();
    CostMatrix cost(labels.size(), k_count);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i].class_id);
      for (std::size_t k = 0; k < k_count; ++k) {
        cost(i, k) = cfg.class_cost_weight * (1.0 - sp.probs(k, c)) +
                     cfg.lambda_iou * (1.0 - giou(labels[i].box, boxes[k])) +
                     cfg.lambda_l1 * l1_box(labels[i].box, boxes[k]);
      }
    }
    const Assignment assignment = hungarian(cost);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto k = static_cast<std::size_t>(assignment.match[i]);
      target_class[k] = labels[i].class_id;
      out.box += cfg.lambda_iou * (1.0 - giou(labels[i].box, boxes[k])) +
                 cfg.lambda_l1 * l1_box(labels[i].box, boxes[k]);
    }
  }

  const Matrix& logits = pred.logits();
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t c = 0; c < c_count; ++c) {
      out.cls += focal_term(logits(k, c), target_class[k] == static_cast<int>(c), cfg.focal_gamma,
                            cfg.focal_alpha);
    }
  }

  const double norm = static_cast<double>(std::max<std::size_t>(1, labels.size()));
  out.cls /= norm;
  out.box /= norm;
  out.total = cfg.alpha * out.cls + cfg.beta * out.box;
  return out;
}

}  // namespace omnilabel
