#pragma once

#include <span>

#include "omnilabel/annotation.hpp"
#include "omnilabel/prediction.hpp"

namespace omnilabel {

struct LossConfig {
  double alpha = 2.0;              // classification weight in the total
  double beta = 5.0;               // box weight in the total
  double focal_gamma = 2.0;        // focusing parameter
  double focal_alpha = 0.25;       // positive/negative balance
  double class_cost_weight = 2.0;  // matching: weight of 1 - p_k^c
  double lambda_iou = 2.0;         // matching and box loss: GIoU weight
  double lambda_l1 = 5.0;          // matching and box loss: L1 weight
};

struct LossBreakdown {
  double cls = 0.0;
  double box = 0.0;
  double total = 0.0;  // alpha * cls + beta * box
  double alpha = 2.0;
  double beta = 5.0;
};

/// Single-image detection loss under set matching.
///
/// Labels are Hungarian-matched to queries with cost
/// class_cost_weight * (1 - p_k^c) + lambda_iou * (1 - giou) + lambda_l1 * l1.
/// cls is the sigmoid focal loss over all K x C logits (matched queries carry a
/// one-hot target, the rest are background), box sums
/// lambda_iou * (1 - giou) + lambda_l1 * l1 over matched pairs; both are
/// divided by max(1, number of labels). Throws DimensionError if labels outnumber queries.
LossBreakdown eval_loss(const TeacherPrediction& pred, std::span<const LabeledBox> labels,
                        const LossConfig& cfg = {});

}  // namespace omnilabel
