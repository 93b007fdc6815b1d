#pragma once

#include <span>
#include <string>
#include <vector>

#include "omnilabel/annotation.hpp"
#include "omnilabel/matching.hpp"
#include "omnilabel/prediction.hpp"

namespace omnilabel {

enum class FilterStrategy { unified, simple };

struct FilterConfig {
  double tau = 0.7;         // confidence threshold
  double gamma = 0.5;       // weight of the tag term when points carry classes
  double lambda_iou = 2.0;  // GIoU weight in the box cost
  double lambda_l1 = 5.0;   // L1 weight in the box cost
  FilterStrategy strategy = FilterStrategy::unified;
  bool drop_infeasible = false;  // discard matches that landed on an infeasible entry

  // Throws InputError for tau outside (0, 1), gamma outside [0, 1] or negative weights.
  void validate() const;
};

struct PseudoLabel {
  BoundingBox box;
  ClassId class_id;
  double score;          // probability of class_id at the source query
  int source_query;      // teacher query index
  int gt_index;          // omni-label row it was matched to; -1 without annotation
  double matched_cost;   // entry of the matching cost matrix, 0 without annotation
  bool infeasible;       // matched entry is the infeasible sentinel
};

struct PseudoLabelSet {
  std::vector<PseudoLabel> items;
  std::vector<std::string> warnings;
};

// Keeps every query whose confidence is strictly above cfg.tau.
PseudoLabelSet filter_none(const ScoredPrediction& sp, std::span<const BoundingBox> boxes,
                           const FilterConfig& cfg);

// n_j = max(1, |{k : p_k^{c_j} > tau}|) for each tag.
std::vector<int> predict_counts(const ScoredPrediction& sp, std::span<const ClassId> tags, double tau);

// Row i = class expanded_tags[i]; entry (i, k) = 1 - p_k^{c_i}.
CostMatrix tag_cost(const ScoredPrediction& sp, std::span<const ClassId> expanded_tags);

// (d + e) where the point lies inside the predicted box, kInfeasibleCost
// otherwise. d is the center distance min-max normalized over all G x K
// pairs (0 when all distances are equal); e = 1 - s_k.
CostMatrix point_cost(const ScoredPrediction& sp, std::span<const BoundingBox> boxes,
                      std::span<const Point2D> points);

// gamma * tag + (1 - gamma) * point; infeasible entries stay kInfeasibleCost.
CostMatrix point_tag_cost(const ScoredPrediction& sp, std::span<const BoundingBox> boxes,
                          std::span<const LabeledPoint> pairs, double gamma);

// lambda_iou * (1 - giou) + lambda_l1 * l1, ground truth rows vs predicted columns.
CostMatrix box_cost(std::span<const BoundingBox> pred_boxes, std::span<const BoundingBox> gt_boxes,
                    double lambda_iou, double lambda_l1);

/// The matching problem an omni-label induces on a scored prediction.
/// row_class holds the class attached to each row where the label provides
/// one (tags and classed points), otherwise it is empty.
struct MatchingProblem {
  CostMatrix cost;
  std::vector<ClassId> row_class;
  std::vector<std::string> warnings;
};

// Throws InputError for NoLabel, Fully or an empty payload and DimensionError
// when G exceeds K. Predicted tag counts above K are truncated with a warning.
MatchingProblem build_matching_problem(const ScoredPrediction& sp,
                                       std::span<const BoundingBox> boxes, const OmniLabel& label,
                                       const FilterConfig& cfg);

PseudoLabelSet unified_filter(const TeacherPrediction& pred, const OmniLabel& label,
                              const FilterConfig& cfg, const AssignmentSolver& solver = hungarian);

// Per-format heuristics: thresholding with top-1 fallback (TagsU), top-n_j
// (TagsK), best containing box (PointsU), best containing box of the tagged
// class (PointsK). Each query is used at most once. Throws InputError for box formats.
PseudoLabelSet simple_filter(const TeacherPrediction& pred, const OmniLabel& label,
                             const FilterConfig& cfg);

// Dispatches on cfg.strategy.
PseudoLabelSet apply_filter(const TeacherPrediction& pred, const OmniLabel& label,
                            const FilterConfig& cfg);

}  // namespace omnilabel
