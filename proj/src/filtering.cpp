#include "omnilabel/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "omnilabel/error.hpp"

namespace omnilabel {

namespace {

void check_rows(std::size_t g, std::size_t k) {
  if (g > k) {
    throw DimensionError(std::to_string(g) + " ground-truth entities exceed " + std::to_string(k) +
                         " predictions");
  }
}

struct Expansion {
  std::vector<ClassId> rows;
  std::vector<std::string> warnings;
};

std::vector<TagCount> tag_counts(const ScoredPrediction& sp, const OmniLabel& label, double tau) {
  if (const auto* u = std::get_if<TagsU>(&label)) {
    const auto counts = predict_counts(sp, u->classes, tau);
    std::vector<TagCount> out;
    for (std::size_t j = 0; j < counts.size(); ++j) out.push_back({u->classes[j], counts[j]});
    return out;
  }
  return std::get<TagsK>(label).tags;
}

// Repeats each tag n_j times. Predicted counts are trimmed (largest first) to fit K.
Expansion expand(std::vector<TagCount> tags, std::size_t max_rows, bool predicted) {
  Expansion out;
  check_rows(tags.size(), max_rows);
  std::size_t total = 0;
  for (const auto& t : tags) total += static_cast<std::size_t>(t.count);
  if (total > max_rows) {
    if (!predicted) check_rows(total, max_rows);
    out.warnings.push_back("predicted tag counts sum to " + std::to_string(total) +
                           ", truncated to " + std::to_string(max_rows) + " queries");
    while (total > max_rows) {
      auto largest = std::max_element(tags.begin(), tags.end(), [](const auto& a, const auto& b) {
        return a.count < b.count;
      });
      --largest->count;
      --total;
    }
  }
  for (const auto& t : tags) out.rows.insert(out.rows.end(), static_cast<std::size_t>(t.count), t.class_id);
  return out;
}

bool is_infeasible(double cost) { return cost >= 0.5 * kInfeasibleCost; }

// Queries ordered by descending key, ties to the lower index.
std::vector<int> ranked(std::size_t k, auto key) {
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) > key(b); });
  return order;
}

}  // namespace

void FilterConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("gamma must lie in [0, 1]");
  if (!(lambda_iou >= 0.0) || !(lambda_l1 >= 0.0) || !std::isfinite(lambda_iou) ||
      !std::isfinite(lambda_l1)) {
    throw InputError("box cost weights must be finite and non-negative");
  }
}

PseudoLabelSet filter_none(const ScoredPrediction& sp, std::span<const BoundingBox> boxes,
                           const FilterConfig& cfg) {
  if (boxes.size() != sp.num_queries()) throw DimensionError("box count differs from query count");
  PseudoLabelSet out;
  for (std::size_t k = 0; k < sp.num_queries(); ++k) {
    if (sp.score[k] > cfg.tau) {
      out.items.push_back({boxes[k], sp.pred_class[k], sp.score[k], static_cast<int>(k), -1, 0.0,
                           false});
    }
  }
  return out;
}

std::vector<int> predict_counts(const ScoredPrediction& sp, std::span<const ClassId> tags,
                                double tau) {
  std::vector<int> counts;
  counts.reserve(tags.size());
  for (ClassId c : tags) {
    if (c < 0 || static_cast<std::size_t>(c) >= sp.num_classes()) {
      throw InputError("tag class " + std::to_string(c) + " outside the prediction's classes");
    }
    int n = 0;
    for (std::size_t k = 0; k < sp.num_queries(); ++k) {
      if (sp.probs(k, static_cast<std::size_t>(c)) > tau) ++n;
    }
    counts.push_back(std::max(1, n));
  }
  return counts;
}

CostMatrix tag_cost(const ScoredPrediction& sp, std::span<const ClassId> expanded_tags) {
  check_rows(expanded_tags.size(), sp.num_queries());
  CostMatrix cost(expanded_tags.size(), sp.num_queries());
  for (std::size_t i = 0; i < expanded_tags.size(); ++i) {
    const ClassId c = expanded_tags[i];
    if (c < 0 || static_cast<std::size_t>(c) >= sp.num_classes()) {
      throw InputError("tag class " + std::to_string(c) + " outside the prediction's classes");
    }
    for (std::size_t k = 0; k < sp.num_queries(); ++k) {
      cost(i, k) = 1.0 - sp.probs(k, static_cast<std::size_t>(c));
    }
  }
  return cost;
}

CostMatrix point_cost(const ScoredPrediction& sp, std::span<const BoundingBox> boxes,
                      std::span<const Point2D> points) {
  if (boxes.size() != sp.num_queries()) throw DimensionError("box count differs from query count");
  check_rows(points.size(), boxes.size());
  const std::size_t g = points.size();
  const std::size_t k_count = boxes.size();

  CostMatrix cost(g, k_count);
  double d_min = std::numeric_limits<double>::infinity();
  double d_max = -d_min;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const double d = center_distance(points[i], boxes[k]);
      cost(i, k) = d;
      d_min = std::min(d_min, d);
      d_max = std::max(d_max, d);
    }
  }
  // Normalization runs over all pairs, feasible or not.
  const double range = d_max - d_min;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      if (!contains(boxes[k], points[i])) {
        cost(i, k) = kInfeasibleCost;
        continue;
      }
      const double d_norm = range > 0.0 ? (cost(i, k) - d_min) / range : 0.0;
      cost(i, k) = d_norm + (1.0 - sp.score[k]);
    }
  }
  return cost;
}

CostMatrix point_tag_cost(const ScoredPrediction& sp, std::span<const BoundingBox> boxes,
                          std::span<const LabeledPoint> pairs, double gamma) {
  std::vector<Point2D> points;
  std::vector<ClassId> classes;
  for (const auto& p : pairs) {
    points.push_back(p.point);
    classes.push_back(p.class_id);
  }
  const CostMatrix tags = tag_cost(sp, classes);
  CostMatrix cost = point_cost(sp, boxes, points);
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t k = 0; k < cost.cols(); ++k) {
      if (is_infeasible(cost(i, k))) continue;
      cost(i, k) = gamma * tags(i, k) + (1.0 - gamma) * cost(i, k);
    }
  }
  return cost;
}

CostMatrix box_cost(std::span<const BoundingBox> pred_boxes, std::span<const BoundingBox> gt_boxes,
                    double lambda_iou, double lambda_l1) {
  check_rows(gt_boxes.size(), pred_boxes.size());
  CostMatrix cost(gt_boxes.size(), pred_boxes.size());
  for (std::size_t i = 0; i < gt_boxes.size(); ++i) {
    for (std::size_t k = 0; k < pred_boxes.size(); ++k) {
      cost(i, k) = lambda_iou * (1.0 - giou(gt_boxes[i], pred_boxes[k])) +
                   lambda_l1 * l1_box(gt_boxes[i], pred_boxes[k]);
    }
  }
  return cost;
}

MatchingProblem build_matching_problem(const ScoredPrediction& sp,
                                       std::span<const BoundingBox> boxes, const OmniLabel& label,
                                       const FilterConfig& cfg) {
  const LabelFormat format = format_of(label);
  if (format == LabelFormat::none || format == LabelFormat::fully) {
    throw InputError("format '" + std::string(to_string(format)) + "' has no matching problem");
  }
  if (entity_count(label) == 0) {
    throw InputError("empty '" + std::string(to_string(format)) + "' annotation");
  }
  validate(label, static_cast<int>(sp.num_classes()));

  MatchingProblem out;
  switch (format) {
    case LabelFormat::tags_u:
    case LabelFormat::tags_k: {
      auto expansion = expand(tag_counts(sp, label, cfg.tau), sp.num_queries(),
                              format == LabelFormat::tags_u);
      out.cost = tag_cost(sp, expansion.rows);
      out.row_class = std::move(expansion.rows);
      out.warnings = std::move(expansion.warnings);
      break;
    }
    case LabelFormat::points_u:
      out.cost = point_cost(sp, boxes, std::get<PointsU>(label).points);
      break;
    case LabelFormat::points_k: {
      const auto& pairs = std::get<PointsK>(label).points;
      out.cost = point_tag_cost(sp, boxes, pairs, cfg.gamma);
      for (const auto& p : pairs) out.row_class.push_back(p.class_id);
      break;
    }
    case LabelFormat::boxes_u:
      out.cost = box_cost(boxes, std::get<BoxesU>(label).boxes, cfg.lambda_iou, cfg.lambda_l1);
      break;
    case LabelFormat::boxes_ec:
      out.cost = box_cost(boxes, std::get<BoxesEC>(label).boxes, cfg.lambda_iou, cfg.lambda_l1);
      break;
    default:
      break;
  }
  return out;
}

PseudoLabelSet unified_filter(const TeacherPrediction& pred, const OmniLabel& label,
                              const FilterConfig& cfg, const AssignmentSolver& solver) {
  cfg.validate();
  const ScoredPrediction sp = score(pred);
  const auto& boxes = pred.boxes();
  if (std::holds_alternative<NoLabel>(label)) return filter_none(sp, boxes, cfg);

  MatchingProblem problem = build_matching_problem(sp, boxes, label, cfg);
  const Assignment assignment = solver(problem.cost);

  const LabelFormat format = format_of(label);
  const std::vector<BoundingBox>* gt_boxes = nullptr;
  if (format == LabelFormat::boxes_u) gt_boxes = &std::get<BoxesU>(label).boxes;
  if (format == LabelFormat::boxes_ec) gt_boxes = &std::get<BoxesEC>(label).boxes;

  PseudoLabelSet out;
  out.warnings = std::move(problem.warnings);
  for (std::size_t i = 0; i < assignment.match.size(); ++i) {
    const auto k = static_cast<std::size_t>(assignment.match[i]);
    const double entry = problem.cost(i, k);
    const bool infeasible = is_infeasible(entry);
    if (infeasible && cfg.drop_infeasible) continue;

    ClassId c = sp.pred_class[k];
    if (!problem.row_class.empty()) c = problem.row_class[i];
    const BoundingBox& box = gt_boxes ? (*gt_boxes)[i] : boxes[k];
    out.items.push_back({box, c, sp.probs(k, static_cast<std::size_t>(c)), static_cast<int>(k),
                         static_cast<int>(i), entry, infeasible});
  }
  return out;
}

PseudoLabelSet simple_filter(const TeacherPrediction& pred, const OmniLabel& label,
                             const FilterConfig& cfg) {
  cfg.validate();
  const ScoredPrediction sp = score(pred);
  const auto& boxes = pred.boxes();
  const LabelFormat format = format_of(label);
  if (format == LabelFormat::none) return filter_none(sp, boxes, cfg);
  if (format != LabelFormat::tags_u && format != LabelFormat::tags_k &&
      format != LabelFormat::points_u && format != LabelFormat::points_k) {
    throw InputError("no simple filter rule for format '" + std::string(to_string(format)) + "'");
  }

  // The unified cost matrix is built only to report comparable per-item costs.
  MatchingProblem problem = build_matching_problem(sp, boxes, label, cfg);
  const std::size_t k_count = sp.num_queries();
  std::vector<char> used(k_count, 0);

  PseudoLabelSet out;
  out.warnings = std::move(problem.warnings);
  auto emit = [&](std::size_t row, int k, ClassId c) {
    used[static_cast<std::size_t>(k)] = 1;
    const double entry = problem.cost(row, static_cast<std::size_t>(k));
    const bool infeasible = is_infeasible(entry);
    if (infeasible && cfg.drop_infeasible) return;
    out.items.push_back({boxes[static_cast<std::size_t>(k)], c,
                         sp.probs(static_cast<std::size_t>(k), static_cast<std::size_t>(c)), k,
                         static_cast<int>(row), entry, infeasible});
  };

  if (format == LabelFormat::tags_u || format == LabelFormat::tags_k) {
    // Rows of one class are contiguous; each takes the best unused query for
    // that class. For TagsU the row count per class is the number of queries
    // above tau, or one (the top-1 fallback).
    const auto& rows = problem.row_class;
    for (std::size_t start = 0; start < rows.size();) {
      const ClassId c = rows[start];
      std::size_t end = start;
      while (end < rows.size() && rows[end] == c) ++end;
      const auto order = ranked(k_count, [&](int k) {
        return sp.probs(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
      });
      std::size_t row = start;
      for (int k : order) {
        if (row == end) break;
        if (used[static_cast<std::size_t>(k)]) continue;
        emit(row++, k, c);
      }
      start = end;
    }
    return out;
  }

  const auto order = ranked(k_count, [&](int k) { return sp.score[static_cast<std::size_t>(k)]; });
  std::vector<Point2D> points;
  std::vector<ClassId> point_class;
  if (format == LabelFormat::points_u) {
    points = std::get<PointsU>(label).points;
  } else {
    for (const auto& p : std::get<PointsK>(label).points) {
      points.push_back(p.point);
      point_class.push_back(p.class_id);
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int k : order) {
      const auto ku = static_cast<std::size_t>(k);
      if (used[ku] || !contains(boxes[ku], points[i])) continue;
      if (!point_class.empty() && sp.pred_class[ku] != point_class[i]) continue;
      emit(i, k, point_class.empty() ? sp.pred_class[ku] : point_class[i]);
      break;
    }
  }
  return out;
}

PseudoLabelSet apply_filter(const TeacherPrediction& pred, const OmniLabel& label,
                            const FilterConfig& cfg) {
  return cfg.strategy == FilterStrategy::simple ? simple_filter(pred, label, cfg)
                                                : unified_filter(pred, label, cfg);
}

}  // namespace omnilabel
