#pragma once

#include "omnilabel/annotation.hpp"
#include "omnilabel/filtering.hpp"

namespace omnilabel {

struct QualityReport {
  double precision = 1.0;  // tp / (tp + fp), 1 when nothing was emitted
  double recall = 0.0;     // tp / (tp + fn), 1 when there is nothing to find
  double mean_iou_matched = 0.0;
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double iou_sum = 0.0;  // kept so reports can be merged

  QualityReport& operator+=(const QualityReport& other);
};

/// Greedy detection-style matching: all same-class (pseudo, gt) pairs with
/// IoU >= iou_thresh are visited by descending IoU and accepted when neither
/// side is used yet. Throws InputError for iou_thresh outside (0, 1).
QualityReport score_pseudo(const PseudoLabelSet& pseudo, const Fully& gt, double iou_thresh);

}  // namespace omnilabel
