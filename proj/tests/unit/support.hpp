#pragma once

#include <cmath>
#include <vector>

#include "omnilabel/prediction.hpp"

namespace testing {

// Prediction whose softmax reproduces the given probability rows exactly up to rounding.
inline omnilabel::TeacherPrediction from_probs(const std::vector<std::vector<double>>& probs,
                                               std::vector<omnilabel::BoundingBox> boxes,
                                               omnilabel::ImageId id = 1) {
  omnilabel::Matrix logits(probs.size(), probs.front().size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    for (std::size_t c = 0; c < probs[k].size(); ++c) logits(k, c) = std::log(probs[k][c]);
  }
  return {id, std::move(logits), std::move(boxes)};
}

// Same box repeated n times.
inline std::vector<omnilabel::BoundingBox> repeat(const omnilabel::BoundingBox& b, std::size_t n) {
  return std::vector<omnilabel::BoundingBox>(n, b);
}

}  // namespace testing
