#include "omnilabel/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omnilabel/error.hpp"

namespace omnilabel {

TeacherPrediction::TeacherPrediction(ImageId image_id, Matrix logits,
                                     std::vector<BoundingBox> boxes)
    : image_id_(image_id), logits_(std::move(logits)), boxes_(std::move(boxes)) {
  if (boxes_.empty() || logits_.cols() == 0) {
    throw DimensionError("prediction for image " + std::to_string(image_id_) +
                         " needs K > 0 queries and C > 0 classes");
  }
  if (logits_.rows() != boxes_.size()) {
    throw DimensionError("prediction for image " + std::to_string(image_id_) + " has " +
                         std::to_string(logits_.rows()) + " logit rows but " +
                         std::to_string(boxes_.size()) + " boxes");
  }
  for (double z : logits_.data()) {
    if (!std::isfinite(z)) {
      throw InputError("non-finite logit in prediction for image " + std::to_string(image_id_));
    }
  }
}

ScoredPrediction score(const TeacherPrediction& pred) {
  const Matrix& logits = pred.logits();
  const std::size_t k_rows = logits.rows();
  const std::size_t c_cols = logits.cols();

  ScoredPrediction out{Matrix(k_rows, c_cols), std::vector<ClassId>(k_rows),
                       std::vector<double>(k_rows)};
  for (std::size_t k = 0; k < k_rows; ++k) {
    auto z = logits.row(k);
    auto p = out.probs.row(k);
    const double z_max = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (std::size_t c = 0; c < c_cols; ++c) {
      p[c] = std::exp(z[c] - z_max);
      total += p[c];
    }
    std::size_t best = 0;
    for (std::size_t c = 0; c < c_cols; ++c) {
      p[c] /= total;
      if (p[c] > p[best]) best = c;
    }
    out.pred_class[k] = static_cast<ClassId>(best);
    out.score[k] = p[best];
  }
  return out;
}

}  // namespace omnilabel
