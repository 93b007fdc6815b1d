#pragma once

#include <cstdint>
#include <vector>

#include "omnilabel/geometry.hpp"
#include "omnilabel/matrix.hpp"

namespace omnilabel {

using ImageId = std::int64_t;
using ClassId = int;

// Default number of teacher object queries.
inline constexpr std::size_t kDefaultQueries = 300;

// Raw teacher output for one image: K x C logits and K boxes.
class TeacherPrediction {
 public:
  // Throws DimensionError if logits rows != boxes or either dimension is zero,
  // InputError if any logit is non-finite.
  TeacherPrediction(ImageId image_id, Matrix logits, std::vector<BoundingBox> boxes);

  ImageId image_id() const { return image_id_; }
  const Matrix& logits() const { return logits_; }
  const std::vector<BoundingBox>& boxes() const { return boxes_; }
  std::size_t num_queries() const { return boxes_.size(); }
  std::size_t num_classes() const { return logits_.cols(); }

 private:
  ImageId image_id_;
  Matrix logits_;
  std::vector<BoundingBox> boxes_;
};

// Softmax probabilities with per-query argmax class and confidence.
struct ScoredPrediction {
  Matrix probs;
  std::vector<ClassId> pred_class;
  std::vector<double> score;

  std::size_t num_queries() const { return probs.rows(); }
  std::size_t num_classes() const { return probs.cols(); }
};

// Row-wise stabilized softmax. Ties in argmax go to the smallest class index.
ScoredPrediction score(const TeacherPrediction& pred);

}  // namespace omnilabel
