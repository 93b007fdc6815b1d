#include "omnilabel/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "omnilabel/error.hpp"
#include "omnilabel/random.hpp"

namespace omnilabel {

namespace {

constexpr double kFrameW = 640.0;
constexpr double kFrameH = 480.0;

BoundingBox jitter_box(const BoundingBox& b, double rel, Rng& rng) {
  const double cx = b.cx() + rel * b.w() * rng.normal();
  const double cy = b.cy() + rel * b.h() * rng.normal();
  const double w = b.w() * std::exp(rel * rng.normal());
  const double h = b.h() * std::exp(rel * rng.normal());
  return BoundingBox::from_cxcywh(std::clamp(cx, 0.0, 1.0), std::clamp(cy, 0.0, 1.0), w, h);
}

BoundingBox background_box(Rng& rng) {
  const double w = rng.uniform(0.02, 0.5);
  const double h = rng.uniform(0.02, 0.5);
  return BoundingBox::from_cxcywh(rng.uniform(0.5 * w, 1.0 - 0.5 * w),
                                  rng.uniform(0.5 * h, 1.0 - 0.5 * h), w, h);
}

}  // namespace

Corpus synthetic_corpus(std::size_t num_images, int num_classes, int max_objects, std::uint64_t seed) {
  if (num_classes < 1) throw InputError("synthetic corpus needs at least one class");
  if (max_objects < 1) throw InputError("synthetic corpus needs at least one object per image");
  Corpus corpus;
  for (int c = 0; c < num_classes; ++c) {
    corpus.categories.push_back({c + 1, "class_" + std::to_string(c + 1)});
  }
  for (std::size_t i = 0; i < num_images; ++i) {
    const auto id = static_cast<ImageId>(i + 1);
    corpus.images.push_back({id, kFrameW, kFrameH, "synthetic_" + std::to_string(id) + ".jpg"});
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(id)));
    const auto n = 1 + rng.below(static_cast<std::uint64_t>(max_objects));
    Fully& full = corpus.annotations[id];
    for (const auto& box : coco_like_boxes(n, rng.next())) {
      full.objects.push_back({box, static_cast<ClassId>(rng.below(static_cast<std::uint64_t>(num_classes)))});
    }
  }
  return corpus;
}

TeacherPrediction synthetic_prediction(ImageId image_id, const Fully& gt, const TeacherSimConfig& cfg,
                                       std::uint64_t seed) {
  if (cfg.num_queries == 0 || cfg.num_classes < 1) {
    throw InputError("teacher simulation needs queries and classes");
  }
  if (gt.objects.size() > cfg.num_queries) {
    throw DimensionError("more objects than teacher queries");
  }
  Rng rng(seed);
  const std::size_t k_count = cfg.num_queries;
  const auto c_count = static_cast<std::size_t>(cfg.num_classes);

  Matrix logits(k_count, c_count);
  std::vector<BoundingBox> boxes;
  boxes.reserve(k_count);

  // Budget for duplicates: never crowd out one query per object.
  std::size_t spare = k_count - gt.objects.size();
  for (const auto& obj : gt.objects) {
    std::size_t copies = 1 + static_cast<std::size_t>(rng.below(
                                 static_cast<std::uint64_t>(2.0 * cfg.duplicates) + 1));
    copies = std::min(copies, 1 + spare);
    spare -= copies - 1;
    for (std::size_t d = 0; d < copies; ++d) {
      const std::size_t k = boxes.size();
      boxes.push_back(jitter_box(obj.box, cfg.box_jitter * (1.0 + d), rng));
      for (std::size_t c = 0; c < c_count; ++c) logits(k, c) = rng.normal() - 2.0;
      // Occasionally the teacher is confident about the wrong class.
      auto hit = static_cast<std::size_t>(obj.class_id);
      if (rng.uniform() < 0.1) hit = static_cast<std::size_t>(rng.below(c_count));
      logits(k, hit) += cfg.hit_logit / (1.0 + d) + rng.normal();
    }
  }
  while (boxes.size() < k_count) {
    const std::size_t k = boxes.size();
    boxes.push_back(background_box(rng));
    for (std::size_t c = 0; c < c_count; ++c) logits(k, c) = rng.normal() - 2.0;
  }

  std::vector<std::size_t> order(k_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = k_count - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
  }
  Matrix shuffled(k_count, c_count);
  std::vector<BoundingBox> shuffled_boxes;
  shuffled_boxes.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    std::copy_n(logits.row(order[k]).begin(), c_count, shuffled.row(k).begin());
    shuffled_boxes.push_back(boxes[order[k]]);
  }
  return TeacherPrediction(image_id, std::move(shuffled), std::move(shuffled_boxes));
}

std::vector<TeacherPrediction> synthetic_predictions(const Corpus& corpus, TeacherSimConfig cfg,
                                                     std::uint64_t seed) {
  cfg.num_classes = corpus.num_classes();
  std::vector<TeacherPrediction> out;
  out.reserve(corpus.annotations.size());
  for (const auto& [id, full] : corpus.annotations) {
    out.push_back(synthetic_prediction(id, full, cfg, derive_seed(seed, static_cast<std::uint64_t>(id))));
  }
  return out;
}

}  // namespace omnilabel
