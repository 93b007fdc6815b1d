#pragma once

#include <cstdint>

#include "omnilabel/io.hpp"

namespace omnilabel {

/// Random fully annotated corpus: 640x480 images with ids 1..num_images,
/// categories with ids 1..num_classes, 1..max_objects objects per image drawn
/// from the COCO-like size mix.
Corpus synthetic_corpus(std::size_t num_images, int num_classes, int max_objects, std::uint64_t seed);

struct TeacherSimConfig {
  std::size_t num_queries = kDefaultQueries;
  int num_classes = 80;
  double box_jitter = 0.05;        // relative std of the offsets on object queries
  double hit_logit = 4.0;          // mean logit bonus for the true class
  double duplicates = 2.0;         // extra queries per object on average
};

/// Teacher output that "sees" the objects in gt: each object gets one or more
/// jittered queries with a boosted logit for its class, the remaining queries
/// are random low-confidence boxes. Query order is shuffled.
TeacherPrediction synthetic_prediction(ImageId image_id, const Fully& gt, const TeacherSimConfig& cfg,
                                       std::uint64_t seed);

// One prediction per image of the corpus, in image id order; image i uses
// seed derive_seed(seed, id). cfg.num_classes is taken from the corpus.
std::vector<TeacherPrediction> synthetic_predictions(const Corpus& corpus, TeacherSimConfig cfg,
                                                     std::uint64_t seed);

}  // namespace omnilabel
