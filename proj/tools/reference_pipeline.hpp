#pragma once

// Fixed inputs behind the committed golden files. Changing anything here
// requires regenerating them with make-goldens.

#include <array>
#include <map>
#include <string>

#include "omnilabel/io.hpp"
#include "omnilabel/pipeline.hpp"
#include "omnilabel/synthetic.hpp"

namespace omnilabel::reference {

inline constexpr std::uint64_t kCorpusSeed = 2024;
inline constexpr std::uint64_t kTeacherSeed = 7;
inline constexpr std::uint64_t kDowngradeSeed = 11;

inline constexpr std::array<LabelFormat, 6> kWeakFormats = {
    LabelFormat::tags_u,  LabelFormat::tags_k,  LabelFormat::points_u,
    LabelFormat::points_k, LabelFormat::boxes_u, LabelFormat::boxes_ec};

// 50 images, 20 classes, up to 8 objects, 300 queries.
inline Corpus pipeline_corpus() { return synthetic_corpus(50, 20, 8, kCorpusSeed); }

inline std::vector<TeacherPrediction> pipeline_predictions(const Corpus& corpus) {
  return synthetic_predictions(corpus, TeacherSimConfig{}, kTeacherSeed);
}

// Pseudo-label file text for one weak format.
inline std::string pipeline_output(const Corpus& corpus, const std::vector<TeacherPrediction>& preds,
                                   LabelFormat format, unsigned jobs = 1) {
  const LabelFile labels = downgrade_corpus(corpus, format, kDowngradeSeed);
  return pseudo_to_string(filter_corpus(preds, labels, FilterConfig{}, jobs), corpus);
}

inline std::string pipeline_golden_name(LabelFormat format) {
  return "pipeline_" + std::string(to_string(format)) + ".json";
}

// Small tags_k fixture for the command-line test: 3 images, 5 classes, 12 queries.
inline Corpus cli_fixture_corpus() { return synthetic_corpus(3, 5, 3, 5); }

inline std::vector<TeacherPrediction> cli_fixture_predictions(const Corpus& corpus) {
  TeacherSimConfig cfg;
  cfg.num_queries = 12;
  cfg.duplicates = 1.0;
  return synthetic_predictions(corpus, cfg, 6);
}

}  // namespace omnilabel::reference
