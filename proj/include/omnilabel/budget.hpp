#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omnilabel/annotation.hpp"

namespace omnilabel {

// Per-action annotation times, in seconds.
namespace annotation_seconds {
inline constexpr double kTagPerCategory = 1.0;
inline constexpr double kPoint = 0.9;
inline constexpr double kFirstInstanceClick = 2.4;
inline constexpr double kCount = 1.0;
inline constexpr double kExtremeClickBox = 7.0;
inline constexpr double kBox = 35.0;
// Mean TagsK / PointsK cost ratio over the multi-class datasets; applied to
// single-class datasets where counting has no category-elimination step.
inline constexpr double kSingleClassTagsKRatio = 0.95;
}  // namespace annotation_seconds

struct DatasetStats {
  std::string name;
  int num_classes = 1;          // C
  double avg_classes = 1.0;     // categories per image
  double avg_instances = 1.0;   // instances per image
  std::int64_t num_images = 0;  // training images, 0 if unknown

  bool single_class() const { return num_classes == 1; }
  // Throws InputError unless C >= 1, 0 < avg_classes <= C and avg_instances >= avg_classes.
  void validate() const;
};

// COCO, VOC, Objects365, Bees, CrowdHuman.
std::span<const DatasetStats> builtin_profiles();
std::optional<DatasetStats> find_profile(std::string_view name);

// Seconds to annotate one image in the given format. None costs 0.
// Throws InputError for tags_u on a single-class dataset.
double cost_per_image(const DatasetStats& stats, LabelFormat format);

struct MixturePolicy {
  std::map<LabelFormat, double> fractions;
  std::int64_t dataset_size = 0;

  // Throws InputError unless every fraction is in [0, 1] and they sum to 1 within 1e-6.
  void validate() const;
};

// Sum over formats of size * fraction * cost_per_image, in hours.
double policy_cost(const MixturePolicy& policy, const DatasetStats& stats);

/// Every policy on a grid of `step` over `formats` plus None (which takes the
/// remainder) whose cost is at most budget_hours * 1.01. Sorted by ascending
/// Fully fraction, then by the remaining fractions. Throws InputError when
/// formats is empty or step does not divide 1.
std::vector<MixturePolicy> enumerate_policies(const DatasetStats& stats, double budget_hours,
                                              std::span<const LabelFormat> formats, double step,
                                              std::int64_t dataset_size);

}  // namespace omnilabel
