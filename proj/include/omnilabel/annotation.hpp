#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "omnilabel/geometry.hpp"
#include "omnilabel/prediction.hpp"
#include "omnilabel/random.hpp"

namespace omnilabel {

enum class LabelFormat { none, tags_u, tags_k, points_u, points_k, boxes_u, boxes_ec, fully };

inline constexpr LabelFormat kAllFormats[] = {
    LabelFormat::none,     LabelFormat::tags_u,  LabelFormat::tags_k,   LabelFormat::points_u,
    LabelFormat::points_k, LabelFormat::boxes_u, LabelFormat::boxes_ec, LabelFormat::fully};

// Wire names: "none", "tags_u", "tags_k", "points_u", "points_k", "boxes_u", "boxes_ec", "fully".
std::string_view to_string(LabelFormat f);
// Throws InputError on an unknown name.
LabelFormat parse_label_format(std::string_view name);

struct NoLabel {
  bool operator==(const NoLabel&) const = default;
};
struct TagsU {
  std::vector<ClassId> classes;
  bool operator==(const TagsU&) const = default;
};
struct TagCount {
  ClassId class_id;
  int count;
  bool operator==(const TagCount&) const = default;
};
struct TagsK {
  std::vector<TagCount> tags;
  bool operator==(const TagsK&) const = default;
};
struct PointsU {
  std::vector<Point2D> points;
  bool operator==(const PointsU&) const = default;
};
struct LabeledPoint {
  Point2D point;
  ClassId class_id;
  bool operator==(const LabeledPoint&) const = default;
};
struct PointsK {
  std::vector<LabeledPoint> points;
  bool operator==(const PointsK&) const = default;
};
struct BoxesU {
  std::vector<BoundingBox> boxes;
  bool operator==(const BoxesU&) const = default;
};
struct BoxesEC {
  std::vector<BoundingBox> boxes;
  bool operator==(const BoxesEC&) const = default;
};
struct LabeledBox {
  BoundingBox box;
  ClassId class_id;
  bool operator==(const LabeledBox&) const = default;
};
struct Fully {
  std::vector<LabeledBox> objects;
  bool operator==(const Fully&) const = default;
};

// Alternative order follows LabelFormat.
using OmniLabel = std::variant<NoLabel, TagsU, TagsK, PointsU, PointsK, BoxesU, BoxesEC, Fully>;

LabelFormat format_of(const OmniLabel& label);

// Number of annotated entities: tags (TagsU), expanded count sum (TagsK),
// points or boxes otherwise; 0 for NoLabel.
std::size_t entity_count(const OmniLabel& label);

// Throws InputError if class ids fall outside [0, num_classes), TagsU classes
// repeat, or TagsK classes repeat or carry a count below 1.
void validate(const OmniLabel& label, int num_classes);

/// Extreme-clicking noise: every corner coordinate receives an independent
/// Gaussian offset with standard deviation sigma_scale * side^side_exponent,
/// where side is the box width (x corners) or height (y corners). With the
/// default exponent the deviation is nearly constant in image units, so small
/// boxes are hit much harder than large ones.
struct NoiseModel {
  double sigma_scale = 0.0;
  double side_exponent = 0.0;
  std::uint64_t seed = 0;
};

// Calibrated on coco_like_boxes(10000, 0) to mean IoU 0.82 / std 0.16.
inline constexpr double kDefaultEcSigma = 0.005065919032790574;
inline constexpr double kDefaultEcExponent = 0.06201171875;

inline NoiseModel default_ec_noise(std::uint64_t seed = 0) {
  return {kDefaultEcSigma, kDefaultEcExponent, seed};
}

// Throws InputError if sigma_scale is negative or either parameter is non-finite.
void validate(const NoiseModel& noise);

// Perturbs one box using noise.seed. Output is clamped to the unit square with
// a positive extent; zero sigma returns the input unchanged.
BoundingBox simulate_ec(const BoundingBox& gt, const NoiseModel& noise);

// Box i uses seed derive_seed(noise.seed, i).
std::vector<BoundingBox> simulate_ec(std::span<const BoundingBox> gt, const NoiseModel& noise);

struct IouStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

// IoU between each sample box and its simulated counterpart.
IouStats ec_iou_stats(std::span<const BoundingBox> sample, const NoiseModel& noise);

/// Fits a NoiseModel to the sample. sigma_scale is found by bisection on the
/// mean IoU (monotone decreasing in sigma); side_exponent is searched in [0, 1]
/// so the IoU spread at that mean approaches target_std. Throws InputError for
/// target_mean outside (0, 1) or an empty sample.
NoiseModel calibrate_ec(double target_mean, double target_std, std::span<const BoundingBox> sample,
                        std::uint64_t seed = 0);

// Box sample with a COCO-like size mix (~41% small, 35% medium, 24% large on a 640x480 frame).
std::vector<BoundingBox> coco_like_boxes(std::size_t n, std::uint64_t seed);

// Uniform point inside the box.
Point2D sample_interior_point(const BoundingBox& box, Rng& rng);

/// Weakens a full annotation to the target format. Deterministic given seed:
/// points come from Rng(seed), extreme-clicking boxes from ec_noise with its
/// seed replaced by `seed`. Tags come out in ascending class order.
OmniLabel downgrade(const Fully& full, LabelFormat target, std::uint64_t seed,
                    const NoiseModel& ec_noise = default_ec_noise());

}  // namespace omnilabel
