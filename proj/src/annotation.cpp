#include "omnilabel/annotation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "omnilabel/error.hpp"

namespace omnilabel {

namespace {

constexpr std::array<std::string_view, 8> kFormatNames = {
    "none", "tags_u", "tags_k", "points_u", "points_k", "boxes_u", "boxes_ec", "fully"};

void check_class(ClassId c, int num_classes) {
  if (c < 0 || c >= num_classes) {
    throw InputError("class id " + std::to_string(c) + " outside [0, " +
                     std::to_string(num_classes) + ")");
  }
}

using Normals = std::array<double, 4>;

Normals draw_normals(std::uint64_t seed) {
  Rng rng(seed);
  Normals n{};
  for (double& v : n) v = rng.normal();
  return n;
}

// Orders, clamps and widens perturbed corners into a valid box.
BoundingBox settle(double x0, double y0, double x1, double y1) {
  constexpr double kFloor = 2.0 * kMinBoxSide;
  auto fix_axis = [](double& lo, double& hi) {
    lo = std::clamp(lo, 0.0, 1.0);
    hi = std::clamp(hi, 0.0, 1.0);
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < kFloor) {
      const double mid = std::clamp(0.5 * (lo + hi), 0.5 * kFloor, 1.0 - 0.5 * kFloor);
      lo = mid - 0.5 * kFloor;
      hi = mid + 0.5 * kFloor;
    }
  };
  fix_axis(x0, x1);
  fix_axis(y0, y1);
  return BoundingBox::from_corners(x0, y0, x1, y1);
}

BoundingBox perturb(const BoundingBox& gt, const Normals& n, double sigma, double side_exponent) {
  if (sigma == 0.0) return gt;
  const double sx = sigma * std::pow(gt.w(), side_exponent);
  const double sy = sigma * std::pow(gt.h(), side_exponent);
  return settle(gt.x_min() + sx * n[0], gt.y_min() + sy * n[2], gt.x_max() + sx * n[1],
                gt.y_max() + sy * n[3]);
}

IouStats moments(const std::vector<double>& values) {
  IouStats s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

}  // namespace

std::string_view to_string(LabelFormat f) { return kFormatNames[static_cast<std::size_t>(f)]; }

LabelFormat parse_label_format(std::string_view name) {
  for (std::size_t i = 0; i < kFormatNames.size(); ++i) {
    if (kFormatNames[i] == name) return static_cast<LabelFormat>(i);
  }
  throw InputError("unknown label format '" + std::string(name) + "'");
}

LabelFormat format_of(const OmniLabel& label) { return static_cast<LabelFormat>(label.index()); }

std::size_t entity_count(const OmniLabel& label) {
  struct Counter {
    std::size_t operator()(const NoLabel&) const { return 0; }
    std::size_t operator()(const TagsU& l) const { return l.classes.size(); }
    std::size_t operator()(const TagsK& l) const {
      std::size_t total = 0;
      for (const auto& t : l.tags) total += static_cast<std::size_t>(std::max(t.count, 0));
      return total;
    }
    std::size_t operator()(const PointsU& l) const { return l.points.size(); }
    std::size_t operator()(const PointsK& l) const { return l.points.size(); }
    std::size_t operator()(const BoxesU& l) const { return l.boxes.size(); }
    std::size_t operator()(const BoxesEC& l) const { return l.boxes.size(); }
    std::size_t operator()(const Fully& l) const { return l.objects.size(); }
  };
  return std::visit(Counter{}, label);
}

void validate(const OmniLabel& label, int num_classes) {
  if (const auto* tags = std::get_if<TagsU>(&label)) {
    std::set<ClassId> seen;
    for (ClassId c : tags->classes) {
      check_class(c, num_classes);
      if (!seen.insert(c).second) {
        throw InputError("tags_u repeats class " + std::to_string(c));
      }
    }
  } else if (const auto* counted = std::get_if<TagsK>(&label)) {
    std::set<ClassId> seen;
    for (const auto& t : counted->tags) {
      check_class(t.class_id, num_classes);
      if (t.count < 1) {
        throw InputError("tags_k count for class " + std::to_string(t.class_id) + " is below 1");
      }
      if (!seen.insert(t.class_id).second) {
        throw InputError("tags_k repeats class " + std::to_string(t.class_id));
      }
    }
  } else if (const auto* pk = std::get_if<PointsK>(&label)) {
    for (const auto& p : pk->points) check_class(p.class_id, num_classes);
  } else if (const auto* full = std::get_if<Fully>(&label)) {
    for (const auto& o : full->objects) check_class(o.class_id, num_classes);
  }
}

void validate(const NoiseModel& noise) {
  if (!std::isfinite(noise.sigma_scale) || noise.sigma_scale < 0.0) {
    throw InputError("noise sigma_scale must be finite and non-negative");
  }
  if (!std::isfinite(noise.side_exponent)) {
    throw InputError("noise side_exponent must be finite");
  }
}

BoundingBox simulate_ec(const BoundingBox& gt, const NoiseModel& noise) {
  validate(noise);
  return perturb(gt, draw_normals(noise.seed), noise.sigma_scale, noise.side_exponent);
}

std::vector<BoundingBox> simulate_ec(std::span<const BoundingBox> gt, const NoiseModel& noise) {
  validate(noise);
  std::vector<BoundingBox> out;
  out.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    out.push_back(perturb(gt[i], draw_normals(derive_seed(noise.seed, i)), noise.sigma_scale,
                          noise.side_exponent));
  }
  return out;
}

IouStats ec_iou_stats(std::span<const BoundingBox> sample, const NoiseModel& noise) {
  if (sample.empty()) throw InputError("IoU statistics need a non-empty box sample");
  const auto simulated = simulate_ec(sample, noise);
  std::vector<double> ious(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) ious[i] = iou(sample[i], simulated[i]);
  return moments(ious);
}

NoiseModel calibrate_ec(double target_mean, double target_std, std::span<const BoundingBox> sample,
                        std::uint64_t seed) {
  if (!(target_mean > 0.0 && target_mean < 1.0)) {
    throw InputError("target mean IoU must lie in (0, 1), got " + std::to_string(target_mean));
  }
  if (!(target_std >= 0.0)) throw InputError("target IoU std must be non-negative");
  if (sample.empty()) throw InputError("calibration needs a non-empty box sample");

  // Common random numbers: each box keeps its normals across all evaluations.
  std::vector<Normals> normals(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) normals[i] = draw_normals(derive_seed(seed, i));

  std::vector<double> ious(sample.size());
  auto stats_at = [&](double sigma, double exponent) {
    for (std::size_t i = 0; i < sample.size(); ++i) {
      ious[i] = iou(sample[i], perturb(sample[i], normals[i], sigma, exponent));
    }
    return moments(ious);
  };

  auto fit_sigma = [&](double exponent) {
    double lo = 0.0;
    double hi = 1e-3;
    while (stats_at(hi, exponent).mean > target_mean) {
      hi *= 2.0;
      if (hi > 1e3) throw InputError("target mean IoU is unattainable on this sample");
    }
    for (int it = 0; it < 48; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (stats_at(mid, exponent).mean > target_mean) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  // At a fixed mean, the IoU spread shrinks as the noise tracks box size more closely.
  auto std_at = [&](double exponent) { return stats_at(fit_sigma(exponent), exponent).std; };

  double exponent = 0.0;
  if (std_at(0.0) > target_std) {
    if (std_at(1.0) >= target_std) {
      exponent = 1.0;
    } else {
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 10; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std_at(mid) > target_std) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      exponent = 0.5 * (lo + hi);
    }
  }
  return {fit_sigma(exponent), exponent, seed};
}

std::vector<BoundingBox> coco_like_boxes(std::size_t n, std::uint64_t seed) {
  constexpr double kFrameW = 640.0;
  constexpr double kFrameH = 480.0;
  Rng rng(seed);
  std::vector<BoundingBox> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double bucket = rng.uniform();
    double area = 0.0;
    if (bucket < 0.41) {
      area = rng.uniform(16.0, 32.0 * 32.0);
    } else if (bucket < 0.76) {
      area = rng.uniform(32.0 * 32.0, 96.0 * 96.0);
    } else {
      area = rng.uniform(96.0 * 96.0, 0.8 * kFrameW * kFrameH);
    }
    const double aspect = std::exp(0.6 * rng.normal());
    const double w = std::clamp(std::sqrt(area * aspect), 2.0, kFrameW);
    const double h = std::clamp(std::sqrt(area / aspect), 2.0, kFrameH);
    const double x = rng.uniform(0.0, kFrameW - w);
    const double y = rng.uniform(0.0, kFrameH - h);
    out.push_back(BoundingBox::from_pixel_xywh(x, y, w, h, {kFrameW, kFrameH}));
  }
  return out;
}

Point2D sample_interior_point(const BoundingBox& box, Rng& rng) {
  const double x = std::clamp(box.x_min() + box.w() * rng.uniform(), box.x_min(), box.x_max());
  const double y = std::clamp(box.y_min() + box.h() * rng.uniform(), box.y_min(), box.y_max());
  return {std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)};
}

OmniLabel downgrade(const Fully& full, LabelFormat target, std::uint64_t seed,
                    const NoiseModel& ec_noise) {
  switch (target) {
    case LabelFormat::none:
      return NoLabel{};
    case LabelFormat::tags_u: {
      std::set<ClassId> classes;
      for (const auto& o : full.objects) classes.insert(o.class_id);
      return TagsU{{classes.begin(), classes.end()}};
    }
    case LabelFormat::tags_k: {
      std::map<ClassId, int> counts;
      for (const auto& o : full.objects) ++counts[o.class_id];
      TagsK out;
      for (const auto& [c, n] : counts) out.tags.push_back({c, n});
      return out;
    }
    case LabelFormat::points_u: {
      Rng rng(seed);
      PointsU out;
      for (const auto& o : full.objects) out.points.push_back(sample_interior_point(o.box, rng));
      return out;
    }
    case LabelFormat::points_k: {
      Rng rng(seed);
      PointsK out;
      for (const auto& o : full.objects) {
        out.points.push_back({sample_interior_point(o.box, rng), o.class_id});
      }
      return out;
    }
    case LabelFormat::boxes_u: {
      BoxesU out;
      for (const auto& o : full.objects) out.boxes.push_back(o.box);
      return out;
    }
    case LabelFormat::boxes_ec: {
      std::vector<BoundingBox> gt;
      for (const auto& o : full.objects) gt.push_back(o.box);
      NoiseModel noise = ec_noise;
      noise.seed = seed;
      return BoxesEC{simulate_ec(gt, noise)};
    }
    case LabelFormat::fully:
      return full;
  }
  throw InputError("unknown target label format");
}

}  // namespace omnilabel
