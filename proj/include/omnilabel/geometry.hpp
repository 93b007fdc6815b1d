#pragma once

#include <array>

namespace omnilabel {

// Boxes thinner than this (normalized units) are rejected at construction.
inline constexpr double kMinBoxSide = 1e-6;

struct ImageSize {
  double width = 0.0;
  double height = 0.0;
};

// A point in normalized image coordinates, both components in [0, 1].
class Point2D {
 public:
  // Throws InputError when a coordinate is non-finite or outside [0, 1].
  Point2D(double x, double y);

  double x() const { return x_; }
  double y() const { return y_; }

  bool operator==(const Point2D&) const = default;

 private:
  double x_;
  double y_;
};

struct CornerBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

/// Axis-aligned box in normalized center-size form (cx, cy, w, h).
///
/// Every factory clamps the box extent to the unit square and throws
/// InputError if the clamped width or height is below kMinBoxSide. A box that
/// is already inside the unit square keeps its center-size values bit-exact.
class BoundingBox {
 public:
  static BoundingBox from_cxcywh(double cx, double cy, double w, double h);
  static BoundingBox from_corners(double x_min, double y_min, double x_max, double y_max);
  static BoundingBox from_corners(const CornerBox& c) {
    return from_corners(c.x_min, c.y_min, c.x_max, c.y_max);
  }
  // COCO-style [x, y, w, h] in absolute pixels.
  static BoundingBox from_pixel_xywh(double x, double y, double w, double h, ImageSize image);
  static BoundingBox from_pixel_corners(const CornerBox& px, ImageSize image);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double x_min() const { return cx_ - 0.5 * w_; }
  double y_min() const { return cy_ - 0.5 * h_; }
  double x_max() const { return cx_ + 0.5 * w_; }
  double y_max() const { return cy_ + 0.5 * h_; }
  double area() const { return w_ * h_; }

  CornerBox corners() const { return {x_min(), y_min(), x_max(), y_max()}; }
  CornerBox to_pixel_corners(ImageSize image) const;
  std::array<double, 4> to_pixel_xywh(ImageSize image) const;
  std::array<double, 4> to_array() const { return {cx_, cy_, w_, h_}; }

  bool operator==(const BoundingBox&) const = default;

 private:
  BoundingBox(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {}

  double cx_;
  double cy_;
  double w_;
  double h_;
};

double iou(const BoundingBox& a, const BoundingBox& b);

// Generalized IoU in [-1, 1]; the matching and box losses use 1 - giou.
double giou(const BoundingBox& a, const BoundingBox& b);

// Sum of absolute differences of the four center-size coordinates.
double l1_box(const BoundingBox& a, const BoundingBox& b);

// Euclidean distance between a point and the box center.
double center_distance(const Point2D& p, const BoundingBox& b);

// Closed-interval containment: points on an edge count as inside.
bool contains(const BoundingBox& b, const Point2D& p);

}  // namespace omnilabel
