#include "omnilabel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omnilabel/error.hpp"

namespace omnilabel {

namespace {

bool finite(double v) { return std::isfinite(v); }

[[noreturn]] void reject(const char* what, double a, double b, double c, double d) {
  std::ostringstream os;
  os << what << " (" << a << ", " << b << ", " << c << ", " << d << ")";
  throw InputError(os.str());
}

// Area from corner differences, the same arithmetic as the intersection, so a
// box overlaps itself exactly.
double corner_area(const BoundingBox& b) { return (b.x_max() - b.x_min()) * (b.y_max() - b.y_min()); }

}  // namespace

Point2D::Point2D(double x, double y) : x_(x), y_(y) {
  if (!finite(x) || !finite(y) || x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) {
    std::ostringstream os;
    os << "point outside the unit square: (" << x << ", " << y << ")";
    throw InputError(os.str());
  }
}

BoundingBox BoundingBox::from_cxcywh(double cx, double cy, double w, double h) {
  if (!finite(cx) || !finite(cy) || !finite(w) || !finite(h)) {
    reject("non-finite box", cx, cy, w, h);
  }
  const double x0 = cx - 0.5 * w;
  const double y0 = cy - 0.5 * h;
  const double x1 = cx + 0.5 * w;
  const double y1 = cy + 0.5 * h;
  if (x0 < 0.0 || y0 < 0.0 || x1 > 1.0 || y1 > 1.0) {
    return from_corners(x0, y0, x1, y1);
  }
  if (w < kMinBoxSide || h < kMinBoxSide) reject("degenerate box", cx, cy, w, h);
  return BoundingBox(cx, cy, w, h);
}

BoundingBox BoundingBox::from_corners(double x_min, double y_min, double x_max, double y_max) {
  if (!finite(x_min) || !finite(y_min) || !finite(x_max) || !finite(y_max)) {
    reject("non-finite box corners", x_min, y_min, x_max, y_max);
  }
  const double x0 = std::clamp(x_min, 0.0, 1.0);
  const double y0 = std::clamp(y_min, 0.0, 1.0);
  const double x1 = std::clamp(x_max, 0.0, 1.0);
  const double y1 = std::clamp(y_max, 0.0, 1.0);
  const double w = x1 - x0;
  const double h = y1 - y0;
  if (w < kMinBoxSide || h < kMinBoxSide) {
    reject("degenerate box corners", x_min, y_min, x_max, y_max);
  }
  return BoundingBox(0.5 * (x0 + x1), 0.5 * (y0 + y1), w, h);
}

BoundingBox BoundingBox::from_pixel_xywh(double x, double y, double w, double h, ImageSize image) {
  return from_pixel_corners({x, y, x + w, y + h}, image);
}

BoundingBox BoundingBox::from_pixel_corners(const CornerBox& px, ImageSize image) {
  if (!(image.width > 0.0) || !(image.height > 0.0)) {
    throw InputError("image size must be positive");
  }
  if (px.x_max - px.x_min <= 0.0 || px.y_max - px.y_min <= 0.0) {
    reject("non-positive pixel extent", px.x_min, px.y_min, px.x_max, px.y_max);
  }
  return from_corners(px.x_min / image.width, px.y_min / image.height, px.x_max / image.width,
                      px.y_max / image.height);
}

CornerBox BoundingBox::to_pixel_corners(ImageSize image) const {
  return {x_min() * image.width, y_min() * image.height, x_max() * image.width,
          y_max() * image.height};
}

std::array<double, 4> BoundingBox::to_pixel_xywh(ImageSize image) const {
  return {x_min() * image.width, y_min() * image.height, w_ * image.width, h_ * image.height};
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double ih = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (corner_area(a) + corner_area(b) - inter);
}

double giou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::max(0.0, std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min()));
  const double ih = std::max(0.0, std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min()));
  const double inter = iw * ih;
  const double uni = corner_area(a) + corner_area(b) - inter;
  const double ew = std::max(a.x_max(), b.x_max()) - std::min(a.x_min(), b.x_min());
  const double eh = std::max(a.y_max(), b.y_max()) - std::min(a.y_min(), b.y_min());
  const double enclosing = ew * eh;
  return inter / uni - (enclosing - uni) / enclosing;
}

double l1_box(const BoundingBox& a, const BoundingBox& b) {
  return std::abs(a.cx() - b.cx()) + std::abs(a.cy() - b.cy()) + std::abs(a.w() - b.w()) +
         std::abs(a.h() - b.h());
}

double center_distance(const Point2D& p, const BoundingBox& b) {
  return std::hypot(p.x() - b.cx(), p.y() - b.cy());
}

bool contains(const BoundingBox& b, const Point2D& p) {
  return p.x() >= b.x_min() && p.x() <= b.x_max() && p.y() >= b.y_min() && p.y() <= b.y_max();
}

}  // namespace omnilabel
