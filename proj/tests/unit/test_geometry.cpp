#include <cmath>

#include "doctest.h"
#include "omnilabel/error.hpp"
#include "omnilabel/geometry.hpp"
#include "omnilabel/random.hpp"

using namespace omnilabel;

namespace {
// Corner boxes given on a 3x3 canvas, normalized.
BoundingBox c3(double x0, double y0, double x1, double y1) {
  return BoundingBox::from_corners(x0 / 3, y0 / 3, x1 / 3, y1 / 3);
}
}  // namespace

TEST_CASE("iou") {
  const auto b = BoundingBox::from_cxcywh(0.4, 0.6, 0.3, 0.2);
  CHECK(iou(b, b) == 1.0);
  CHECK(iou(c3(0, 0, 1, 1), c3(2, 2, 3, 3)) == 0.0);
  CHECK(iou(c3(0, 0, 2, 2), c3(1, 1, 3, 3)) == doctest::Approx(1.0 / 7).epsilon(1e-12));
  // touching edges have no area in common
  CHECK(iou(c3(0, 0, 1, 1), c3(1, 0, 2, 1)) == 0.0);
}

TEST_CASE("giou") {
  const auto b = BoundingBox::from_cxcywh(0.4, 0.6, 0.3, 0.2);
  CHECK(giou(b, b) == 1.0);
  CHECK(giou(c3(0, 0, 1, 1), c3(2, 2, 3, 3)) == doctest::Approx(-7.0 / 9).epsilon(1e-12));
  CHECK(giou(c3(0, 0, 2, 2), c3(1, 1, 3, 3)) == doctest::Approx(-5.0 / 63).epsilon(1e-12));

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    auto r = [&] {
      const double w = rng.uniform(0.01, 0.9), h = rng.uniform(0.01, 0.9);
      return BoundingBox::from_cxcywh(rng.uniform(w / 2, 1 - w / 2), rng.uniform(h / 2, 1 - h / 2), w, h);
    };
    const auto a = r(), c = r();
    const double g = giou(a, c);
    CHECK(g >= -1.0);
    CHECK(g <= iou(a, c) + 1e-15);
    CHECK(g == doctest::Approx(giou(c, a)).epsilon(1e-12));
  }
}

TEST_CASE("l1 and center distance") {
  const auto a = BoundingBox::from_cxcywh(0.5, 0.5, 0.2, 0.2);
  const auto b = BoundingBox::from_cxcywh(0.6, 0.5, 0.2, 0.4);
  CHECK(l1_box(a, a) == 0.0);
  CHECK(l1_box(a, b) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(l1_box(a, b) == l1_box(b, a));

  CHECK(center_distance(Point2D(0.5, 0.5), a) == 0.0);
  const auto c = BoundingBox::from_cxcywh(0.3, 0.4, 0.2, 0.2);
  CHECK(center_distance(Point2D(0, 0), c) == doctest::Approx(0.5).epsilon(1e-12));
  const auto c_t = BoundingBox::from_cxcywh(0.4, 0.3, 0.2, 0.2);
  CHECK(center_distance(Point2D(0.1, 0.7), c) == center_distance(Point2D(0.7, 0.1), c_t));
}

TEST_CASE("containment is closed") {
  const auto b = BoundingBox::from_corners(0.25, 0.25, 0.75, 0.5);
  CHECK(contains(b, Point2D(0.5, 0.375)));
  CHECK(contains(b, Point2D(0.25, 0.3)));
  CHECK(contains(b, Point2D(0.75, 0.5)));
  CHECK_FALSE(contains(b, Point2D(0.8, 0.4)));
  CHECK_FALSE(contains(b, Point2D(0.5, 0.51)));
}

TEST_CASE("construction and clamping") {
  CHECK_THROWS_AS(Point2D(1.1, 0.5), InputError);
  CHECK_THROWS_AS(Point2D(0.5, std::nan("")), InputError);
  CHECK_THROWS_AS(BoundingBox::from_cxcywh(0.5, 0.5, 0.0, 0.1), InputError);
  CHECK_THROWS_AS(BoundingBox::from_corners(0.5, 0.5, 0.4, 0.6), InputError);
  CHECK_THROWS_AS(BoundingBox::from_cxcywh(0.5, 0.5, INFINITY, 0.1), InputError);

  // partly outside: clamped to the unit square
  const auto b = BoundingBox::from_cxcywh(0.9, 0.5, 0.4, 0.2);
  CHECK(b.x_max() == doctest::Approx(1.0));
  CHECK(b.x_min() == doctest::Approx(0.7));
  CHECK(b.w() == doctest::Approx(0.3));
  // entirely outside: nothing left
  CHECK_THROWS_AS(BoundingBox::from_cxcywh(1.5, 0.5, 0.2, 0.2), InputError);

  const auto in = BoundingBox::from_cxcywh(0.123, 0.456, 0.1, 0.2);
  CHECK(in.cx() == 0.123);
  CHECK(in.h() == 0.2);
}

TEST_CASE("corner round trip") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double x0 = rng.uniform(0, 0.5), y0 = rng.uniform(0, 0.5);
    const double x1 = rng.uniform(0.5, 1), y1 = rng.uniform(0.5, 1);
    const auto c = BoundingBox::from_corners(x0, y0, x1, y1).corners();
    CHECK(std::abs(c.x_min - x0) < 1e-9);
    CHECK(std::abs(c.y_min - y0) < 1e-9);
    CHECK(std::abs(c.x_max - x1) < 1e-9);
    CHECK(std::abs(c.y_max - y1) < 1e-9);
  }
}

TEST_CASE("pixel conversion") {
  const auto b = BoundingBox::from_pixel_xywh(30, 30, 60, 60, {300, 300});
  CHECK(b.cx() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(b.cy() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(b.w() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(b.h() == doctest::Approx(0.2).epsilon(1e-12));
  const auto px = b.to_pixel_xywh({300, 300});
  CHECK(px[0] == doctest::Approx(30));
  CHECK(px[2] == doctest::Approx(60));
  CHECK_THROWS_AS(BoundingBox::from_pixel_xywh(10, 10, 0, 5, {100, 100}), InputError);
  CHECK_THROWS_AS(BoundingBox::from_pixel_xywh(10, 10, 5, 5, {0, 100}), InputError);
}
