#include "doctest.h"
#include "omnilabel/error.hpp"
#include "omnilabel/quality.hpp"

using namespace omnilabel;

namespace {
PseudoLabel item(const BoundingBox& b, ClassId c) { return {b, c, 0.9, 0, 0, 0.0, false}; }
}  // namespace

TEST_CASE("quality scoring") {
  const auto a = BoundingBox::from_cxcywh(0.3, 0.3, 0.2, 0.2);
  const auto b = BoundingBox::from_cxcywh(0.7, 0.7, 0.2, 0.2);
  const Fully gt{{{a, 1}, {b, 2}}};

  PseudoLabelSet exact{{item(a, 1), item(b, 2)}, {}};
  auto r = score_pseudo(exact, gt, 0.5);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.mean_iou_matched == 1.0);

  r = score_pseudo(PseudoLabelSet{}, gt, 0.5);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 0.0);

  // 0.2 x 0.2 box shifted so the overlap is 0.2 x 0.1143: IoU = 0.4
  const double shift = 0.2 - 0.2 * 0.8 / 1.4;
  const auto off = BoundingBox::from_cxcywh(0.3 + shift, 0.3, 0.2, 0.2);
  CHECK(iou(off, a) == doctest::Approx(0.4));
  r = score_pseudo(PseudoLabelSet{{item(off, 1)}, {}}, Fully{{{a, 1}}}, 0.5);
  CHECK(r.tp == 0);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);

  // wrong class never matches
  r = score_pseudo(PseudoLabelSet{{item(a, 2)}, {}}, Fully{{{a, 1}}}, 0.5);
  CHECK(r.tp == 0);

  QualityReport sum;
  sum += score_pseudo(exact, gt, 0.5);
  sum += score_pseudo(PseudoLabelSet{}, gt, 0.5);
  CHECK(sum.recall == doctest::Approx(0.5));
  CHECK_THROWS_AS(score_pseudo(exact, gt, 1.0), InputError);
}
