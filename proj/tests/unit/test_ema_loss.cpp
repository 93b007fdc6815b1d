#include <cmath>

#include "doctest.h"
#include "omnilabel/ema.hpp"
#include "omnilabel/error.hpp"
#include "omnilabel/loss.hpp"
#include "omnilabel/random.hpp"

using namespace omnilabel;

TEST_CASE("ema endpoints and arithmetic") {
  const ParamVector t{{1.0, -2.0, 3.5}, 4};
  const ParamVector s{{0.0, 1.0, 7.0}, 0};
  CHECK(ema_step(t, s, 1.0).values == t.values);
  CHECK(ema_step(t, s, 0.0).values == s.values);
  CHECK(ema_step(t, s, 1.0).version == 5);
  const auto one = ema_step(ParamVector{{1.0}, 0}, ParamVector{{0.0}, 0});
  CHECK(one.values[0] == doctest::Approx(0.9996).epsilon(1e-15));
  CHECK_THROWS_AS(ema_step(t, ParamVector{{1.0}, 0}), DimensionError);
  CHECK_THROWS_AS(ema_step(t, s, 1.5), InputError);
  CHECK_THROWS_AS(ema_step(t, ParamVector{{0, NAN, 0}, 0}), InputError);
}

namespace {

// Independent focal loss of a single logit.
double focal(double z, bool pos) {
  const double p = 1 / (1 + std::exp(-z));
  return pos ? -0.25 * (1 - p) * (1 - p) * std::log(p) : -0.75 * p * p * std::log(1 - p);
}

}  // namespace

TEST_CASE("loss on a hand-sized example") {
  Matrix logits(2, 2);
  logits(0, 0) = 2.0;
  logits(0, 1) = -1.0;
  logits(1, 0) = -0.5;
  logits(1, 1) = 0.3;
  const auto b0 = BoundingBox::from_cxcywh(0.3, 0.3, 0.2, 0.2);
  const auto b1 = BoundingBox::from_cxcywh(0.7, 0.6, 0.2, 0.3);
  const TeacherPrediction pred(1, logits, {b0, b1});
  const auto label = BoundingBox::from_cxcywh(0.32, 0.3, 0.2, 0.22);
  const std::vector<LabeledBox> labels{{label, 0}};
  const auto out = eval_loss(pred, labels);
  const double cls = focal(2.0, true) + focal(-1.0, false) + focal(-0.5, false) + focal(0.3, false);
  CHECK(out.cls == doctest::Approx(cls).epsilon(1e-12));
  const double box = 2 * (1 - giou(label, b0)) + 5 * l1_box(label, b0);
  CHECK(out.box == doctest::Approx(box).epsilon(1e-12));
  CHECK(out.total == doctest::Approx(2 * cls + 5 * box).epsilon(1e-12));

  const auto empty = eval_loss(pred, std::vector<LabeledBox>{});
  CHECK(empty.box == 0.0);
  CHECK(empty.cls == doctest::Approx(focal(2.0, false) + focal(-1.0, false) + focal(-0.5, false) +
                                     focal(0.3, false)).epsilon(1e-12));
}

TEST_CASE("perfect prediction has no box loss") {
  Matrix logits(3, 2, -8.0);
  logits(1, 1) = 30.0;
  const auto b = BoundingBox::from_cxcywh(0.45, 0.55, 0.3, 0.1);
  const TeacherPrediction pred(1, logits, {BoundingBox::from_cxcywh(0.1, 0.1, 0.1, 0.1), b,
                                           BoundingBox::from_cxcywh(0.9, 0.9, 0.1, 0.1)});
  const std::vector<LabeledBox> labels{{b, 1}};
  CHECK(eval_loss(pred, labels).box == 0.0);
  const std::vector<LabeledBox> bad{{b, 2}};
  CHECK_THROWS_AS(eval_loss(pred, bad), InputError);
}
