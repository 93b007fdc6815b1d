#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "omnilabel/error.hpp"
#include "omnilabel/filtering.hpp"
#include "support.hpp"

using namespace omnilabel;
using testing::from_probs;
using testing::repeat;

namespace {
const BoundingBox kMid = BoundingBox::from_cxcywh(0.5, 0.5, 0.2, 0.2);
}

TEST_CASE("none mode thresholds strictly") {
  FilterConfig cfg;
  auto sp = score(from_probs({{0.5, 0.5}, {0.5, 0.5}}, repeat(kMid, 2)));
  CHECK(filter_none(sp, repeat(kMid, 2), cfg).items.empty());

  sp = score(from_probs({{0.9, 0.1}, {0.29, 0.71}, {0.7, 0.3}}, repeat(kMid, 3)));
  sp.score[2] = 0.7;  // exactly at the threshold
  const auto out = filter_none(sp, repeat(kMid, 3), cfg);
  REQUIRE(out.items.size() == 2);
  CHECK(out.items[0].source_query == 0);
  CHECK(out.items[1].source_query == 1);
  CHECK(out.items[1].class_id == 1);
}

TEST_CASE("count prediction") {
  auto sp = score(from_probs({{0.8, 0.2}, {0.75, 0.25}, {0.3, 0.7}, {0.1, 0.9}}, repeat(kMid, 4)));
  const std::vector<ClassId> tags{0, 1};
  const auto n = predict_counts(sp, tags, 0.7);
  CHECK(n[0] == 2);
  CHECK(n[1] == 1);  // 0.7 is not above tau, 0.9 is
  auto flat = score(from_probs({{0.5, 0.5}, {0.5, 0.5}}, repeat(kMid, 2)));
  CHECK(predict_counts(flat, tags, 0.7) == std::vector<int>{1, 1});
}

TEST_CASE("tag cost") {
  auto sp = score(from_probs({{0.25, 0.25, 0.25, 0.25}, {1.0, 1e-300, 1e-300, 1e-300}, {0.1, 0.2, 0.3, 0.4}}, repeat(kMid, 3)));
  const std::vector<ClassId> rows{0, 0, 2};
  const auto c = tag_cost(sp, rows);
  CHECK(c(0, 0) == doctest::Approx(0.75));
  CHECK(c(2, 0) == doctest::Approx(0.75));
  CHECK(c(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c(0, 0) == c(1, 0));
  CHECK(c(0, 1) == c(1, 1));
}

TEST_CASE("point cost") {
  const std::vector<BoundingBox> boxes{BoundingBox::from_cxcywh(0.3, 0.3, 0.2, 0.2),
                                       BoundingBox::from_cxcywh(0.7, 0.7, 0.2, 0.2),
                                       BoundingBox::from_cxcywh(0.35, 0.3, 0.4, 0.2)};
  auto sp = score(from_probs({{1.0, 1e-300}, {0.6, 0.4}, {0.5, 0.5}}, boxes));
  const std::vector<Point2D> pts{Point2D(0.3, 0.3), Point2D(0.95, 0.05)};
  const auto c = point_cost(sp, boxes, pts);
  // point at the center of query 0 with score 1: the minimum distance maps to 0
  CHECK(c(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c(0, 1) == kInfeasibleCost);
  // oracle: distances over all pairs, min-max normalized
  std::vector<double> d;
  for (const auto& p : pts)
    for (const auto& b : boxes) d.push_back(std::hypot(p.x() - b.cx(), p.y() - b.cy()));
  const double lo = *std::min_element(d.begin(), d.end()), hi = *std::max_element(d.begin(), d.end());
  CHECK(c(0, 2) == doctest::Approx((d[2] - lo) / (hi - lo) + 0.5).epsilon(1e-12));
  // second point lies in no box
  for (std::size_t k = 0; k < 3; ++k) CHECK(c(1, k) == kInfeasibleCost);

  // equal distances: 0/0 normalizes to zero
  const std::vector<BoundingBox> same = repeat(kMid, 2);
  auto sp2 = score(from_probs({{0.9, 0.1}, {0.6, 0.4}}, same));
  const std::vector<Point2D> centre{Point2D(0.5, 0.5)};
  const auto c2 = point_cost(sp2, same, centre);
  CHECK(c2(0, 0) == doctest::Approx(0.1));
  CHECK(c2(0, 1) == doctest::Approx(0.4));
}

TEST_CASE("point and tag endpoints") {
  const std::vector<BoundingBox> boxes{BoundingBox::from_cxcywh(0.3, 0.3, 0.3, 0.3),
                                       BoundingBox::from_cxcywh(0.4, 0.4, 0.3, 0.3),
                                       BoundingBox::from_cxcywh(0.8, 0.8, 0.1, 0.1)};
  auto sp = score(from_probs({{0.7, 0.3}, {0.2, 0.8}, {0.5, 0.5}}, boxes));
  const std::vector<LabeledPoint> pairs{{Point2D(0.35, 0.35), 1}, {Point2D(0.25, 0.3), 0}};
  const std::vector<Point2D> pts{pairs[0].point, pairs[1].point};
  const std::vector<ClassId> cls{1, 0};
  const auto p0 = point_tag_cost(sp, boxes, pairs, 0.0);
  const auto p1 = point_tag_cost(sp, boxes, pairs, 1.0);
  const auto pc = point_cost(sp, boxes, pts);
  const auto tc = tag_cost(sp, cls);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(p0(i, k) == pc(i, k));
      if (pc(i, k) < kInfeasibleCost) CHECK(p1(i, k) == tc(i, k));
      else CHECK(p1(i, k) == kInfeasibleCost);
    }
  }
}

TEST_CASE("box cost") {
  const auto a = BoundingBox::from_corners(0, 0, 1.0 / 3, 1.0 / 3);
  const auto b = BoundingBox::from_corners(2.0 / 3, 2.0 / 3, 1, 1);
  const std::vector<BoundingBox> pred{a, b};
  const std::vector<BoundingBox> gt{b};
  const auto c = box_cost(pred, gt, 2.0, 5.0);
  CHECK(c(0, 0) == doctest::Approx(32.0 / 9 + 20.0 / 3).epsilon(1e-12));
  CHECK(c(0, 1) == 0.0);
}

TEST_CASE("unified filter on tags") {
  auto pred = from_probs({{0.9, 0.1}, {0.2, 0.8}}, repeat(kMid, 2));
  const auto out = unified_filter(pred, TagsU{{0, 1}}, FilterConfig{});
  REQUIRE(out.items.size() == 2);
  CHECK(out.items[0].source_query == 0);
  CHECK(out.items[0].class_id == 0);
  CHECK(out.items[1].source_query == 1);
  CHECK(out.items[1].class_id == 1);
  CHECK(out.items[0].matched_cost + out.items[1].matched_cost == doctest::Approx(0.3));

  // TagsK multiset is preserved
  auto pred3 = from_probs({{0.6, 0.4}, {0.5, 0.5}, {0.3, 0.7}, {0.1, 0.9}}, repeat(kMid, 4));
  const auto out3 = unified_filter(pred3, TagsK{{{0, 1}, {1, 2}}}, FilterConfig{});
  std::vector<ClassId> cls;
  for (const auto& it : out3.items) cls.push_back(it.class_id);
  std::sort(cls.begin(), cls.end());
  CHECK(cls == std::vector<ClassId>{0, 1, 1});
  CHECK_THROWS_AS(unified_filter(pred3, TagsK{{{0, 3}, {1, 2}}}, FilterConfig{}), DimensionError);
}

TEST_CASE("unified filter on boxes emits the labeled boxes") {
  const std::vector<BoundingBox> boxes{BoundingBox::from_cxcywh(0.2, 0.2, 0.1, 0.1),
                                       BoundingBox::from_cxcywh(0.7, 0.7, 0.2, 0.2)};
  auto pred = from_probs({{0.8, 0.2}, {0.3, 0.7}}, boxes);
  const BoundingBox label = BoundingBox::from_cxcywh(0.69, 0.71, 0.2, 0.22);
  for (auto l : {OmniLabel(BoxesU{{label}}), OmniLabel(BoxesEC{{label}})}) {
    const auto out = unified_filter(pred, l, FilterConfig{});
    REQUIRE(out.items.size() == 1);
    CHECK(out.items[0].box == label);
    CHECK(out.items[0].source_query == 1);
    CHECK(out.items[0].class_id == 1);
  }
}

TEST_CASE("unified filter on points flags infeasible rows") {
  const std::vector<BoundingBox> boxes{BoundingBox::from_cxcywh(0.2, 0.2, 0.1, 0.1),
                                       BoundingBox::from_cxcywh(0.7, 0.7, 0.2, 0.2)};
  auto pred = from_probs({{0.8, 0.2}, {0.3, 0.7}}, boxes);
  const PointsU pts{{Point2D(0.72, 0.7), Point2D(0.5, 0.1)}};
  auto out = unified_filter(pred, pts, FilterConfig{});
  REQUIRE(out.items.size() == 2);
  CHECK(out.items[0].source_query == 1);
  CHECK_FALSE(out.items[0].infeasible);
  CHECK(out.items[1].infeasible);
  FilterConfig drop;
  drop.drop_infeasible = true;
  out = unified_filter(pred, pts, drop);
  CHECK(out.items.size() == 1);
}

TEST_CASE("simple filter rules") {
  FilterConfig cfg;
  auto pred = from_probs({{0.6, 0.4}, {0.55, 0.45}, {0.3, 0.7}}, repeat(kMid, 3));
  auto out = simple_filter(pred, TagsU{{0}}, cfg);
  REQUIRE(out.items.size() == 1);  // top-1 fallback
  CHECK(out.items[0].source_query == 0);

  auto pred4 = from_probs({{0.6, 0.4}, {0.9, 0.1}, {0.3, 0.7}, {0.8, 0.2}}, repeat(kMid, 4));
  out = simple_filter(pred4, TagsK{{{0, 3}}}, cfg);
  std::vector<int> q;
  for (const auto& it : out.items) q.push_back(it.source_query);
  CHECK(q == std::vector<int>{1, 3, 0});

  const std::vector<BoundingBox> boxes{BoundingBox::from_cxcywh(0.5, 0.5, 0.4, 0.4),
                                       BoundingBox::from_cxcywh(0.5, 0.5, 0.2, 0.2)};
  auto pp = from_probs({{0.6, 0.4}, {0.1, 0.9}}, boxes);
  out = simple_filter(pp, PointsU{{Point2D(0.5, 0.5)}}, cfg);
  REQUIRE(out.items.size() == 1);
  CHECK(out.items[0].source_query == 1);
  out = simple_filter(pp, PointsK{{{Point2D(0.5, 0.5), 0}}}, cfg);
  REQUIRE(out.items.size() == 1);
  CHECK(out.items[0].source_query == 0);
  CHECK_THROWS_AS(simple_filter(pp, BoxesU{{kMid}}, cfg), InputError);
}

TEST_CASE("configuration checks") {
  FilterConfig cfg;
  cfg.tau = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  auto pred = from_probs({{0.6, 0.4}}, {kMid});
  CHECK_THROWS_AS(unified_filter(pred, TagsU{}, FilterConfig{}), InputError);
  CHECK_THROWS_AS(unified_filter(pred, Fully{}, FilterConfig{}), InputError);
  CHECK_THROWS_AS(unified_filter(pred, TagsU{{4}}, FilterConfig{}), InputError);
}
