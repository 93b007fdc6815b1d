#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "omnilabel/error.hpp"
#include "omnilabel/matching.hpp"
#include "omnilabel/random.hpp"

using namespace omnilabel;

namespace {

CostMatrix make(std::initializer_list<std::initializer_list<double>> rows) {
  CostMatrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

// Independent oracle: enumerate column permutations with std::next_permutation.
double oracle_cost(const CostMatrix& m) {
  std::vector<int> cols(m.cols());
  std::iota(cols.begin(), cols.end(), 0);
  double best = 1e300;
  do {
    double s = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, cols[i]);
    best = std::min(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

}  // namespace

TEST_CASE("small fixed instances") {
  auto a = hungarian(make({{1, 2}, {2, 1}}));
  CHECK(a.match == std::vector<int>{0, 1});
  CHECK(a.total_cost == 2.0);
  a = hungarian(make({{2, 1}, {1, 2}}));
  CHECK(a.match == std::vector<int>{1, 0});
  CHECK(a.total_cost == 2.0);

  using Solver = Assignment (*)(const CostMatrix&);
  for (Solver solve : {Solver{[](const CostMatrix& c) { return hungarian(c); }}, Solver{[](const CostMatrix& c) { return brute_force(c); }}}) {
    auto one = solve(make({{4.5}}));
    CHECK(one.match == std::vector<int>{0});
    CHECK(one.total_cost == 4.5);
    auto row = solve(make({{3, 1, 2}}));
    CHECK(row.match == std::vector<int>{1});
    CHECK(row.total_cost == 1.0);
  }
}

TEST_CASE("hungarian matches the oracle on random rectangular matrices") {
  Rng rng(42);
  for (int t = 0; t < 1000; ++t) {
    CostMatrix m(5, 8);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 8; ++j) m(i, j) = rng.uniform();
    const auto h = hungarian(m);
    CHECK(std::abs(h.total_cost - oracle_cost(m)) < 1e-9);
    CHECK(std::abs(h.total_cost - brute_force(m).total_cost) < 1e-9);
    std::vector<int> sorted = h.match;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }
}

TEST_CASE("exhaustive small integer matrices") {
  // every 2x2 and 3x3 matrix with entries in {0..3}
  for (std::size_t n : {2u, 3u}) {
    const std::size_t cells = n * n;
    std::size_t total = 1;
    for (std::size_t i = 0; i < cells; ++i) total *= 4;
    for (std::size_t code = 0; code < total; ++code) {
      CostMatrix m(n, n);
      std::size_t c = code;
      for (std::size_t i = 0; i < cells; ++i, c /= 4) m(i / n, i % n) = static_cast<double>(c % 4);
      const auto h = hungarian(m);
      const auto b = brute_force(m);
      REQUIRE(h.total_cost == b.total_cost);
      REQUIRE(h.total_cost == oracle_cost(m));
    }
  }
}

TEST_CASE("infeasible rows are reported") {
  auto m = make({{kInfeasibleCost, kInfeasibleCost, kInfeasibleCost}, {1, 2, 3}});
  const auto a = hungarian(m);
  CHECK(a.infeasible_rows == std::vector<int>{0});
  CHECK(a.match[1] == 0);
}

TEST_CASE("shape and value errors") {
  CHECK_THROWS_AS(hungarian(CostMatrix(3, 2)), DimensionError);
  CHECK_THROWS_AS(hungarian(CostMatrix()), DimensionError);
  auto m = make({{1, NAN}});
  CHECK_THROWS_AS(hungarian(m), InputError);
  CHECK_THROWS_AS(brute_force(CostMatrix(8, 20), 1000), DimensionError);
}
