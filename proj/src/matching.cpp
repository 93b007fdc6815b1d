#include "omnilabel/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "omnilabel/error.hpp"

namespace omnilabel {

namespace {

void check_shape(const CostMatrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    throw DimensionError("cost matrix must have at least one row and one column");
  }
  if (cost.cols() < cost.rows()) {
    throw DimensionError("cost matrix has " + std::to_string(cost.rows()) + " rows but only " +
                         std::to_string(cost.cols()) + " columns");
  }
  for (double v : cost.data()) {
    if (!std::isfinite(v)) throw InputError("cost matrix contains a non-finite entry");
  }
}

double perturbed(const CostMatrix& cost, std::size_t i, std::size_t j) {
  return cost(i, j) + kTieBreakEpsilon * static_cast<double>(i * cost.cols() + j);
}

Assignment finish(const CostMatrix& cost, std::vector<int> match) {
  Assignment out;
  out.match = std::move(match);
  for (std::size_t i = 0; i < out.match.size(); ++i) {
    const double v = cost(i, static_cast<std::size_t>(out.match[i]));
    out.total_cost += v;
    if (v >= 0.5 * kInfeasibleCost) out.infeasible_rows.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

Assignment hungarian(const CostMatrix& cost) {
  check_shape(cost);
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Shortest augmenting path with row/column potentials; index 0 is a
  // virtual column used as the root of each search.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = perturbed(cost, i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> match(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) match[owner[j] - 1] = static_cast<int>(j - 1);
  }
  return finish(cost, std::move(match));
}

Assignment brute_force(const CostMatrix& cost, std::uint64_t max_injections) {
  check_shape(cost);
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();

  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t factor = m - i;
    if (count > max_injections / factor) {
      throw DimensionError("brute-force instance " + std::to_string(n) + "x" + std::to_string(m) +
                           " exceeds " + std::to_string(max_injections) + " injections");
    }
    count *= factor;
  }

  std::vector<int> current(n, -1), best;
  std::vector<char> taken(m, 0);
  double best_cost = std::numeric_limits<double>::infinity();

  // Columns are tried in ascending order, so the first strict minimum found is
  // the lexicographically smallest among exact ties of the perturbed cost.
  auto search = [&](auto&& self, std::size_t row, double partial) -> void {
    if (row == n) {
      if (partial < best_cost) {
        best_cost = partial;
        best = current;
      }
      return;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (taken[j]) continue;
      taken[j] = 1;
      current[row] = static_cast<int>(j);
      self(self, row + 1, partial + perturbed(cost, row, j));
      taken[j] = 0;
    }
  };
  search(search, 0, 0.0);
  return finish(cost, std::move(best));
}

}  // namespace omnilabel
