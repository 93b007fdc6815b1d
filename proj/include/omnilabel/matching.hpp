#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "omnilabel/matrix.hpp"

namespace omnilabel {

// Finite stand-in for an infeasible (infinite) pairing cost.
inline constexpr double kInfeasibleCost = 1e8;

// Entry (i, j) is perturbed by kTieBreakEpsilon * (i * K + j) before solving,
// so equal-cost alternatives resolve the same way in every solver.
inline constexpr double kTieBreakEpsilon = 1e-12;

// G x K matrix: rows are ground-truth omni-labels, columns teacher queries.
class CostMatrix : public Matrix {
 public:
  using Matrix::Matrix;
  CostMatrix() = default;
  explicit CostMatrix(Matrix m) : Matrix(std::move(m)) {}
};

struct Assignment {
  std::vector<int> match;            // match[i] = column assigned to row i
  double total_cost = 0.0;           // sum of unperturbed entries
  std::vector<int> infeasible_rows;  // rows whose matched entry >= kInfeasibleCost / 2
};

// Minimum-cost injective row -> column assignment, O(G^2 K).
// Throws DimensionError if K < G or the matrix is empty, InputError on non-finite entries.
Assignment hungarian(const CostMatrix& cost);

// Exhaustive search over all K!/(K-G)! injections. Throws DimensionError if
// the count exceeds max_injections.
Assignment brute_force(const CostMatrix& cost, std::uint64_t max_injections = 10'000'000);

using AssignmentSolver = std::function<Assignment(const CostMatrix&)>;

}  // namespace omnilabel
