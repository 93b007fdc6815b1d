#pragma once

#include <cstdint>
#include <vector>

namespace omnilabel {

inline constexpr double kDefaultEmaDecay = 0.9996;

// Flat parameter vector of a model; version counts applied EMA steps.
struct ParamVector {
  std::vector<double> values;
  std::int64_t version = 0;

  bool operator==(const ParamVector&) const = default;
};

// teacher <- k * teacher + (1 - k) * student, elementwise; version + 1.
// Throws DimensionError on a length mismatch and InputError for k outside
// [0, 1] or non-finite entries.
ParamVector ema_step(const ParamVector& teacher, const ParamVector& student,
                     double k = kDefaultEmaDecay);

}  // namespace omnilabel
