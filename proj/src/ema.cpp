#include "omnilabel/ema.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omnilabel/error.hpp"

namespace omnilabel {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ParamVector ema_step(const ParamVector& teacher, const ParamVector& student, double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw InputError("EMA decay must lie in [0, 1]");
  if (teacher.values.size() != student.values.size()) {
    throw DimensionError("teacher has " + std::to_string(teacher.values.size()) +
                         " parameters, student has " + std::to_string(student.values.size()));
  }
  if (!all_finite(teacher.values) || !all_finite(student.values)) {
    throw InputError("parameter vectors must be finite");
  }
  ParamVector out{std::vector<double>(teacher.values.size()), teacher.version + 1};
  const double keep = 1.0 - k;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = k * teacher.values[i] + keep * student.values[i];
  }
  return out;
}

}  // namespace omnilabel
