#include "omnilabel/budget.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "omnilabel/error.hpp"

namespace omnilabel {

namespace {

const std::array<DatasetStats, 5> kProfiles = {{
    {"coco", 80, 3.5, 7.7, 118287},
    {"voc", 20, 1.4, 2.4, 22136},
    {"objects365", 365, 5.0, 15.8, 93455},
    {"bees", 1, 1.0, 7.14, 3596},
    {"crowdhuman", 1, 1.0, 22.64, 15000},
}};

constexpr std::uint64_t kMaxGridPoints = 20'000'000;

double points_k_seconds(const DatasetStats& s) {
  using namespace annotation_seconds;
  if (s.single_class()) return kPoint * s.avg_instances;
  return (s.num_classes - s.avg_classes) * kTagPerCategory + kFirstInstanceClick * s.avg_classes +
         kPoint * (s.avg_instances - s.avg_classes);
}

}  // namespace

void DatasetStats::validate() const {
  if (num_classes < 1) throw InputError("dataset '" + name + "' needs at least one category");
  if (!(avg_classes > 0.0 && avg_classes <= num_classes)) {
    throw InputError("dataset '" + name + "' needs 0 < C_avg <= C");
  }
  if (!(avg_instances >= avg_classes) || !std::isfinite(avg_instances)) {
    throw InputError("dataset '" + name + "' needs I_avg >= C_avg");
  }
}

std::span<const DatasetStats> builtin_profiles() { return kProfiles; }

std::optional<DatasetStats> find_profile(std::string_view name) {
  for (const auto& p : kProfiles) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

double cost_per_image(const DatasetStats& s, LabelFormat format) {
  using namespace annotation_seconds;
  s.validate();
  const double unseen_classes = (s.num_classes - s.avg_classes) * kTagPerCategory;
  switch (format) {
    case LabelFormat::none:
      return 0.0;
    case LabelFormat::tags_u:
      if (s.single_class()) {
        throw InputError("tags_u is not defined for single-class dataset '" + s.name + "'");
      }
      return kTagPerCategory * s.num_classes;
    case LabelFormat::tags_k:
      if (s.single_class()) return kSingleClassTagsKRatio * points_k_seconds(s);
      return unseen_classes + kCount * s.avg_classes + kCount * (s.avg_instances - s.avg_classes);
    case LabelFormat::points_u:
      return kPoint * s.avg_instances;
    case LabelFormat::points_k:
      return points_k_seconds(s);
    case LabelFormat::boxes_ec:
      return kExtremeClickBox * s.avg_instances;
    case LabelFormat::boxes_u:
      return kBox * s.avg_instances;
    case LabelFormat::fully:
      if (s.single_class()) return kBox * s.avg_instances;
      return unseen_classes + kBox * s.avg_instances;
  }
  throw InputError("unknown label format");
}

void MixturePolicy::validate() const {
  double total = 0.0;
  for (const auto& [format, fraction] : fractions) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      throw InputError("fraction for '" + std::string(to_string(format)) + "' outside [0, 1]");
    }
    total += fraction;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw InputError("policy fractions sum to " + std::to_string(total) + ", not 1");
  }
  if (dataset_size < 0) throw InputError("dataset size must be non-negative");
}

double policy_cost(const MixturePolicy& policy, const DatasetStats& stats) {
  policy.validate();
  double seconds = 0.0;
  for (const auto& [format, fraction] : policy.fractions) {
    if (fraction == 0.0) continue;
    seconds += static_cast<double>(policy.dataset_size) * fraction * cost_per_image(stats, format);
  }
  return seconds / 3600.0;
}

std::vector<MixturePolicy> enumerate_policies(const DatasetStats& stats, double budget_hours,
                                              std::span<const LabelFormat> formats, double step,
                                              std::int64_t dataset_size) {
  std::vector<LabelFormat> paid;
  for (LabelFormat f : formats) {
    if (f != LabelFormat::none && std::find(paid.begin(), paid.end(), f) == paid.end()) {
      paid.push_back(f);
    }
  }
  if (paid.empty()) throw InputError("policy enumeration needs at least one paid format");
  if (!(step > 0.0 && step <= 1.0)) throw InputError("grid step must lie in (0, 1]");
  const double steps_real = 1.0 / step;
  const auto units = static_cast<int>(std::llround(steps_real));
  if (std::abs(steps_real - units) > 1e-9 * steps_real) {
    throw InputError("grid step " + std::to_string(step) + " does not divide 1");
  }
  if (!(budget_hours >= 0.0)) throw InputError("budget must be non-negative");

  // Hours contributed by one grid unit of each format.
  std::vector<double> unit_hours;
  for (LabelFormat f : paid) {
    unit_hours.push_back(static_cast<double>(dataset_size) * cost_per_image(stats, f) /
                         (3600.0 * units));
  }

  // Grid points = C(units + m, m); refuse instances that would not fit in memory.
  double grid_points = 1.0;
  for (std::size_t i = 1; i <= paid.size(); ++i) {
    grid_points = grid_points * static_cast<double>(units + i) / static_cast<double>(i);
  }
  if (grid_points > static_cast<double>(kMaxGridPoints)) {
    throw InputError("policy grid too large; use a coarser step or fewer formats");
  }

  const double limit = budget_hours * 1.01;
  std::vector<std::vector<int>> accepted;
  std::vector<int> current(paid.size(), 0);
  auto search = [&](auto&& self, std::size_t idx, int remaining, double hours) -> void {
    if (hours > limit) return;
    if (idx == paid.size()) {
      accepted.push_back(current);
      return;
    }
    for (int u = 0; u <= remaining; ++u) {
      current[idx] = u;
      self(self, idx + 1, remaining - u, hours + u * unit_hours[idx]);
    }
    current[idx] = 0;
  };
  search(search, 0, units, 0.0);

  const auto fully_pos = std::find(paid.begin(), paid.end(), LabelFormat::fully) - paid.begin();
  const bool has_fully = static_cast<std::size_t>(fully_pos) < paid.size();
  std::sort(accepted.begin(), accepted.end(), [&](const auto& a, const auto& b) {
    if (has_fully && a[fully_pos] != b[fully_pos]) return a[fully_pos] < b[fully_pos];
    return a < b;
  });

  std::vector<MixturePolicy> out;
  out.reserve(accepted.size());
  for (const auto& grid : accepted) {
    MixturePolicy policy;
    policy.dataset_size = dataset_size;
    int used = 0;
    for (std::size_t i = 0; i < paid.size(); ++i) {
      policy.fractions[paid[i]] = static_cast<double>(grid[i]) / units;
      used += grid[i];
    }
    policy.fractions[LabelFormat::none] = static_cast<double>(units - used) / units;
    out.push_back(std::move(policy));
  }
  return out;
}

}  // namespace omnilabel
