#include "omnilabel/pipeline.hpp"

#include <set>
#include <string>

#include "omnilabel/error.hpp"
#include "omnilabel/parallel.hpp"
#include "omnilabel/random.hpp"

namespace omnilabel {

LabelFile downgrade_corpus(const Corpus& corpus, LabelFormat target, std::uint64_t seed,
                           const NoiseModel& ec_noise) {
  LabelFile out;
  out.num_classes = corpus.num_classes();
  for (const auto& [image_id, full] : corpus.annotations) {
    out.labels.emplace(image_id, downgrade(full, target,
                                           derive_seed(seed, static_cast<std::uint64_t>(image_id)),
                                           ec_noise));
  }
  return out;
}

PseudoLabelSet filter_image(const TeacherPrediction& pred, const OmniLabel* label,
                            const FilterConfig& cfg, const AssignmentSolver& solver) {
  if (label == nullptr) return apply_filter(pred, NoLabel{}, cfg);

  if (const auto* full = std::get_if<Fully>(label)) {
    PseudoLabelSet out;
    for (std::size_t i = 0; i < full->objects.size(); ++i) {
      out.items.push_back({full->objects[i].box, full->objects[i].class_id, 1.0, -1,
                           static_cast<int>(i), 0.0, false});
    }
    return out;
  }
  if (!std::holds_alternative<NoLabel>(*label) && entity_count(*label) == 0) {
    PseudoLabelSet out;
    out.warnings.push_back("empty " + std::string(to_string(format_of(*label))) +
                           " annotation; no pseudo-labels");
    return out;
  }
  if (cfg.strategy == FilterStrategy::simple) return simple_filter(pred, *label, cfg);
  return unified_filter(pred, *label, cfg, solver);
}

std::map<ImageId, PseudoLabelSet> filter_corpus(const std::vector<TeacherPrediction>& preds,
                                                const LabelFile& labels, const FilterConfig& cfg,
                                                unsigned jobs, const AssignmentSolver& solver) {
  cfg.validate();
  std::set<ImageId> seen;
  for (const auto& p : preds) {
    if (!seen.insert(p.image_id()).second) {
      throw InputError("duplicate prediction for image " + std::to_string(p.image_id()));
    }
  }
  auto sets = parallel_map(preds.size(), jobs, [&](std::size_t i) {
    const auto& pred = preds[i];
    auto it = labels.labels.find(pred.image_id());
    const OmniLabel* label = it == labels.labels.end() ? nullptr : &it->second;
    if (label != nullptr && labels.num_classes != static_cast<int>(pred.num_classes())) {
      throw DimensionError("image " + std::to_string(pred.image_id()) + ": labels declare " +
                           std::to_string(labels.num_classes) + " classes, teacher predicts " +
                           std::to_string(pred.num_classes()));
    }
    try {
      return filter_image(pred, label, cfg, solver);
    } catch (const InputError& e) {
      throw InputError("image " + std::to_string(pred.image_id()) + ": " + e.what());
    }
  });
  std::map<ImageId, PseudoLabelSet> out;
  for (std::size_t i = 0; i < preds.size(); ++i) out.emplace(preds[i].image_id(), std::move(sets[i]));
  return out;
}

}  // namespace omnilabel
