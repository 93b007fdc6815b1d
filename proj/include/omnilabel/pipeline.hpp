#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "omnilabel/filtering.hpp"
#include "omnilabel/io.hpp"

namespace omnilabel {

// Per-image weak labels for a corpus; image i uses seed derive_seed(seed, image id).
LabelFile downgrade_corpus(const Corpus& corpus, LabelFormat target, std::uint64_t seed,
                           const NoiseModel& ec_noise = default_ec_noise());

/// Filters one image. Images without a label are treated as unlabeled (None),
/// fully labeled images pass their ground truth through, and weak labels with
/// an empty payload yield no pseudo-labels and a warning.
PseudoLabelSet filter_image(const TeacherPrediction& pred, const OmniLabel* label,
                            const FilterConfig& cfg, const AssignmentSolver& solver = hungarian);

/// Filters every prediction on `jobs` threads (0 = hardware concurrency).
/// Output is keyed, and therefore ordered, by image id. Throws InputError on
/// duplicate image ids.
std::map<ImageId, PseudoLabelSet> filter_corpus(const std::vector<TeacherPrediction>& preds,
                                                const LabelFile& labels, const FilterConfig& cfg,
                                                unsigned jobs = 1,
                                                const AssignmentSolver& solver = hungarian);

}  // namespace omnilabel
