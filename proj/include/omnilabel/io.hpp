#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omnilabel/annotation.hpp"
#include "omnilabel/budget.hpp"
#include "omnilabel/ema.hpp"
#include "omnilabel/filtering.hpp"
#include "omnilabel/prediction.hpp"

namespace omnilabel {

// Schema version written into every emitted file.
inline constexpr int kFileFormatVersion = 1;

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

struct ImageInfo {
  ImageId id = 0;
  double width = 0.0;
  double height = 0.0;
  std::string file_name;

  ImageSize size() const { return {width, height}; }
};

struct Category {
  std::int64_t id = 0;
  std::string name;
};

// An input record that was skipped while loading.
struct RecordIssue {
  std::int64_t annotation_id = 0;
  std::string message;
};

/// A COCO-style dataset with dense class indices. Images and categories are
/// sorted by id; a category's position is its class index.
struct Corpus {
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  std::map<ImageId, Fully> annotations;  // every image has an entry, possibly empty
  std::vector<RecordIssue> rejected;

  int num_classes() const { return static_cast<int>(categories.size()); }
  // Throw InputError naming the unknown id.
  const ImageInfo& image(ImageId id) const;
  ClassId class_index(std::int64_t category_id) const;
};

/// Parses COCO annotation JSON. bbox [x, y, w, h] pixels become normalized
/// center-size boxes. Boxes with non-positive extent and crowd regions are
/// skipped and listed in Corpus::rejected; missing keys and references to
/// unknown images or categories throw InputError.
Corpus parse_coco(std::string_view text);
Corpus load_coco(const std::filesystem::path& path);
// Annotation ids are renumbered 1..N in image order.
std::string coco_to_string(const Corpus& corpus);
void save_coco(const Corpus& corpus, const std::filesystem::path& path);

// One line of the prediction stream:
// {"image_id", "K", "C", "logits": [[...] x K], "boxes_cxcywh": [[cx, cy, w, h] x K]}
TeacherPrediction parse_prediction(std::string_view line);
std::string prediction_to_string(const TeacherPrediction& pred);

// Streams a line-delimited prediction file; blank lines are skipped.
class PredictionReader {
 public:
  explicit PredictionReader(const std::filesystem::path& path);
  std::optional<TeacherPrediction> next();

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

void write_predictions(const std::vector<TeacherPrediction>& preds,
                       const std::filesystem::path& path);

// {"version", "num_classes", "labels": [{"image_id", "format", "payload"}]}
struct LabelFile {
  int num_classes = 0;
  std::map<ImageId, OmniLabel> labels;
};

LabelFile parse_labels(std::string_view text);
std::string labels_to_string(const LabelFile& labels);
LabelFile load_labels(const std::filesystem::path& path);
void save_labels(const LabelFile& labels, const std::filesystem::path& path);

/// Pseudo-labels as COCO annotation JSON. Each annotation carries the pixel
/// bbox plus score, source_query, gt_index, matched_cost, infeasible and the
/// exact normalized box under "bbox_cxcywh".
struct PseudoCorpus {
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  std::map<ImageId, PseudoLabelSet> labels;
};

// Image sizes and categories come from reference; throws InputError for an
// image it does not know.
std::string pseudo_to_string(const std::map<ImageId, PseudoLabelSet>& labels,
                             const Corpus& reference);
void save_pseudo(const std::map<ImageId, PseudoLabelSet>& labels, const Corpus& reference,
                 const std::filesystem::path& path);
PseudoCorpus parse_pseudo(std::string_view text);
PseudoCorpus load_pseudo(const std::filesystem::path& path);

// {"name", "C", "C_avg", "I_avg", "num_images" (optional)}
DatasetStats parse_stats(std::string_view text);
std::string stats_to_string(const DatasetStats& stats);

/// Parameter snapshots. JSON: {"version", "param_version", "values"}.
/// Binary (".bin"): "OLPV", u32 format version, i64 param_version,
/// u64 count, count little-endian doubles.
ParamVector load_snapshot(const std::filesystem::path& path);
void save_snapshot(const ParamVector& params, const std::filesystem::path& path);
ParamVector parse_snapshot_json(std::string_view text);
std::string snapshot_to_json(const ParamVector& params);

}  // namespace omnilabel
