#include "omnilabel/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <set>
#include <sstream>

#include "json.hpp"
#include "omnilabel/error.hpp"

namespace omnilabel {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

// Runs body and rethrows JSON access errors as InputError with context.
template <typename Fn>
auto guarded(std::string_view what, Fn&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json image_json(const ImageInfo& im) {
  return {{"id", im.id}, {"width", im.width}, {"height", im.height}, {"file_name", im.file_name}};
}

ImageInfo image_from_json(const json& j) {
  ImageInfo im;
  im.id = j.at("id").get<ImageId>();
  im.width = j.at("width").get<double>();
  im.height = j.at("height").get<double>();
  if (j.contains("file_name")) im.file_name = j.at("file_name").get<std::string>();
  if (!(im.width > 0.0) || !(im.height > 0.0)) {
    throw InputError("image " + std::to_string(im.id) + " has a non-positive size");
  }
  return im;
}

json categories_json(const std::vector<Category>& cats) {
  json out = json::array();
  for (const auto& c : cats) out.push_back({{"id", c.id}, {"name", c.name}});
  return out;
}

std::vector<Category> categories_from_json(const json& j) {
  std::vector<Category> cats;
  std::set<std::int64_t> seen;
  for (const auto& c : j) {
    Category cat{c.at("id").get<std::int64_t>(),
                 c.contains("name") ? c.at("name").get<std::string>() : std::string()};
    if (!seen.insert(cat.id).second) {
      throw InputError("duplicate category id " + std::to_string(cat.id));
    }
    cats.push_back(std::move(cat));
  }
  std::sort(cats.begin(), cats.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return cats;
}

std::vector<ImageInfo> images_from_json(const json& j) {
  std::vector<ImageInfo> images;
  std::set<ImageId> seen;
  for (const auto& im : j) {
    images.push_back(image_from_json(im));
    if (!seen.insert(images.back().id).second) {
      throw InputError("duplicate image id " + std::to_string(images.back().id));
    }
  }
  std::sort(images.begin(), images.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return images;
}

const ImageInfo& find_image(const std::vector<ImageInfo>& images, ImageId id) {
  auto it = std::lower_bound(images.begin(), images.end(), id,
                             [](const ImageInfo& im, ImageId v) { return im.id < v; });
  if (it == images.end() || it->id != id) {
    throw InputError("unknown image_id " + std::to_string(id));
  }
  return *it;
}

ClassId find_class(const std::vector<Category>& cats, std::int64_t category_id) {
  auto it = std::lower_bound(cats.begin(), cats.end(), category_id,
                             [](const Category& c, std::int64_t v) { return c.id < v; });
  if (it == cats.end() || it->id != category_id) {
    throw InputError("unknown category_id " + std::to_string(category_id));
  }
  return static_cast<ClassId>(it - cats.begin());
}

std::int64_t category_of(const std::vector<Category>& cats, ClassId c) {
  if (c < 0 || static_cast<std::size_t>(c) >= cats.size()) {
    throw InputError("class index " + std::to_string(c) + " has no category");
  }
  return cats[static_cast<std::size_t>(c)].id;
}

json box_json(const BoundingBox& b) { return {b.cx(), b.cy(), b.w(), b.h()}; }

BoundingBox box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("box must be [cx, cy, w, h]");
  return BoundingBox::from_cxcywh(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                                  j[3].get<double>());
}

json payload_json(const OmniLabel& label) {
  json out = json::array();
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, TagsU>) {
          for (ClassId c : l.classes) out.push_back(c);
        } else if constexpr (std::is_same_v<T, TagsK>) {
          for (const auto& t : l.tags) out.push_back({t.class_id, t.count});
        } else if constexpr (std::is_same_v<T, PointsU>) {
          for (const auto& p : l.points) out.push_back({p.x(), p.y()});
        } else if constexpr (std::is_same_v<T, PointsK>) {
          for (const auto& p : l.points) out.push_back({p.point.x(), p.point.y(), p.class_id});
        } else if constexpr (std::is_same_v<T, BoxesU> || std::is_same_v<T, BoxesEC>) {
          for (const auto& b : l.boxes) out.push_back(box_json(b));
        } else if constexpr (std::is_same_v<T, Fully>) {
          for (const auto& o : l.objects) {
            out.push_back({o.box.cx(), o.box.cy(), o.box.w(), o.box.h(), o.class_id});
          }
        }
      },
      label);
  return out;
}

OmniLabel label_from_json(LabelFormat format, const json& payload) {
  if (!payload.is_array()) throw InputError("payload must be an array");
  auto point = [](const json& p) { return Point2D(p.at(0).get<double>(), p.at(1).get<double>()); };
  switch (format) {
    case LabelFormat::none:
      return NoLabel{};
    case LabelFormat::tags_u: {
      TagsU l;
      for (const auto& c : payload) l.classes.push_back(c.get<ClassId>());
      return l;
    }
    case LabelFormat::tags_k: {
      TagsK l;
      for (const auto& t : payload) l.tags.push_back({t.at(0).get<ClassId>(), t.at(1).get<int>()});
      return l;
    }
    case LabelFormat::points_u: {
      PointsU l;
      for (const auto& p : payload) l.points.push_back(point(p));
      return l;
    }
    case LabelFormat::points_k: {
      PointsK l;
      for (const auto& p : payload) l.points.push_back({point(p), p.at(2).get<ClassId>()});
      return l;
    }
    case LabelFormat::boxes_u: {
      BoxesU l;
      for (const auto& b : payload) l.boxes.push_back(box_from_json(b));
      return l;
    }
    case LabelFormat::boxes_ec: {
      BoxesEC l;
      for (const auto& b : payload) l.boxes.push_back(box_from_json(b));
      return l;
    }
    case LabelFormat::fully: {
      Fully l;
      for (const auto& o : payload) {
        if (o.size() != 5) throw InputError("fully payload entries are [cx, cy, w, h, class]");
        l.objects.push_back({BoundingBox::from_cxcywh(o[0].get<double>(), o[1].get<double>(),
                                                      o[2].get<double>(), o[3].get<double>()),
                             o[4].get<ClassId>()});
      }
      return l;
    }
  }
  throw InputError("unknown label format");
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::string_view in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw InputError("truncated binary snapshot");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += 8;
  return v;
}

constexpr std::string_view kSnapshotMagic = "OLPV";

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

const ImageInfo& Corpus::image(ImageId id) const { return find_image(images, id); }

ClassId Corpus::class_index(std::int64_t category_id) const {
  return find_class(categories, category_id);
}

Corpus parse_coco(std::string_view text) {
  const json root = parse_json(text, "COCO annotation file");
  return guarded("COCO annotation file", [&] {
    Corpus corpus;
    corpus.images = images_from_json(root.at("images"));
    corpus.categories = categories_from_json(root.at("categories"));
    for (const auto& im : corpus.images) corpus.annotations[im.id];

    for (const auto& a : root.at("annotations")) {
      const auto ann_id = a.contains("id") ? a.at("id").get<std::int64_t>() : std::int64_t{-1};
      const auto image_id = a.at("image_id").get<ImageId>();
      const ImageInfo& im = corpus.image(image_id);
      const ClassId c = corpus.class_index(a.at("category_id").get<std::int64_t>());
      if (a.contains("iscrowd") && a.at("iscrowd").get<int>() != 0) {
        corpus.rejected.push_back({ann_id, "crowd region skipped"});
        continue;
      }
      const auto& bbox = a.at("bbox");
      if (!bbox.is_array() || bbox.size() != 4) {
        corpus.rejected.push_back({ann_id, "bbox must have four numbers"});
        continue;
      }
      const double x = bbox[0].get<double>();
      const double y = bbox[1].get<double>();
      const double w = bbox[2].get<double>();
      const double h = bbox[3].get<double>();
      try {
        // files written here carry the exact normalized box next to the pixel one
        corpus.annotations[image_id].objects.push_back(
            {a.contains("bbox_cxcywh") ? box_from_json(a.at("bbox_cxcywh"))
                                       : BoundingBox::from_pixel_xywh(x, y, w, h, im.size()),
             c});
      } catch (const InputError& e) {
        corpus.rejected.push_back({ann_id, e.what()});
      }
    }
    return corpus;
  });
}

Corpus load_coco(const std::filesystem::path& path) { return parse_coco(read_text(path)); }

std::string coco_to_string(const Corpus& corpus) {
  json root;
  root["version"] = kFileFormatVersion;
  root["images"] = json::array();
  for (const auto& im : corpus.images) root["images"].push_back(image_json(im));
  root["categories"] = categories_json(corpus.categories);
  root["annotations"] = json::array();
  std::int64_t next_id = 1;
  for (const auto& im : corpus.images) {
    auto it = corpus.annotations.find(im.id);
    if (it == corpus.annotations.end()) continue;
    for (const auto& o : it->second.objects) {
      const auto px = o.box.to_pixel_xywh(im.size());
      root["annotations"].push_back({{"id", next_id++},
                                     {"image_id", im.id},
                                     {"category_id", category_of(corpus.categories, o.class_id)},
                                     {"bbox", px},
                                     {"bbox_cxcywh", box_json(o.box)},
                                     {"area", px[2] * px[3]},
                                     {"iscrowd", 0}});
    }
  }
  return dump(root);
}

void save_coco(const Corpus& corpus, const std::filesystem::path& path) {
  write_text(path, coco_to_string(corpus));
}

TeacherPrediction parse_prediction(std::string_view line) {
  const json j = parse_json(line, "prediction record");
  return guarded("prediction record", [&] {
    const auto image_id = j.at("image_id").get<ImageId>();
    const auto& logits = j.at("logits");
    const auto& boxes = j.at("boxes_cxcywh");
    const std::size_t k = logits.size();
    const std::size_t c = k > 0 ? logits[0].size() : 0;
    if (j.contains("K") && j.at("K").get<std::size_t>() != k) {
      throw DimensionError("image " + std::to_string(image_id) + ": K does not match logits rows");
    }
    if (j.contains("C") && j.at("C").get<std::size_t>() != c) {
      throw DimensionError("image " + std::to_string(image_id) + ": C does not match logits columns");
    }
    Matrix m(k, c);
    for (std::size_t r = 0; r < k; ++r) {
      if (logits[r].size() != c) {
        throw DimensionError("image " + std::to_string(image_id) + ": ragged logits");
      }
      for (std::size_t col = 0; col < c; ++col) m(r, col) = logits[r][col].get<double>();
    }
    std::vector<BoundingBox> bs;
    bs.reserve(boxes.size());
    for (const auto& b : boxes) bs.push_back(box_from_json(b));
    return TeacherPrediction(image_id, std::move(m), std::move(bs));
  });
}

std::string prediction_to_string(const TeacherPrediction& pred) {
  json j;
  j["version"] = kFileFormatVersion;
  j["image_id"] = pred.image_id();
  j["K"] = pred.num_queries();
  j["C"] = pred.num_classes();
  json logits = json::array();
  for (std::size_t k = 0; k < pred.num_queries(); ++k) {
    auto row = pred.logits().row(k);
    logits.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["logits"] = std::move(logits);
  json boxes = json::array();
  for (const auto& b : pred.boxes()) boxes.push_back(box_json(b));
  j["boxes_cxcywh"] = std::move(boxes);
  return j.dump();
}

PredictionReader::PredictionReader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw InputError("cannot open '" + path.string() + "'");
}

std::optional<TeacherPrediction> PredictionReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      return parse_prediction(line);
    } catch (const InputError& e) {
      throw InputError(path_.string() + ":" + std::to_string(line_no_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

void write_predictions(const std::vector<TeacherPrediction>& preds,
                       const std::filesystem::path& path) {
  std::string text;
  for (const auto& p : preds) text += prediction_to_string(p) + "\n";
  write_text(path, text);
}

LabelFile parse_labels(std::string_view text) {
  const json root = parse_json(text, "omni-label file");
  return guarded("omni-label file", [&] {
    LabelFile out;
    out.num_classes = root.at("num_classes").get<int>();
    for (const auto& rec : root.at("labels")) {
      const auto image_id = rec.at("image_id").get<ImageId>();
      OmniLabel label = label_from_json(parse_label_format(rec.at("format").get<std::string>()),
                                        rec.at("payload"));
      validate(label, out.num_classes);
      if (!out.labels.emplace(image_id, std::move(label)).second) {
        throw InputError("duplicate label for image " + std::to_string(image_id));
      }
    }
    return out;
  });
}

std::string labels_to_string(const LabelFile& labels) {
  json root;
  root["version"] = kFileFormatVersion;
  root["num_classes"] = labels.num_classes;
  root["labels"] = json::array();
  for (const auto& [image_id, label] : labels.labels) {
    root["labels"].push_back({{"image_id", image_id},
                              {"format", std::string(to_string(format_of(label)))},
                              {"payload", payload_json(label)}});
  }
  return dump(root);
}

LabelFile load_labels(const std::filesystem::path& path) { return parse_labels(read_text(path)); }

void save_labels(const LabelFile& labels, const std::filesystem::path& path) {
  write_text(path, labels_to_string(labels));
}

std::string pseudo_to_string(const std::map<ImageId, PseudoLabelSet>& labels,
                             const Corpus& reference) {
  json root;
  root["version"] = kFileFormatVersion;
  root["images"] = json::array();
  root["categories"] = categories_json(reference.categories);
  root["annotations"] = json::array();
  root["warnings"] = json::array();
  std::int64_t next_id = 1;
  for (const auto& [image_id, set] : labels) {
    const ImageInfo& im = reference.image(image_id);
    root["images"].push_back(image_json(im));
    for (const auto& w : set.warnings) {
      root["warnings"].push_back({{"image_id", image_id}, {"message", w}});
    }
    for (const auto& item : set.items) {
      const auto px = item.box.to_pixel_xywh(im.size());
      root["annotations"].push_back({{"id", next_id++},
                                     {"image_id", image_id},
                                     {"category_id", category_of(reference.categories, item.class_id)},
                                     {"bbox", px},
                                     {"bbox_cxcywh", box_json(item.box)},
                                     {"area", px[2] * px[3]},
                                     {"iscrowd", 0},
                                     {"score", item.score},
                                     {"source_query", item.source_query},
                                     {"gt_index", item.gt_index},
                                     {"matched_cost", item.matched_cost},
                                     {"infeasible", item.infeasible}});
    }
  }
  return dump(root);
}

void save_pseudo(const std::map<ImageId, PseudoLabelSet>& labels, const Corpus& reference,
                 const std::filesystem::path& path) {
  write_text(path, pseudo_to_string(labels, reference));
}

PseudoCorpus parse_pseudo(std::string_view text) {
  const json root = parse_json(text, "pseudo-label file");
  return guarded("pseudo-label file", [&] {
    PseudoCorpus out;
    out.images = images_from_json(root.at("images"));
    out.categories = categories_from_json(root.at("categories"));
    for (const auto& im : out.images) out.labels[im.id];
    for (const auto& a : root.at("annotations")) {
      const auto image_id = a.at("image_id").get<ImageId>();
      const ImageInfo& im = find_image(out.images, image_id);
      const ClassId c = find_class(out.categories, a.at("category_id").get<std::int64_t>());
      BoundingBox box = a.contains("bbox_cxcywh")
                            ? box_from_json(a.at("bbox_cxcywh"))
                            : BoundingBox::from_pixel_xywh(a.at("bbox")[0].get<double>(),
                                                           a.at("bbox")[1].get<double>(),
                                                           a.at("bbox")[2].get<double>(),
                                                           a.at("bbox")[3].get<double>(), im.size());
      out.labels[image_id].items.push_back(
          {box, c, a.value("score", 1.0), a.value("source_query", -1), a.value("gt_index", -1),
           a.value("matched_cost", 0.0), a.value("infeasible", false)});
    }
    if (root.contains("warnings")) {
      for (const auto& w : root.at("warnings")) {
        out.labels[w.at("image_id").get<ImageId>()].warnings.push_back(
            w.at("message").get<std::string>());
      }
    }
    return out;
  });
}

PseudoCorpus load_pseudo(const std::filesystem::path& path) { return parse_pseudo(read_text(path)); }

DatasetStats parse_stats(std::string_view text) {
  const json j = parse_json(text, "dataset stats");
  return guarded("dataset stats", [&] {
    DatasetStats s;
    s.name = j.value("name", std::string("custom"));
    s.num_classes = j.at("C").get<int>();
    s.avg_classes = j.at("C_avg").get<double>();
    s.avg_instances = j.at("I_avg").get<double>();
    s.num_images = j.value("num_images", std::int64_t{0});
    s.validate();
    return s;
  });
}

std::string stats_to_string(const DatasetStats& s) {
  json j = {{"version", kFileFormatVersion}, {"name", s.name},          {"C", s.num_classes},
            {"C_avg", s.avg_classes},        {"I_avg", s.avg_instances}, {"num_images", s.num_images}};
  return dump(j);
}

ParamVector parse_snapshot_json(std::string_view text) {
  const json j = parse_json(text, "parameter snapshot");
  return guarded("parameter snapshot", [&] {
    return ParamVector{j.at("values").get<std::vector<double>>(),
                       j.value("param_version", std::int64_t{0})};
  });
}

std::string snapshot_to_json(const ParamVector& params) {
  json j = {{"version", kFileFormatVersion},
            {"param_version", params.version},
            {"values", params.values}};
  return dump(j);
}

ParamVector load_snapshot(const std::filesystem::path& path) {
  const std::string data = read_text(path);
  if (data.substr(0, kSnapshotMagic.size()) != kSnapshotMagic) return parse_snapshot_json(data);

  std::size_t pos = kSnapshotMagic.size();
  if (pos + 4 > data.size()) throw InputError("truncated binary snapshot");
  std::uint32_t format = 0;
  for (int i = 0; i < 4; ++i) {
    format |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
  }
  pos += 4;
  if (format != kFileFormatVersion) {
    throw InputError("unsupported snapshot format version " + std::to_string(format));
  }
  ParamVector out;
  out.version = static_cast<std::int64_t>(get_u64(data, pos));
  const std::uint64_t count = get_u64(data, pos);
  if (count > (data.size() - pos) / 8) throw InputError("truncated binary snapshot");
  out.values.resize(count);
  for (auto& v : out.values) v = std::bit_cast<double>(get_u64(data, pos));
  return out;
}

void save_snapshot(const ParamVector& params, const std::filesystem::path& path) {
  if (path.extension() != ".bin") {
    write_text(path, snapshot_to_json(params));
    return;
  }
  std::string data(kSnapshotMagic);
  for (int i = 0; i < 4; ++i) data.push_back(static_cast<char>((kFileFormatVersion >> (8 * i)) & 0xff));
  put_u64(data, static_cast<std::uint64_t>(params.version));
  put_u64(data, params.values.size());
  for (double v : params.values) put_u64(data, std::bit_cast<std::uint64_t>(v));
  write_text(path, data);
}

}  // namespace omnilabel
