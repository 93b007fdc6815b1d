#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "omnilabel/error.hpp"
#include "omnilabel/io.hpp"
#include "omnilabel/synthetic.hpp"

using namespace omnilabel;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"images":[{"id":7,"width":300,"height":300,"file_name":"a.jpg"}],
 "categories":[{"id":3,"name":"bee"}],
 "annotations":[{"id":1,"image_id":7,"category_id":3,"bbox":[30,30,60,60],"iscrowd":0}]})";

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("omnilabel_test_" + name); }

}  // namespace

TEST_CASE("COCO parsing normalizes boxes") {
  const Corpus c = parse_coco(kMinimal);
  REQUIRE(c.annotations.at(7).objects.size() == 1);
  const auto& b = c.annotations.at(7).objects[0].box;
  CHECK(b.cx() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(b.cy() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(b.w() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(b.h() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c.annotations.at(7).objects[0].class_id == 0);
}

TEST_CASE("COCO round trip is byte stable") {
  const std::string once = coco_to_string(parse_coco(kMinimal));
  CHECK(coco_to_string(parse_coco(once)) == once);
  const auto path = temp("coco.json");
  save_coco(parse_coco(once), path);
  CHECK(read_text(path) == once);
  fs::remove(path);

  const Corpus synth = synthetic_corpus(5, 4, 6, 1);
  const std::string s = coco_to_string(synth);
  CHECK(coco_to_string(parse_coco(s)) == s);
}

TEST_CASE("COCO errors and rejections") {
  std::string bad = kMinimal;
  bad.replace(bad.find("\"image_id\":7"), 12, "\"image_id\":9");
  try {
    parse_coco(bad);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("image_id 9") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_coco("{\"images\": []}"), InputError);
  CHECK_THROWS_AS(parse_coco("{not json"), InputError);

  std::string degenerate = kMinimal;
  degenerate.replace(degenerate.find("[30,30,60,60]"), 13, "[30,30,0,60]");
  const Corpus c = parse_coco(degenerate);
  CHECK(c.annotations.at(7).objects.empty());
  REQUIRE(c.rejected.size() == 1);
  CHECK(c.rejected[0].annotation_id == 1);
}

TEST_CASE("pseudo-label files") {
  const Corpus ref = parse_coco(kMinimal);
  const std::string empty = pseudo_to_string({}, ref);
  const auto j = nlohmann::json::parse(empty);
  CHECK(j.at("annotations").empty());
  CHECK(j.at("version") == kFileFormatVersion);

  std::map<ImageId, PseudoLabelSet> labels;
  const auto box = BoundingBox::from_cxcywh(0.3, 0.3, 0.2, 0.2);
  labels[7].items.push_back({box, 0, 0.875, 12, 0, 0.125, false});
  labels[7].warnings.push_back("note");
  const std::string text = pseudo_to_string(labels, ref);
  const auto parsed = nlohmann::json::parse(text);
  const auto bbox = parsed.at("annotations")[0].at("bbox");
  CHECK(bbox[0].get<double>() == doctest::Approx(60));
  CHECK(bbox[2].get<double>() == doctest::Approx(60));
  CHECK(parsed.at("annotations")[0].at("category_id") == 3);

  const PseudoCorpus back = parse_pseudo(text);
  const auto& item = back.labels.at(7).items.at(0);
  CHECK(item.box == box);
  CHECK(item.score == 0.875);
  CHECK(item.source_query == 12);
  CHECK(item.matched_cost == 0.125);
  CHECK(back.labels.at(7).warnings == std::vector<std::string>{"note"});
  CHECK(pseudo_to_string(back.labels, ref) == text);

  labels[8];
  CHECK_THROWS_AS(pseudo_to_string(labels, ref), InputError);
  CHECK_THROWS_AS(save_pseudo({}, ref, "/nonexistent-dir/out.json"), InputError);
}

TEST_CASE("labels round trip") {
  LabelFile f;
  f.num_classes = 10;
  f.labels[1] = TagsU{{2, 5}};
  f.labels[2] = TagsK{{{1, 3}}};
  f.labels[3] = PointsU{{Point2D(0.125, 0.5)}};
  f.labels[4] = PointsK{{{Point2D(0.3, 0.7), 9}}};
  f.labels[5] = BoxesU{{BoundingBox::from_cxcywh(0.1, 0.2, 0.1, 0.1)}};
  f.labels[6] = BoxesEC{{BoundingBox::from_cxcywh(0.3, 0.2, 0.1, 0.3)}};
  f.labels[7] = Fully{{{BoundingBox::from_cxcywh(0.3, 0.2, 0.1, 0.3), 4}}};
  f.labels[8] = NoLabel{};
  const std::string s = labels_to_string(f);
  const LabelFile back = parse_labels(s);
  CHECK(back.labels == f.labels);
  CHECK(labels_to_string(back) == s);
  f.labels[9] = TagsU{{11}};
  CHECK_THROWS_AS(parse_labels(labels_to_string(f)), InputError);
}

TEST_CASE("prediction lines") {
  Matrix l(2, 3);
  l(0, 1) = 0.1;
  l(1, 2) = -2.5e-7;
  const TeacherPrediction p(4, l, {BoundingBox::from_cxcywh(0.5, 0.5, 0.1, 0.1),
                                   BoundingBox::from_cxcywh(0.1 + 0.2, 0.5, 0.1, 0.3)});
  const auto back = parse_prediction(prediction_to_string(p));
  CHECK(back.logits() == p.logits());
  CHECK(back.boxes() == p.boxes());
  CHECK_THROWS_AS(parse_prediction(R"({"image_id":1,"K":3,"logits":[[0]],"boxes_cxcywh":[[0.5,0.5,0.1,0.1]]})"),
                  DimensionError);

  const auto path = temp("preds.jsonl");
  write_text(path, prediction_to_string(p) + "\n\n" + prediction_to_string(p) + "\nnot json\n");
  PredictionReader reader(path);
  CHECK(reader.next().has_value());
  CHECK(reader.next().has_value());
  try {
    reader.next();
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find(":4:") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("snapshots and stats") {
  const ParamVector p{{1.0, -0.1, 3e-300, 1e300}, 17};
  for (const char* name : {"snap.json", "snap.bin"}) {
    const auto path = temp(name);
    save_snapshot(p, path);
    CHECK(load_snapshot(path) == p);
    fs::remove(path);
  }
  const auto s = parse_stats(R"({"name":"mine","C":4,"C_avg":2,"I_avg":3.5})");
  CHECK(s.num_classes == 4);
  CHECK(parse_stats(stats_to_string(s)).avg_instances == 3.5);
  CHECK_THROWS_AS(parse_stats(R"({"C":4,"C_avg":5,"I_avg":6})"), InputError);
}
