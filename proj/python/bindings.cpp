#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "omnilabel/annotation.hpp"
#include "omnilabel/budget.hpp"
#include "omnilabel/ema.hpp"
#include "omnilabel/error.hpp"
#include "omnilabel/filtering.hpp"
#include "omnilabel/io.hpp"
#include "omnilabel/loss.hpp"
#include "omnilabel/matching.hpp"
#include "omnilabel/pipeline.hpp"
#include "omnilabel/quality.hpp"
#include "omnilabel/synthetic.hpp"

namespace py = pybind11;
using namespace omnilabel;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DimensionError("ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pseudo-label filtering against weak annotations, label simulation and cost planning.";

  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", input_error.ptr());

  // geometry
  py::class_<Point2D>(m, "Point2D")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_property_readonly("x", &Point2D::x)
      .def_property_readonly("y", &Point2D::y)
      .def(py::self == py::self)
      .def("__repr__", [](const Point2D& p) {
        return "Point2D(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")";
      });

  py::class_<BoundingBox>(m, "BoundingBox")
      .def_static("from_cxcywh", &BoundingBox::from_cxcywh, py::arg("cx"), py::arg("cy"), py::arg("w"),
                  py::arg("h"))
      .def_static("from_corners",
                  py::overload_cast<double, double, double, double>(&BoundingBox::from_corners),
                  py::arg("x_min"), py::arg("y_min"), py::arg("x_max"), py::arg("y_max"))
      .def_static(
          "from_pixel_xywh",
          [](double x, double y, double w, double h, double width, double height) {
            return BoundingBox::from_pixel_xywh(x, y, w, h, {width, height});
          },
          py::arg("x"), py::arg("y"), py::arg("w"), py::arg("h"), py::arg("image_width"),
          py::arg("image_height"))
      .def_property_readonly("cx", &BoundingBox::cx)
      .def_property_readonly("cy", &BoundingBox::cy)
      .def_property_readonly("w", &BoundingBox::w)
      .def_property_readonly("h", &BoundingBox::h)
      .def_property_readonly("area", &BoundingBox::area)
      .def("to_list", [](const BoundingBox& b) {
        auto a = b.to_array();
        return std::vector<double>(a.begin(), a.end());
      })
      .def(
          "to_pixel_xywh",
          [](const BoundingBox& b, double width, double height) { return b.to_pixel_xywh({width, height}); },
          py::arg("image_width"), py::arg("image_height"))
      .def(py::self == py::self)
      .def("__repr__", [](const BoundingBox& b) {
        return "BoundingBox(cx=" + std::to_string(b.cx()) + ", cy=" + std::to_string(b.cy()) +
               ", w=" + std::to_string(b.w()) + ", h=" + std::to_string(b.h()) + ")";
      });

  m.def("iou", &iou);
  m.def("giou", &giou);
  m.def("l1_box", &l1_box);
  m.def("contains", &contains);

  // prediction
  py::class_<TeacherPrediction>(m, "TeacherPrediction")
      .def(py::init([](ImageId id, const std::vector<std::vector<double>>& logits,
                       std::vector<BoundingBox> boxes) {
             return TeacherPrediction(id, to_matrix(logits), std::move(boxes));
           }),
           py::arg("image_id"), py::arg("logits"), py::arg("boxes"))
      .def_property_readonly("image_id", &TeacherPrediction::image_id)
      .def_property_readonly("logits", [](const TeacherPrediction& p) { return from_matrix(p.logits()); })
      .def_property_readonly("boxes", &TeacherPrediction::boxes)
      .def_property_readonly("num_queries", &TeacherPrediction::num_queries)
      .def_property_readonly("num_classes", &TeacherPrediction::num_classes);

  m.def(
      "score",
      [](const TeacherPrediction& p) {
        ScoredPrediction sp = score(p);
        return py::make_tuple(from_matrix(sp.probs), sp.pred_class, sp.score);
      },
      "Softmax probabilities, argmax classes and confidences.");

  // matching
  py::class_<Assignment>(m, "Assignment")
      .def_readonly("match", &Assignment::match)
      .def_readonly("total_cost", &Assignment::total_cost)
      .def_readonly("infeasible_rows", &Assignment::infeasible_rows);
  m.attr("INFEASIBLE_COST") = kInfeasibleCost;
  m.def("hungarian", [](const std::vector<std::vector<double>>& c) { return hungarian(CostMatrix(to_matrix(c))); },
        py::arg("cost"));
  m.def(
      "brute_force",
      [](const std::vector<std::vector<double>>& c, std::uint64_t max_injections) {
        return brute_force(CostMatrix(to_matrix(c)), max_injections);
      },
      py::arg("cost"), py::arg("max_injections") = 10'000'000);

  // annotation
  py::enum_<LabelFormat>(m, "LabelFormat")
      .value("none", LabelFormat::none)
      .value("tags_u", LabelFormat::tags_u)
      .value("tags_k", LabelFormat::tags_k)
      .value("points_u", LabelFormat::points_u)
      .value("points_k", LabelFormat::points_k)
      .value("boxes_u", LabelFormat::boxes_u)
      .value("boxes_ec", LabelFormat::boxes_ec)
      .value("fully", LabelFormat::fully);
  m.def("parse_label_format", &parse_label_format);

  py::class_<NoLabel>(m, "NoLabel").def(py::init<>());
  py::class_<TagsU>(m, "TagsU")
      .def(py::init<std::vector<ClassId>>(), py::arg("classes"))
      .def_readwrite("classes", &TagsU::classes);
  py::class_<TagCount>(m, "TagCount")
      .def(py::init<ClassId, int>(), py::arg("class_id"), py::arg("count"))
      .def_readwrite("class_id", &TagCount::class_id)
      .def_readwrite("count", &TagCount::count);
  py::class_<TagsK>(m, "TagsK")
      .def(py::init<std::vector<TagCount>>(), py::arg("tags"))
      .def_readwrite("tags", &TagsK::tags);
  py::class_<PointsU>(m, "PointsU")
      .def(py::init<std::vector<Point2D>>(), py::arg("points"))
      .def_readwrite("points", &PointsU::points);
  py::class_<LabeledPoint>(m, "LabeledPoint")
      .def(py::init<Point2D, ClassId>(), py::arg("point"), py::arg("class_id"))
      .def_readwrite("point", &LabeledPoint::point)
      .def_readwrite("class_id", &LabeledPoint::class_id);
  py::class_<PointsK>(m, "PointsK")
      .def(py::init<std::vector<LabeledPoint>>(), py::arg("points"))
      .def_readwrite("points", &PointsK::points);
  py::class_<BoxesU>(m, "BoxesU")
      .def(py::init<std::vector<BoundingBox>>(), py::arg("boxes"))
      .def_readwrite("boxes", &BoxesU::boxes);
  py::class_<BoxesEC>(m, "BoxesEC")
      .def(py::init<std::vector<BoundingBox>>(), py::arg("boxes"))
      .def_readwrite("boxes", &BoxesEC::boxes);
  py::class_<LabeledBox>(m, "LabeledBox")
      .def(py::init<BoundingBox, ClassId>(), py::arg("box"), py::arg("class_id"))
      .def_readwrite("box", &LabeledBox::box)
      .def_readwrite("class_id", &LabeledBox::class_id);
  py::class_<Fully>(m, "Fully")
      .def(py::init<std::vector<LabeledBox>>(), py::arg("objects"))
      .def_readwrite("objects", &Fully::objects);

  m.def("format_of", &format_of);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init<double, double, std::uint64_t>(), py::arg("sigma_scale") = kDefaultEcSigma,
           py::arg("side_exponent") = kDefaultEcExponent, py::arg("seed") = 0)
      .def_readwrite("sigma_scale", &NoiseModel::sigma_scale)
      .def_readwrite("side_exponent", &NoiseModel::side_exponent)
      .def_readwrite("seed", &NoiseModel::seed);
  m.def("downgrade", &downgrade, py::arg("full"), py::arg("target"), py::arg("seed"),
        py::arg("ec_noise") = default_ec_noise());
  m.def("simulate_ec", py::overload_cast<const BoundingBox&, const NoiseModel&>(&simulate_ec));
  m.def("coco_like_boxes", &coco_like_boxes, py::arg("n"), py::arg("seed"));
  m.def(
      "ec_iou_stats",
      [](const std::vector<BoundingBox>& sample, const NoiseModel& noise) {
        IouStats s = ec_iou_stats(sample, noise);
        return py::make_tuple(s.mean, s.std);
      },
      "Mean and standard deviation of the IoU between each box and its noisy copy.");
  m.def("calibrate_ec",
        [](double mean, double std, const std::vector<BoundingBox>& sample, std::uint64_t seed) {
          return calibrate_ec(mean, std, sample, seed);
        },
        py::arg("target_mean"), py::arg("target_std"), py::arg("sample"), py::arg("seed") = 0);

  // filtering
  py::enum_<FilterStrategy>(m, "FilterStrategy")
      .value("unified", FilterStrategy::unified)
      .value("simple", FilterStrategy::simple);
  py::class_<FilterConfig>(m, "FilterConfig")
      .def(py::init<>())
      .def_readwrite("tau", &FilterConfig::tau)
      .def_readwrite("gamma", &FilterConfig::gamma)
      .def_readwrite("lambda_iou", &FilterConfig::lambda_iou)
      .def_readwrite("lambda_l1", &FilterConfig::lambda_l1)
      .def_readwrite("strategy", &FilterConfig::strategy)
      .def_readwrite("drop_infeasible", &FilterConfig::drop_infeasible);
  py::class_<PseudoLabel>(m, "PseudoLabel")
      .def_readonly("box", &PseudoLabel::box)
      .def_readonly("class_id", &PseudoLabel::class_id)
      .def_readonly("score", &PseudoLabel::score)
      .def_readonly("source_query", &PseudoLabel::source_query)
      .def_readonly("gt_index", &PseudoLabel::gt_index)
      .def_readonly("matched_cost", &PseudoLabel::matched_cost)
      .def_readonly("infeasible", &PseudoLabel::infeasible);
  py::class_<PseudoLabelSet>(m, "PseudoLabelSet")
      .def_readonly("items", &PseudoLabelSet::items)
      .def_readonly("warnings", &PseudoLabelSet::warnings)
      .def("__len__", [](const PseudoLabelSet& s) { return s.items.size(); });
  m.def("unified_filter", &unified_filter, py::arg("prediction"), py::arg("label"),
        py::arg("config") = FilterConfig{}, py::arg("solver") = AssignmentSolver(hungarian));
  m.def("simple_filter", &simple_filter, py::arg("prediction"), py::arg("label"),
        py::arg("config") = FilterConfig{});
  m.def("apply_filter", &apply_filter, py::arg("prediction"), py::arg("label"),
        py::arg("config") = FilterConfig{});

  // ema
  m.attr("DEFAULT_EMA_DECAY") = kDefaultEmaDecay;
  py::class_<ParamVector>(m, "ParamVector")
      .def(py::init<std::vector<double>, std::int64_t>(), py::arg("values"), py::arg("version") = 0)
      .def_readwrite("values", &ParamVector::values)
      .def_readwrite("version", &ParamVector::version);
  m.def("ema_step", &ema_step, py::arg("teacher"), py::arg("student"), py::arg("k") = kDefaultEmaDecay);

  // loss
  py::class_<LossConfig>(m, "LossConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &LossConfig::alpha)
      .def_readwrite("beta", &LossConfig::beta)
      .def_readwrite("focal_gamma", &LossConfig::focal_gamma)
      .def_readwrite("focal_alpha", &LossConfig::focal_alpha)
      .def_readwrite("lambda_iou", &LossConfig::lambda_iou)
      .def_readwrite("lambda_l1", &LossConfig::lambda_l1);
  py::class_<LossBreakdown>(m, "LossBreakdown")
      .def_readonly("cls", &LossBreakdown::cls)
      .def_readonly("box", &LossBreakdown::box)
      .def_readonly("total", &LossBreakdown::total);
  m.def(
      "eval_loss",
      [](const TeacherPrediction& p, const std::vector<LabeledBox>& labels, const LossConfig& cfg) {
        return eval_loss(p, labels, cfg);
      },
      py::arg("prediction"), py::arg("labels"), py::arg("config") = LossConfig{});

  // budget
  py::class_<DatasetStats>(m, "DatasetStats")
      .def(py::init([](std::string name, int c, double c_avg, double i_avg, std::int64_t n) {
             DatasetStats s{std::move(name), c, c_avg, i_avg, n};
             s.validate();
             return s;
           }),
           py::arg("name"), py::arg("num_classes"), py::arg("avg_classes"), py::arg("avg_instances"),
           py::arg("num_images") = 0)
      .def_readonly("name", &DatasetStats::name)
      .def_readonly("num_classes", &DatasetStats::num_classes)
      .def_readonly("avg_classes", &DatasetStats::avg_classes)
      .def_readonly("avg_instances", &DatasetStats::avg_instances)
      .def_readonly("num_images", &DatasetStats::num_images);
  m.def("find_profile", &find_profile);
  m.def("cost_per_image", &cost_per_image, py::arg("stats"), py::arg("format"));
  py::class_<MixturePolicy>(m, "MixturePolicy")
      .def(py::init([](std::map<LabelFormat, double> fractions, std::int64_t size) {
             return MixturePolicy{std::move(fractions), size};
           }),
           py::arg("fractions"), py::arg("dataset_size"))
      .def_readonly("fractions", &MixturePolicy::fractions)
      .def_readonly("dataset_size", &MixturePolicy::dataset_size);
  m.def("policy_cost", &policy_cost, py::arg("policy"), py::arg("stats"));
  m.def(
      "enumerate_policies",
      [](const DatasetStats& s, double hours, const std::vector<LabelFormat>& formats, double step,
         std::int64_t size) { return enumerate_policies(s, hours, formats, step, size); },
      py::arg("stats"), py::arg("budget_hours"), py::arg("formats"), py::arg("step"),
      py::arg("dataset_size"));

  // quality
  py::class_<QualityReport>(m, "QualityReport")
      .def_readonly("precision", &QualityReport::precision)
      .def_readonly("recall", &QualityReport::recall)
      .def_readonly("mean_iou_matched", &QualityReport::mean_iou_matched)
      .def_readonly("tp", &QualityReport::tp)
      .def_readonly("fp", &QualityReport::fp)
      .def_readonly("fn", &QualityReport::fn);
  m.def("score_pseudo", &score_pseudo, py::arg("pseudo"), py::arg("gt"), py::arg("iou_thresh") = 0.5);

  // io and pipeline
  py::class_<ImageInfo>(m, "ImageInfo")
      .def_readonly("id", &ImageInfo::id)
      .def_readonly("width", &ImageInfo::width)
      .def_readonly("height", &ImageInfo::height)
      .def_readonly("file_name", &ImageInfo::file_name);
  py::class_<Corpus>(m, "Corpus")
      .def_readonly("images", &Corpus::images)
      .def_readonly("annotations", &Corpus::annotations)
      .def_property_readonly("num_classes", &Corpus::num_classes)
      .def_property_readonly("rejected", [](const Corpus& c) {
        std::vector<std::pair<std::int64_t, std::string>> out;
        for (const auto& r : c.rejected) out.emplace_back(r.annotation_id, r.message);
        return out;
      });
  m.def("load_coco", &load_coco);
  m.def("save_coco", &save_coco);
  m.def("synthetic_corpus", &synthetic_corpus, py::arg("num_images"), py::arg("num_classes"),
        py::arg("max_objects"), py::arg("seed"));
  m.def(
      "synthetic_predictions",
      [](const Corpus& corpus, std::size_t num_queries, std::uint64_t seed) {
        TeacherSimConfig cfg;
        cfg.num_queries = num_queries;
        return synthetic_predictions(corpus, cfg, seed);
      },
      py::arg("corpus"), py::arg("num_queries") = kDefaultQueries, py::arg("seed") = 0);
  m.def(
      "filter_corpus",
      [](const std::vector<TeacherPrediction>& preds, const std::map<ImageId, OmniLabel>& labels,
         int num_classes, const FilterConfig& cfg, unsigned jobs) {
        LabelFile file{num_classes, labels};
        py::gil_scoped_release release;
        return filter_corpus(preds, file, cfg, jobs);
      },
      py::arg("predictions"), py::arg("labels"), py::arg("num_classes"), py::arg("config") = FilterConfig{},
      py::arg("jobs") = 1);
  m.def(
      "downgrade_corpus",
      [](const Corpus& corpus, LabelFormat f, std::uint64_t seed) {
        return downgrade_corpus(corpus, f, seed).labels;
      },
      py::arg("corpus"), py::arg("format"), py::arg("seed"));
  m.def("pseudo_to_string", &pseudo_to_string, py::arg("labels"), py::arg("reference"));
}
