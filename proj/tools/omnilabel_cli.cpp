// omnilabel: batch front end for pseudo-label filtering, label simulation,
// annotation cost planning and evaluation.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "omnilabel/annotation.hpp"
#include "omnilabel/budget.hpp"
#include "omnilabel/ema.hpp"
#include "omnilabel/error.hpp"
#include "omnilabel/filtering.hpp"
#include "omnilabel/io.hpp"
#include "omnilabel/loss.hpp"
#include "omnilabel/parallel.hpp"
#include "omnilabel/pipeline.hpp"
#include "omnilabel/quality.hpp"
#include "omnilabel/random.hpp"
#include "omnilabel/synthetic.hpp"

namespace ol = omnilabel;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

enum class Level { error, warn, info, debug };

Level g_level = Level::warn;

void init_logging() {
  const char* env = std::getenv("OMNILABEL_LOG_LEVEL");
  if (env == nullptr) return;
  const std::string v = env;
  if (v == "error") g_level = Level::error;
  else if (v == "warn") g_level = Level::warn;
  else if (v == "info") g_level = Level::info;
  else if (v == "debug") g_level = Level::debug;
}

void log(Level lvl, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (lvl > g_level) return;
  std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

// Shared flags of the filter and noise model.
struct NoiseFlags {
  double sigma = ol::kDefaultEcSigma;
  double exponent = ol::kDefaultEcExponent;

  void add(CLI::App* app) {
    app->add_option("--ec-sigma", sigma, "extreme-clicking noise scale")->capture_default_str();
    app->add_option("--ec-exponent", exponent, "extreme-clicking side exponent")->capture_default_str();
  }
  ol::NoiseModel model(std::uint64_t seed) const {
    ol::NoiseModel m{sigma, exponent, seed};
    ol::validate(m);
    return m;
  }
};

struct DatasetFlags {
  std::string dataset;
  std::string stats_path;

  void add(CLI::App* app) {
    auto* d = app->add_option("--dataset", dataset, "built-in profile: coco, voc, objects365, bees, crowdhuman");
    auto* s = app->add_option("--stats", stats_path, "dataset stats JSON {name, C, C_avg, I_avg}");
    d->excludes(s);
  }
  ol::DatasetStats load() const {
    if (!stats_path.empty()) return ol::parse_stats(ol::read_text(stats_path));
    if (dataset.empty()) throw CLI::RequiredError("--dataset or --stats");
    auto p = ol::find_profile(dataset);
    if (!p) throw ol::InputError("unknown dataset profile '" + dataset + "'");
    return *p;
  }
};

std::vector<ol::LabelFormat> parse_formats(const std::vector<std::string>& names) {
  std::vector<ol::LabelFormat> out;
  for (const auto& n : names) out.push_back(ol::parse_label_format(n));
  return out;
}

// ---- filter --------------------------------------------------------------

struct FilterCmd {
  std::string predictions, coco, labels, format, out, strategy = "unified", solver = "hungarian";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::size_t batch = 256;
  ol::FilterConfig cfg;
  NoiseFlags noise;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("filter", "select pseudo-labels from teacher predictions");
    c->add_option("--predictions", predictions, "teacher predictions (JSONL)")->required();
    c->add_option("--coco", coco, "COCO file with image sizes and categories")->required();
    auto* l = c->add_option("--labels", labels, "omni-label file");
    auto* f = c->add_option("--format", format, "downgrade the COCO annotations to this format on the fly");
    l->excludes(f);
    c->add_option("--out", out, "pseudo-label output (COCO JSON)")->required();
    c->add_option("--strategy", strategy, "unified or simple")
        ->check(CLI::IsMember({"unified", "simple"}))
        ->capture_default_str();
    c->add_option("--solver", solver, "hungarian or brute-force")
        ->check(CLI::IsMember({"hungarian", "brute-force"}))
        ->capture_default_str();
    c->add_option("--tau", cfg.tau, "confidence threshold")->capture_default_str();
    c->add_option("--gamma", cfg.gamma, "tag weight for classed points")->capture_default_str();
    c->add_option("--lambda-iou", cfg.lambda_iou, "GIoU weight")->capture_default_str();
    c->add_option("--lambda-l1", cfg.lambda_l1, "L1 weight")->capture_default_str();
    c->add_flag("--drop-infeasible", cfg.drop_infeasible, "discard matches on infeasible entries");
    c->add_option("--seed", seed, "seed for --format")->capture_default_str();
    c->add_option("--jobs", jobs, "worker threads, 0 = all cores")->capture_default_str();
    c->add_option("--batch", batch, "images held in memory at once")->check(CLI::PositiveNumber);
    noise.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    cfg.strategy = strategy == "simple" ? ol::FilterStrategy::simple : ol::FilterStrategy::unified;
    cfg.validate();
    const ol::Corpus corpus = ol::load_coco(coco);
    ol::LabelFile label_file;
    label_file.num_classes = corpus.num_classes();
    if (!labels.empty()) {
      label_file = ol::load_labels(labels);
    } else if (!format.empty()) {
      label_file = ol::downgrade_corpus(corpus, ol::parse_label_format(format), seed, noise.model(seed));
    }
    const ol::AssignmentSolver solve =
        solver == "brute-force" ? ol::AssignmentSolver([](const ol::CostMatrix& c) { return ol::brute_force(c); })
                                : ol::AssignmentSolver(ol::hungarian);

    std::map<ol::ImageId, ol::PseudoLabelSet> result;
    ol::PredictionReader reader(predictions);
    std::vector<ol::TeacherPrediction> pending;
    auto flush = [&] {
      auto part = ol::filter_corpus(pending, label_file, cfg, jobs, solve);
      for (auto& [id, set] : part) {
        if (!result.emplace(id, std::move(set)).second) {
          throw ol::InputError("duplicate prediction for image " + std::to_string(id));
        }
      }
      pending.clear();
    };
    while (auto p = reader.next()) {
      pending.push_back(std::move(*p));
      if (pending.size() >= batch) flush();
    }
    flush();

    std::size_t items = 0;
    for (const auto& [id, set] : result) {
      items += set.items.size();
      for (const auto& w : set.warnings) log(Level::warn, "image " + std::to_string(id) + ": " + w);
    }
    ol::save_pseudo(result, corpus, out);
    log(Level::info, "wrote " + std::to_string(items) + " pseudo-labels for " +
                         std::to_string(result.size()) + " images to " + out);
  }
};

// ---- downgrade -------------------------------------------------------------

struct DowngradeCmd {
  std::string coco, format, out;
  std::uint64_t seed = 0;
  NoiseFlags noise;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("downgrade", "simulate weak labels from full annotations");
    c->add_option("--coco", coco, "fully annotated COCO file")->required();
    c->add_option("--format", format, "target label format")->required();
    c->add_option("--out", out, "omni-label output")->required();
    c->add_option("--seed", seed)->capture_default_str();
    noise.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    const ol::Corpus corpus = ol::load_coco(coco);
    for (const auto& r : corpus.rejected) {
      log(Level::warn, "annotation " + std::to_string(r.annotation_id) + ": " + r.message);
    }
    ol::save_labels(ol::downgrade_corpus(corpus, ol::parse_label_format(format), seed, noise.model(seed)), out);
  }
};

// ---- simulate-ec -----------------------------------------------------------

struct SimulateEcCmd {
  std::string coco, out;
  std::uint64_t seed = 0;
  bool calibrate = false;
  double target_mean = 0.82, target_std = 0.16;
  std::size_t samples = 10000;
  NoiseFlags noise;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("simulate-ec", "extreme-clicking box noise: apply, measure or calibrate");
    c->add_option("--coco", coco, "perturb every box of this COCO file (requires --out)");
    c->add_option("--out", out, "perturbed COCO output");
    c->add_option("--seed", seed)->capture_default_str();
    c->add_flag("--calibrate", calibrate, "fit the noise model to the IoU targets first");
    c->add_option("--target-mean", target_mean)->capture_default_str();
    c->add_option("--target-std", target_std)->capture_default_str();
    c->add_option("--samples", samples, "size of the COCO-like calibration sample")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    noise.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    const auto sample = ol::coco_like_boxes(samples, seed);
    ol::NoiseModel model = noise.model(seed);
    if (calibrate) model = ol::calibrate_ec(target_mean, target_std, sample, seed);

    if (!coco.empty()) {
      if (out.empty()) throw CLI::RequiredError("--out");
      ol::Corpus corpus = ol::load_coco(coco);
      for (auto& [id, full] : corpus.annotations) {
        ol::NoiseModel m = model;
        m.seed = ol::derive_seed(seed, static_cast<std::uint64_t>(id));
        std::vector<ol::BoundingBox> boxes;
        for (const auto& o : full.objects) boxes.push_back(o.box);
        const auto noisy = ol::simulate_ec(boxes, m);
        for (std::size_t i = 0; i < noisy.size(); ++i) full.objects[i].box = noisy[i];
      }
      ol::save_coco(corpus, out);
      return;
    }
    const ol::IouStats st = ol::ec_iou_stats(sample, model);
    json j = {{"sigma_scale", model.sigma_scale},
              {"side_exponent", model.side_exponent},
              {"samples", samples},
              {"iou_mean", st.mean},
              {"iou_std", st.std}};
    std::cout << j.dump(2) << "\n";
  }
};

// ---- cost / budget ---------------------------------------------------------

struct CostCmd {
  DatasetFlags data;
  std::string format;
  bool as_json = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("cost", "annotation seconds per image for each format");
    data.add(c);
    c->add_option("--format", format, "print a single format");
    c->add_flag("--json", as_json, "full-precision JSON output");
    c->callback([this] { run(); });
  }

  void run() {
    const ol::DatasetStats s = data.load();
    std::vector<ol::LabelFormat> formats;
    if (!format.empty()) {
      formats.push_back(ol::parse_label_format(format));
    } else {
      for (auto f : ol::kAllFormats) {
        if (f != ol::LabelFormat::none) formats.push_back(f);
      }
    }
    json j = {{"dataset", s.name}, {"C", s.num_classes}, {"C_avg", s.avg_classes},
              {"I_avg", s.avg_instances}, {"seconds", json::object()}};
    if (!as_json) {
      std::cout << "dataset " << s.name << " (C=" << s.num_classes << ", C_avg=" << s.avg_classes
                << ", I_avg=" << s.avg_instances << ")\n";
    }
    for (auto f : formats) {
      const std::string name(ol::to_string(f));
      if (f == ol::LabelFormat::tags_u && s.single_class()) {
        if (!format.empty()) ol::cost_per_image(s, f);  // raises the input error
        j["seconds"][name] = nullptr;
        if (!as_json) std::cout << name << "\t-\n";
        continue;
      }
      const double sec = ol::cost_per_image(s, f);
      j["seconds"][name] = sec;
      if (!as_json) std::cout << name << "\t" << fixed(sec, 1) << "\n";
    }
    if (as_json) std::cout << j.dump(2) << "\n";
  }
};

struct BudgetCmd {
  DatasetFlags data;
  double hours = 0.0;
  std::vector<std::string> formats{"fully", "tags_k", "boxes_ec"};
  double step = 0.01;
  std::int64_t size = 0;
  double min_spend = 0.0;
  std::size_t limit = 0;
  bool as_json = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("budget", "mixture policies that fit an annotation budget");
    data.add(c);
    c->add_option("--hours", hours, "budget in hours")->required()->check(CLI::NonNegativeNumber);
    c->add_option("--formats", formats, "paid formats; None takes the remainder")
        ->delimiter(',')
        ->capture_default_str();
    c->add_option("--step", step, "grid step of the fractions")->capture_default_str();
    c->add_option("--size", size, "dataset size, defaults to the profile's image count");
    c->add_option("--min-spend", min_spend, "drop policies costing less than this fraction of the budget")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c->add_option("--limit", limit, "print at most this many policies (0 = all)");
    c->add_flag("--json", as_json, "JSON output");
    c->callback([this] { run(); });
  }

  void run() {
    const ol::DatasetStats s = data.load();
    const std::int64_t n = size > 0 ? size : s.num_images;
    if (n <= 0) throw ol::InputError("dataset size unknown; pass --size");
    const auto fs = parse_formats(formats);
    const auto policies = ol::enumerate_policies(s, hours, fs, step, n);
    json arr = json::array();
    std::size_t shown = 0;
    for (const auto& p : policies) {
      const double h = ol::policy_cost(p, s);
      if (h < min_spend * hours) continue;
      if (limit != 0 && shown == limit) break;
      ++shown;
      if (as_json) {
        json fr = json::object();
        for (const auto& [f, v] : p.fractions) fr[std::string(ol::to_string(f))] = v;
        arr.push_back({{"fractions", fr}, {"hours", h}});
        continue;
      }
      for (const auto& [f, v] : p.fractions) std::cout << ol::to_string(f) << "=" << fixed(100.0 * v, 0) << "% ";
      std::cout << "cost=" << fixed(h, 2) << "h\n";
    }
    if (as_json) {
      std::cout << json{{"dataset", s.name}, {"size", n}, {"budget_hours", hours}, {"policies", arr}}.dump(2)
                << "\n";
    }
    log(Level::info, std::to_string(shown) + " policies");
  }
};

// ---- eval / eval-loss ------------------------------------------------------

struct EvalCmd {
  std::string pseudo, coco;
  double iou_thresh = 0.5;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("eval", "precision and recall of pseudo-labels against ground truth");
    c->add_option("--pseudo", pseudo, "pseudo-label file")->required();
    c->add_option("--coco", coco, "ground-truth COCO file")->required();
    c->add_option("--iou", iou_thresh, "match threshold")->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() {
    const ol::PseudoCorpus p = ol::load_pseudo(pseudo);
    const ol::Corpus gt = ol::load_coco(coco);
    if (p.categories.size() != gt.categories.size()) {
      throw ol::InputError("pseudo-label and ground-truth category tables differ");
    }
    ol::QualityReport total;
    for (const auto& [id, set] : p.labels) {
      auto it = gt.annotations.find(id);
      if (it == gt.annotations.end()) throw ol::InputError("unknown image_id " + std::to_string(id));
      total += ol::score_pseudo(set, it->second, iou_thresh);
    }
    json j = {{"images", p.labels.size()}, {"iou_threshold", iou_thresh}, {"precision", total.precision},
              {"recall", total.recall},    {"mean_iou", total.mean_iou_matched},
              {"tp", total.tp},            {"fp", total.fp},      {"fn", total.fn}};
    std::cout << j.dump(2) << "\n";
  }
};

struct EvalLossCmd {
  std::string predictions, coco;
  unsigned jobs = 1;
  ol::LossConfig cfg;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("eval-loss", "matched detection loss of predictions against labels");
    c->add_option("--predictions", predictions, "teacher or student predictions (JSONL)")->required();
    c->add_option("--coco", coco, "ground-truth COCO file")->required();
    c->add_option("--alpha", cfg.alpha, "classification weight")->capture_default_str();
    c->add_option("--beta", cfg.beta, "box weight")->capture_default_str();
    c->add_option("--lambda-iou", cfg.lambda_iou)->capture_default_str();
    c->add_option("--lambda-l1", cfg.lambda_l1)->capture_default_str();
    c->add_option("--jobs", jobs)->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() {
    const ol::Corpus gt = ol::load_coco(coco);
    std::vector<ol::TeacherPrediction> preds;
    ol::PredictionReader reader(predictions);
    while (auto p = reader.next()) preds.push_back(std::move(*p));
    const auto losses = ol::parallel_map(preds.size(), jobs, [&](std::size_t i) {
      auto it = gt.annotations.find(preds[i].image_id());
      if (it == gt.annotations.end()) {
        throw ol::InputError("unknown image_id " + std::to_string(preds[i].image_id()));
      }
      return ol::eval_loss(preds[i], it->second.objects, cfg);
    });
    json per_image = json::array();
    double cls = 0.0, box = 0.0, total = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      cls += losses[i].cls;
      box += losses[i].box;
      total += losses[i].total;
      per_image.push_back({{"image_id", preds[i].image_id()}, {"cls", losses[i].cls},
                           {"box", losses[i].box}, {"total", losses[i].total}});
    }
    std::sort(per_image.begin(), per_image.end(),
              [](const json& a, const json& b) { return a["image_id"] < b["image_id"]; });
    const double n = std::max<double>(1.0, static_cast<double>(preds.size()));
    json j = {{"images", preds.size()}, {"mean_cls", cls / n}, {"mean_box", box / n},
              {"mean_total", total / n}, {"per_image", per_image}};
    std::cout << j.dump(2) << "\n";
  }
};

// ---- ema -------------------------------------------------------------------

struct EmaCmd {
  std::string teacher, student, out;
  double k = ol::kDefaultEmaDecay;
  int steps = 1;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("ema", "teacher <- k * teacher + (1 - k) * student");
    c->add_option("--teacher", teacher, "teacher snapshot (.json or .bin)")->required();
    c->add_option("--student", student, "student snapshot")->required();
    c->add_option("--out", out, "updated teacher snapshot")->required();
    c->add_option("--k", k, "decay")->capture_default_str();
    c->add_option("--steps", steps, "apply the update this many times")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() {
    ol::ParamVector t = ol::load_snapshot(teacher);
    const ol::ParamVector s = ol::load_snapshot(student);
    for (int i = 0; i < steps; ++i) t = ol::ema_step(t, s, k);
    ol::save_snapshot(t, out);
  }
};

// ---- synth -----------------------------------------------------------------

struct SynthCmd {
  std::size_t images = 10;
  int classes = 20;
  int max_objects = 8;
  ol::TeacherSimConfig teacher;
  std::uint64_t seed = 0;
  std::string coco_out, predictions_out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("synth", "generate a synthetic corpus and teacher predictions");
    c->add_option("--images", images)->capture_default_str();
    c->add_option("--classes", classes)->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--max-objects", max_objects)->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--queries", teacher.num_queries)->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--seed", seed)->capture_default_str();
    c->add_option("--coco-out", coco_out, "ground-truth COCO output")->required();
    c->add_option("--predictions-out", predictions_out, "teacher predictions output (JSONL)");
    c->callback([this] { run(); });
  }

  void run() {
    const ol::Corpus corpus = ol::synthetic_corpus(images, classes, max_objects, seed);
    ol::save_coco(corpus, coco_out);
    if (predictions_out.empty()) return;
    const auto preds = ol::synthetic_predictions(corpus, teacher, seed);
    ol::write_predictions(preds, predictions_out);
  }
};

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Pseudo-label filtering and annotation planning for weakly labeled detection data"};
  app.require_subcommand(1);

  FilterCmd filter;
  DowngradeCmd downgrade;
  SimulateEcCmd simulate_ec;
  CostCmd cost;
  BudgetCmd budget;
  EvalCmd eval;
  EvalLossCmd eval_loss;
  EmaCmd ema;
  SynthCmd synth;
  filter.add(app);
  downgrade.add(app);
  simulate_ec.add(app);
  cost.add(app);
  budget.add(app);
  eval.add(app);
  eval_loss.add(app);
  ema.add(app);
  synth.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const ol::InputError& e) {
    log(Level::error, e.what());
    return kInput;
  } catch (const std::exception& e) {
    log(Level::error, std::string("internal error: ") + e.what());
    return kInternal;
  }
  return kOk;
}
