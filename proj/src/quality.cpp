#include "omnilabel/quality.hpp"

#include <algorithm>
#include <tuple>

#include "omnilabel/error.hpp"

namespace omnilabel {

namespace {

void finalize(QualityReport& r) {
  r.precision = (r.tp + r.fp) == 0 ? 1.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.recall = (r.tp + r.fn) == 0 ? 1.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.mean_iou_matched = r.tp == 0 ? 0.0 : r.iou_sum / static_cast<double>(r.tp);
}

}  // namespace

QualityReport& QualityReport::operator+=(const QualityReport& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  iou_sum += other.iou_sum;
  finalize(*this);
  return *this;
}

QualityReport score_pseudo(const PseudoLabelSet& pseudo, const Fully& gt, double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) throw InputError("IoU threshold must lie in (0, 1)");

  struct Candidate {
    double iou;
    std::size_t p;
    std::size_t g;
  };
  std::vector<Candidate> candidates;
  for (std::size_t p = 0; p < pseudo.items.size(); ++p) {
    for (std::size_t g = 0; g < gt.objects.size(); ++g) {
      if (pseudo.items[p].class_id != gt.objects[g].class_id) continue;
      const double v = iou(pseudo.items[p].box, gt.objects[g].box);
      if (v >= iou_thresh) candidates.push_back({v, p, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.iou, a.p, a.g) < std::tie(a.iou, b.p, b.g);
  });

  std::vector<char> pseudo_used(pseudo.items.size(), 0);
  std::vector<char> gt_used(gt.objects.size(), 0);
  QualityReport r;
  for (const auto& c : candidates) {
    if (pseudo_used[c.p] || gt_used[c.g]) continue;
    pseudo_used[c.p] = gt_used[c.g] = 1;
    ++r.tp;
    r.iou_sum += c.iou;
  }
  r.fp = static_cast<long>(pseudo.items.size()) - r.tp;
  r.fn = static_cast<long>(gt.objects.size()) - r.tp;
  finalize(r);
  return r;
}

}  // namespace omnilabel
