#include "bonus/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

namespace bonus {

namespace {

void check_same_shape(const InstanceMap& a, const InstanceMap& b, const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

std::unordered_map<int32_t, long long> instance_areas(const InstanceMap& m) {
  std::unordered_map<int32_t, long long> areas;
  for (int32_t id : m.ids)
    if (id > 0) areas[id] += 1;
  return areas;
}

// pixel overlap counts per (gt id, pred id), both nonzero; ordered so that
// per-gt scans see pred ids ascending
std::map<std::pair<int32_t, int32_t>, long long> overlap_table(const InstanceMap& pred,
                                                               const InstanceMap& gt) {
  std::map<std::pair<int32_t, int32_t>, long long> overlap;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    int32_t g = gt.ids[i], p = pred.ids[i];
    if (g > 0 && p > 0) overlap[{g, p}] += 1;
  }
  return overlap;
}

}  // namespace

DetectionPRF detection_prf(const PointSet& pred, const PointSet& gt, double match_radius) {
  if (!(match_radius > 0.0)) throw std::invalid_argument("match_radius must be positive");
  struct Entry {
    long long d2;
    std::size_t pi, gi;
  };
  std::vector<Entry> entries;
  const double r_sq = match_radius * match_radius;
  for (std::size_t pi = 0; pi < pred.size(); ++pi) {
    for (std::size_t gi = 0; gi < gt.size(); ++gi) {
      long long dr = pred.points[pi].row - gt.points[gi].row;
      long long dc = pred.points[pi].col - gt.points[gi].col;
      long long d2 = dr * dr + dc * dc;
      if (static_cast<double>(d2) <= r_sq) entries.push_back({d2, pi, gi});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.pi != b.pi) return a.pi < b.pi;
    return a.gi < b.gi;
  });

  std::vector<char> pred_used(pred.size(), 0), gt_used(gt.size(), 0);
  long long tp = 0;
  for (const Entry& e : entries) {
    if (pred_used[e.pi] || gt_used[e.gi]) continue;
    pred_used[e.pi] = gt_used[e.gi] = 1;
    ++tp;
  }

  DetectionPRF out;
  out.tp = tp;
  out.precision = pred.empty() ? 0.0 : static_cast<double>(tp) / pred.size();
  out.recall = gt.empty() ? 0.0 : static_cast<double>(tp) / gt.size();
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

PixelScores pixel_accuracy_f1(const RasterF32& pred_binary, const RasterF32& gt_binary) {
  if (!pred_binary.same_shape(gt_binary.height, gt_binary.width))
    throw std::invalid_argument("pixel_accuracy_f1: shape mismatch");
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < pred_binary.size(); ++i) {
    bool p = pred_binary.values[i] > 0.5f;
    bool g = gt_binary.values[i] > 0.5f;
    if (p && g)
      ++tp;
    else if (p && !g)
      ++fp;
    else if (!p && g)
      ++fn;
    else
      ++tn;
  }
  PixelScores out;
  out.accuracy = static_cast<double>(tp + tn) / static_cast<double>(pred_binary.size());
  out.f1 = (tp + fp + fn) == 0 ? 1.0
                               : 2.0 * static_cast<double>(tp) /
                                     static_cast<double>(2 * tp + fp + fn);
  return out;
}

double aji(const InstanceMap& pred, const InstanceMap& gt) {
  check_same_shape(pred, gt, "aji");
  auto gt_area = instance_areas(gt);
  auto pred_area = instance_areas(pred);
  if (gt_area.empty() && pred_area.empty()) return 1.0;

  auto overlap = overlap_table(pred, gt);

  // gt ids ascending for reproducible iteration
  std::vector<int32_t> gt_ids;
  gt_ids.reserve(gt_area.size());
  for (const auto& [id, a] : gt_area) gt_ids.push_back(id);
  std::sort(gt_ids.begin(), gt_ids.end());

  long long intersection_sum = 0, union_sum = 0;
  std::unordered_map<int32_t, char> pred_used;
  for (int32_t g : gt_ids) {
    // candidates for this gt appear consecutively in the ordered map
    auto lo = overlap.lower_bound({g, 0});
    int32_t best_pred = 0;
    long long best_inter = 0, best_union = 0;
    double best_iou = -1.0;
    for (auto it = lo; it != overlap.end() && it->first.first == g; ++it) {
      int32_t p = it->first.second;
      long long inter = it->second;
      long long uni = gt_area[g] + pred_area[p] - inter;
      double iou = static_cast<double>(inter) / static_cast<double>(uni);
      // IoU first, then intersection, so tied candidates contribute the same
      // numerator/denominator regardless of labeling; the ascending scan
      // keeps the lower pred id among full ties
      if (iou > best_iou || (iou == best_iou && inter > best_inter)) {
        best_iou = iou;
        best_pred = p;
        best_inter = inter;
        best_union = uni;
      }
    }
    if (best_pred != 0) {
      intersection_sum += best_inter;
      union_sum += best_union;
      pred_used[best_pred] = 1;
    } else {
      union_sum += gt_area[g];  // no overlapping prediction at all
    }
  }
  for (const auto& [p, a] : pred_area)
    if (!pred_used.count(p)) union_sum += a;

  if (union_sum == 0) return 1.0;
  return static_cast<double>(intersection_sum) / static_cast<double>(union_sum);
}

PanopticQuality panoptic_quality(const InstanceMap& pred, const InstanceMap& gt) {
  check_same_shape(pred, gt, "panoptic_quality");
  auto gt_area = instance_areas(gt);
  auto pred_area = instance_areas(pred);

  PanopticQuality out;
  if (gt_area.empty() && pred_area.empty()) {
    out.dq = out.sq = out.pq = 1.0;
    return out;
  }

  auto overlap = overlap_table(pred, gt);
  double iou_sum = 0.0;
  std::unordered_map<int32_t, char> gt_matched, pred_matched;
  for (const auto& [key, inter] : overlap) {
    auto [g, p] = key;
    long long uni = gt_area[g] + pred_area[p] - inter;
    double iou = static_cast<double>(inter) / static_cast<double>(uni);
    if (iou > 0.5) {  // strict threshold; matches are unique
      gt_matched[g] = 1;
      pred_matched[p] = 1;
      iou_sum += iou;
      out.tp += 1;
    }
  }
  out.fp = static_cast<long long>(pred_area.size()) - out.tp;
  out.fn = static_cast<long long>(gt_area.size()) - out.tp;

  double denom = static_cast<double>(out.tp) + 0.5 * out.fp + 0.5 * out.fn;
  out.dq = denom > 0.0 ? static_cast<double>(out.tp) / denom : 0.0;
  out.sq = out.tp > 0 ? iou_sum / static_cast<double>(out.tp) : 0.0;
  out.pq = out.dq * out.sq;
  return out;
}

double object_dice(const InstanceMap& pred, const InstanceMap& gt) {
  check_same_shape(pred, gt, "object_dice");
  auto gt_area = instance_areas(gt);
  auto pred_area = instance_areas(pred);
  if (gt_area.empty() && pred_area.empty()) return 1.0;
  if (gt_area.empty() || pred_area.empty()) return 0.0;

  auto overlap = overlap_table(pred, gt);

  // per-object best opposite match: overlap first, then the smaller partner
  // (which pins the Dice value, keeping the metric relabel-invariant); the
  // ascending (g,p) scan keeps lower ids among full ties
  std::unordered_map<int32_t, std::pair<long long, int32_t>> best_for_gt, best_for_pred;
  for (const auto& [key, inter] : overlap) {
    auto [g, p] = key;
    auto itg = best_for_gt.find(g);
    if (itg == best_for_gt.end() || inter > itg->second.first ||
        (inter == itg->second.first && pred_area[p] < pred_area[itg->second.second]))
      best_for_gt[g] = {inter, p};
    auto itp = best_for_pred.find(p);
    if (itp == best_for_pred.end() || inter > itp->second.first ||
        (inter == itp->second.first && gt_area[g] < gt_area[itp->second.second]))
      best_for_pred[p] = {inter, g};
  }

  long long gt_total = 0, pred_total = 0;
  for (const auto& [id, a] : gt_area) gt_total += a;
  for (const auto& [id, a] : pred_area) pred_total += a;

  double gt_side = 0.0;
  for (const auto& [g, a] : gt_area) {
    auto it = best_for_gt.find(g);
    if (it == best_for_gt.end()) continue;  // dice 0
    long long inter = it->second.first;
    long long p_area = pred_area[it->second.second];
    double dice = 2.0 * static_cast<double>(inter) / static_cast<double>(a + p_area);
    gt_side += dice * static_cast<double>(a) / static_cast<double>(gt_total);
  }
  double pred_side = 0.0;
  for (const auto& [p, a] : pred_area) {
    auto it = best_for_pred.find(p);
    if (it == best_for_pred.end()) continue;
    long long inter = it->second.first;
    long long g_area = gt_area[it->second.second];
    double dice = 2.0 * static_cast<double>(inter) / static_cast<double>(a + g_area);
    pred_side += dice * static_cast<double>(a) / static_cast<double>(pred_total);
  }
  return 0.5 * (gt_side + pred_side);
}

}  // namespace bonus
