#include "bonus/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "affinity_detail.hpp"

namespace bonus {

namespace {

// Path templates per offset: Bresenham pixels from (0,0) to (dr,dc) stored
// as linear index deltas for a raster of the given width. Path pixels never
// leave the endpoint bounding box, so base + delta stays in bounds whenever
// both endpoints are in bounds.
std::vector<int> trace_template(Offset o, int width) {
  std::vector<Point> pts = path_pixels({0, 0}, {o.dr, o.dc});
  std::vector<int> deltas;
  deltas.reserve(pts.size());
  for (const Point& p : pts) deltas.push_back(p.row * width + p.col);
  return deltas;
}

inline long long offset_key(int dr, int dc) {
  return static_cast<long long>(dr) * 0x100000LL + dc;
}

// templates for the distinct offsets appearing in a pair list
class TemplateTable {
 public:
  TemplateTable(std::span<const AffinityPair> pairs, int width) {
    for (const AffinityPair& p : pairs) {
      int dr = static_cast<int>(p.b_row) - static_cast<int>(p.a_row);
      int dc = static_cast<int>(p.b_col) - static_cast<int>(p.a_col);
      long long key = offset_key(dr, dc);
      if (map_.emplace(key, templates_.size()).second)
        templates_.push_back(trace_template({dr, dc}, width));
    }
  }

  const std::vector<int>& of(const AffinityPair& p) const {
    int dr = static_cast<int>(p.b_row) - static_cast<int>(p.a_row);
    int dc = static_cast<int>(p.b_col) - static_cast<int>(p.a_col);
    return templates_[map_.at(offset_key(dr, dc))];
  }

 private:
  std::unordered_map<long long, std::size_t> map_;
  std::vector<std::vector<int>> templates_;
};

// path max and its pixel (ties: lowest row-major index)
inline void path_max(const RasterF32& boundary, const AffinityPair& pair,
                     const std::vector<int>& tpl, float& max_val, std::int64_t& max_idx) {
  const std::int64_t base =
      static_cast<std::int64_t>(pair.a_row) * boundary.width + pair.a_col;
  max_val = boundary.values[base + tpl[0]];
  max_idx = base + tpl[0];
  for (std::size_t j = 1; j < tpl.size(); ++j) {
    std::int64_t idx = base + tpl[j];
    float v = boundary.values[idx];
    if (v > max_val || (v == max_val && idx < max_idx)) {
      max_val = v;
      max_idx = idx;
    }
  }
}

void check_pair_bounds(const RasterF32& boundary, std::span<const AffinityPair> pairs) {
  for (const AffinityPair& p : pairs)
    if (p.a_row >= boundary.height || p.a_col >= boundary.width ||
        p.b_row >= boundary.height || p.b_col >= boundary.width)
      throw std::invalid_argument("affinity pair out of raster bounds");
}

}  // namespace

std::vector<Offset> half_disk_offsets(double gamma, int stride) {
  if (gamma < 1.0) throw std::invalid_argument("gamma must be >= 1");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const int g = static_cast<int>(std::floor(gamma));
  const double g_sq = gamma * gamma;
  std::vector<Offset> all;
  for (int dc = 1; dc <= g; ++dc)
    if (dc * dc <= g_sq) all.push_back({0, dc});
  for (int dr = 1; dr <= g; ++dr)
    for (int dc = -g; dc <= g; ++dc)
      if (dr * dr + dc * dc <= g_sq) all.push_back({dr, dc});
  if (stride == 1) return all;
  std::vector<Offset> sub;
  for (std::size_t i = 0; i < all.size(); i += stride) sub.push_back(all[i]);
  return sub;
}

CoarseInstancePrediction make_coarse_prediction(const RasterF32& prob, double t_f,
                                                double t_b, int connectivity) {
  if (!(t_b > 0.0) || !(t_b < t_f) || !(t_f < 1.0))
    throw std::invalid_argument("requires 0 < t_b < t_f < 1");
  CoarseInstancePrediction out;
  out.prob = prob;
  RasterF32 fg(prob.height, prob.width);
  for (std::size_t i = 0; i < prob.size(); ++i)
    fg.values[i] = prob.values[i] > static_cast<float>(t_f) ? 1.0f : 0.0f;
  out.instances = connected_components(fg, connectivity);
  out.uncertain.assign(prob.size(), 0);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    float v = prob.values[i];
    out.uncertain[i] =
        (v >= static_cast<float>(t_b) && v <= static_cast<float>(t_f)) ? 1 : 0;
  }
  return out;
}

std::vector<AffinityPair> build_affinity_pairs(const CoarseInstancePrediction& coarse,
                                               std::span<const Offset> offsets) {
  const int h = coarse.prob.height, w = coarse.prob.width;
  if (h > 65535 || w > 65535)
    throw std::invalid_argument("raster too large for affinity pairs (max 65535)");
  detail::check_offsets_canonical(offsets);

  // two passes keep the fill parallel while preserving the deterministic
  // (row-major pixel, offset index) emission order
  std::vector<std::size_t> row_count(h, 0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    std::size_t count = 0;
    for (int c = 0; c < w; ++c) {
      std::size_t ia = static_cast<std::size_t>(r) * w + c;
      for (const Offset& o : offsets) {
        int nr = r + o.dr, nc = c + o.dc;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        if (detail::classify_pair(coarse, ia, static_cast<std::size_t>(nr) * w + nc))
          ++count;
      }
    }
    row_count[r] = count;
  }

  std::vector<std::size_t> row_start(h + 1, 0);
  for (int r = 0; r < h; ++r) row_start[r + 1] = row_start[r] + row_count[r];

  std::vector<AffinityPair> pairs(row_start[h]);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    std::size_t at = row_start[r];
    for (int c = 0; c < w; ++c) {
      std::size_t ia = static_cast<std::size_t>(r) * w + c;
      for (const Offset& o : offsets) {
        int nr = r + o.dr, nc = c + o.dc;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        auto cls = detail::classify_pair(coarse, ia, static_cast<std::size_t>(nr) * w + nc);
        if (!cls) continue;
        AffinityPair& p = pairs[at++];
        p.a_row = static_cast<std::uint16_t>(r);
        p.a_col = static_cast<std::uint16_t>(c);
        p.b_row = static_cast<std::uint16_t>(nr);
        p.b_col = static_cast<std::uint16_t>(nc);
        p.label = cls->first;
        p.subset = cls->second;
      }
    }
  }
  return pairs;
}

std::vector<Point> path_pixels(Point a, Point b) {
  const bool swapped = row_major_less(b, a);
  Point s = swapped ? b : a;
  Point e = swapped ? a : b;

  std::vector<Point> path;
  path.reserve(static_cast<std::size_t>(
                   std::max(std::abs(e.row - s.row), std::abs(e.col - s.col))) +
               1);
  int r = s.row, c = s.col;
  const int dc = std::abs(e.col - s.col), sc = s.col < e.col ? 1 : -1;
  const int dr = -std::abs(e.row - s.row), sr = s.row < e.row ? 1 : -1;
  int err = dc + dr;
  while (true) {
    path.push_back({r, c});
    if (r == e.row && c == e.col) break;
    int e2 = 2 * err;
    if (e2 >= dr) {
      err += dr;
      c += sc;
    }
    if (e2 <= dc) {
      err += dc;
      r += sr;
    }
  }
  if (swapped) std::reverse(path.begin(), path.end());
  return path;
}

double affinity_from_boundary(const RasterF32& boundary, const AffinityPair& pair) {
  if (pair.a_row >= boundary.height || pair.a_col >= boundary.width ||
      pair.b_row >= boundary.height || pair.b_col >= boundary.width)
    throw std::invalid_argument("affinity pair out of raster bounds");
  float m = 0.0f;
  bool first = true;
  for (const Point& p : path_pixels(pair.a(), pair.b())) {
    float v = boundary.at(p.row, p.col);
    if (first || v > m) m = v;
    first = false;
  }
  return 1.0 - static_cast<double>(m);
}

std::vector<double> affinity_from_boundary_batch(const RasterF32& boundary,
                                                 std::span<const AffinityPair> pairs) {
  check_pair_bounds(boundary, pairs);
  TemplateTable table(pairs, boundary.width);
  std::vector<double> out(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pairs.size()); ++i) {
    float m;
    std::int64_t idx;
    path_max(boundary, pairs[i], table.of(pairs[i]), m, idx);
    out[i] = 1.0 - static_cast<double>(m);
  }
  return out;
}

BoundaryLossResult boundary_loss(const RasterF32& boundary,
                                 std::span<const AffinityPair> pairs, double eps_log) {
  if (!(eps_log > 0.0) || eps_log > 1e-3)
    throw std::invalid_argument("eps_log must be in (0, 1e-3]");
  check_pair_bounds(boundary, pairs);

  if (pairs.empty()) throw std::runtime_error("no supervision pairs");

  BoundaryLossResult res;
  res.grad = RasterF32(boundary.height, boundary.width, 0.0f);
  for (const AffinityPair& p : pairs)
    res.subset_counts[static_cast<std::size_t>(p.subset)] += 1;

  TemplateTable table(pairs, boundary.width);

  // parallel phase: per-pair path max and arg max
  std::vector<float> max_val(pairs.size());
  std::vector<std::int64_t> max_idx(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pairs.size()); ++i)
    path_max(boundary, pairs[i], table.of(pairs[i]), max_val[i], max_idx[i]);

  // serial reduction in pair order keeps the result bit-identical to the
  // sequential reference
  std::array<double, 4> sums{};
  std::vector<double> grad_acc(boundary.size(), 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const AffinityPair& p = pairs[i];
    detail::PairTerm t =
        detail::boundary_pair_term(p.label == 1, static_cast<double>(max_val[i]), eps_log);
    const std::size_t s = static_cast<std::size_t>(p.subset);
    sums[s] += t.term;
    if (t.dterm != 0.0)
      grad_acc[max_idx[i]] += t.dterm / static_cast<double>(res.subset_counts[s]);
  }

  double loss = 0.0;
  for (std::size_t s = 0; s < 4; ++s)
    if (res.subset_counts[s] > 0)
      loss += sums[s] / static_cast<double>(res.subset_counts[s]);
  res.loss = loss;
  for (std::size_t i = 0; i < grad_acc.size(); ++i)
    res.grad.values[i] = static_cast<float>(grad_acc[i]);
  return res;
}

std::vector<std::uint8_t> boundary_tie_exclusion(const RasterF32& boundary,
                                                 std::span<const AffinityPair> pairs,
                                                 double gap) {
  check_pair_bounds(boundary, pairs);
  TemplateTable table(pairs, boundary.width);
  std::vector<std::uint8_t> excluded(boundary.size(), 0);
  std::vector<std::int64_t> near_max;
  for (const AffinityPair& p : pairs) {
    const std::vector<int>& tpl = table.of(p);
    const std::int64_t base = static_cast<std::int64_t>(p.a_row) * boundary.width + p.a_col;
    float top1 = -1.0f;
    for (int d : tpl) top1 = std::max(top1, boundary.values[base + d]);
    // pixels inside the tie window of the path max; if two or more compete,
    // a perturbation can flip the arg max at any of them
    near_max.clear();
    for (int d : tpl)
      if (static_cast<double>(top1) - static_cast<double>(boundary.values[base + d]) < gap)
        near_max.push_back(base + d);
    if (near_max.size() > 1)
      for (std::int64_t i : near_max) excluded[i] = 1;
  }
  return excluded;
}

double total_fine_loss(double l_vor, double l_clu, double l_boundary, double beta) {
  if (!std::isfinite(l_vor) || !std::isfinite(l_clu) || !std::isfinite(l_boundary))
    throw std::invalid_argument("total_fine_loss: non-finite term");
  return l_vor + l_clu + beta * l_boundary;
}

}  // namespace bonus
