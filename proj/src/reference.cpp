#include "bonus/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "affinity_detail.hpp"

namespace bonus::reference {

RasterF32 distance_to_nearest_point(const PointSet& points, int height, int width) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  points.validate(height, width);
  RasterF32 out(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      long long best = std::numeric_limits<long long>::max();
      for (const Point& p : points.points) {
        long long dr = r - p.row, dc = c - p.col;
        best = std::min(best, dr * dr + dc * dc);
      }
      out.at(r, c) = static_cast<float>(std::sqrt(static_cast<double>(best)));
    }
  }
  return out;
}

std::vector<int32_t> nearest_point_index(const PointSet& points, int height, int width) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  points.validate(height, width);
  std::vector<int32_t> out(static_cast<std::size_t>(height) * width, 0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      long long best = std::numeric_limits<long long>::max();
      int32_t best_idx = 0;
      for (std::size_t j = 0; j < points.points.size(); ++j) {
        long long dr = r - points.points[j].row, dc = c - points.points[j].col;
        long long d = dr * dr + dc * dc;
        if (d < best) {
          best = d;
          best_idx = static_cast<int32_t>(j);
        }
      }
      out[static_cast<std::size_t>(r) * width + c] = best_idx;
    }
  }
  return out;
}

HeatmapTarget gaussian_heatmap(const PointSet& points, int height, int width,
                               double sigma, double r1, double r2) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  if (!(r1 > 0.0) || r1 >= r2) throw std::invalid_argument("requires 0 < r1 < r2");
  points.validate(height, width);

  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  HeatmapTarget out(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      long long best = std::numeric_limits<long long>::max();
      for (const Point& p : points.points) {
        long long dr = r - p.row, dc = c - p.col;
        best = std::min(best, dr * dr + dc * dc);
      }
      double dist = std::sqrt(static_cast<double>(best));
      float v;
      if (dist < r1)
        v = static_cast<float>(std::exp(-(static_cast<double>(best)) * inv_two_sigma_sq));
      else if (dist <= r2)
        v = 0.0f;
      else
        v = -1.0f;
      out.at(r, c) = v;
    }
  }
  return out;
}

std::vector<AffinityPair> build_affinity_pairs(const CoarseInstancePrediction& coarse,
                                               std::span<const Offset> offsets) {
  const int h = coarse.prob.height, w = coarse.prob.width;
  if (h > 65535 || w > 65535)
    throw std::invalid_argument("raster too large for affinity pairs (max 65535)");
  detail::check_offsets_canonical(offsets);
  std::vector<AffinityPair> pairs;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::size_t ia = static_cast<std::size_t>(r) * w + c;
      for (const Offset& o : offsets) {
        int nr = r + o.dr, nc = c + o.dc;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        auto cls = detail::classify_pair(coarse, ia, static_cast<std::size_t>(nr) * w + nc);
        if (!cls) continue;
        pairs.push_back({static_cast<std::uint16_t>(r), static_cast<std::uint16_t>(c),
                         static_cast<std::uint16_t>(nr), static_cast<std::uint16_t>(nc),
                         cls->first, cls->second});
      }
    }
  }
  return pairs;
}

namespace {

// naive per-pair path max via path_pixels; ties to the lowest row-major index
inline void naive_path_max(const RasterF32& boundary, const AffinityPair& pair,
                           float& max_val, std::int64_t& max_idx) {
  bool first = true;
  for (const Point& p : path_pixels(pair.a(), pair.b())) {
    std::int64_t idx = static_cast<std::int64_t>(p.row) * boundary.width + p.col;
    float v = boundary.values[idx];
    if (first || v > max_val || (v == max_val && idx < max_idx)) {
      max_val = v;
      max_idx = idx;
    }
    first = false;
  }
}

}  // namespace

std::vector<double> affinity_from_boundary_batch(const RasterF32& boundary,
                                                 std::span<const AffinityPair> pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out[i] = affinity_from_boundary(boundary, pairs[i]);
  return out;
}

BoundaryLossResult boundary_loss(const RasterF32& boundary,
                                 std::span<const AffinityPair> pairs, double eps_log) {
  if (!(eps_log > 0.0) || eps_log > 1e-3)
    throw std::invalid_argument("eps_log must be in (0, 1e-3]");
  if (pairs.empty()) throw std::runtime_error("no supervision pairs");

  BoundaryLossResult res;
  res.grad = RasterF32(boundary.height, boundary.width, 0.0f);
  for (const AffinityPair& p : pairs)
    res.subset_counts[static_cast<std::size_t>(p.subset)] += 1;

  std::array<double, 4> sums{};
  std::vector<double> grad_acc(boundary.size(), 0.0);
  for (const AffinityPair& p : pairs) {
    float m = 0.0f;
    std::int64_t idx = 0;
    naive_path_max(boundary, p, m, idx);
    detail::PairTerm t = detail::boundary_pair_term(p.label == 1, static_cast<double>(m),
                                                    eps_log);
    const std::size_t s = static_cast<std::size_t>(p.subset);
    sums[s] += t.term;
    if (t.dterm != 0.0)
      grad_acc[idx] += t.dterm / static_cast<double>(res.subset_counts[s]);
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

}  // namespace bonus::reference
