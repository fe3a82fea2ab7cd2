#include "bonus/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace bonus {

namespace {

// squared Euclidean distance between lattice points, exact in int64
inline long long sq_dist(int r0, int c0, int r1, int c1) {
  long long dr = r0 - r1;
  long long dc = c0 - c1;
  return dr * dr + dc * dc;
}

inline void check_connectivity(int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8");
}

}  // namespace

int32_t InstanceMap::max_id() const {
  int32_t m = 0;
  for (int32_t v : ids) m = std::max(m, v);
  return m;
}

void PointSet::validate(int height, int width) const {
  if (!scores.empty() && scores.size() != points.size())
    throw std::invalid_argument("scores must be empty or match the point count");
  std::unordered_set<long long> seen;
  seen.reserve(points.size());
  for (const Point& p : points) {
    if (p.row < 0 || p.col < 0 || (height >= 0 && p.row >= height) ||
        (width >= 0 && p.col >= width))
      throw std::invalid_argument("point out of bounds: (" + std::to_string(p.row) +
                                  "," + std::to_string(p.col) + ")");
    long long key = static_cast<long long>(p.row) * 0x40000000LL + p.col;
    if (!seen.insert(key).second)
      throw std::invalid_argument("duplicate point: (" + std::to_string(p.row) + "," +
                                  std::to_string(p.col) + ")");
  }
}

RasterF32 distance_to_nearest_point(const PointSet& points, int height, int width) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  points.validate(height, width);
  RasterF32 out(height, width);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      long long best = std::numeric_limits<long long>::max();
      for (const Point& p : points.points)
        best = std::min(best, sq_dist(r, c, p.row, p.col));
      out.at(r, c) = static_cast<float>(std::sqrt(static_cast<double>(best)));
    }
  }
  return out;
}

std::vector<int32_t> nearest_point_index(const PointSet& points, int height, int width) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  points.validate(height, width);
  std::vector<int32_t> out(static_cast<std::size_t>(height) * width, 0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      long long best = std::numeric_limits<long long>::max();
      int32_t best_idx = 0;
      for (std::size_t j = 0; j < points.points.size(); ++j) {
        long long d = sq_dist(r, c, points.points[j].row, points.points[j].col);
        if (d < best) {  // strict: ties keep the lower index
          best = d;
          best_idx = static_cast<int32_t>(j);
        }
      }
      out[static_cast<std::size_t>(r) * width + c] = best_idx;
    }
  }
  return out;
}

InstanceMap connected_components(const RasterF32& mask, int connectivity) {
  check_connectivity(connectivity);
  if (mask.height < 1 || mask.width < 1)
    throw std::invalid_argument("mask dimensions must be >= 1");
  const int h = mask.height, w = mask.width;
  InstanceMap out(h, w, 0);

  static constexpr int dr8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int dc8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int dr4[4] = {-1, 0, 0, 1};
  static constexpr int dc4[4] = {0, -1, 1, 0};
  const int* drs = connectivity == 8 ? dr8 : dr4;
  const int* dcs = connectivity == 8 ? dc8 : dc4;
  const int ndirs = connectivity;

  std::vector<std::size_t> stack;
  int32_t next_id = 1;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::size_t i = mask.index(r, c);
      if (mask.values[i] <= 0.5f || out.ids[i] != 0) continue;
      int32_t id = next_id++;
      out.ids[i] = id;
      stack.clear();
      stack.push_back(i);
      while (!stack.empty()) {
        std::size_t cur = stack.back();
        stack.pop_back();
        int cr = static_cast<int>(cur / w), cc = static_cast<int>(cur % w);
        for (int d = 0; d < ndirs; ++d) {
          int nr = cr + drs[d], nc = cc + dcs[d];
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          std::size_t ni = mask.index(nr, nc);
          if (mask.values[ni] > 0.5f && out.ids[ni] == 0) {
            out.ids[ni] = id;
            stack.push_back(ni);
          }
        }
      }
    }
  }
  return out;
}

std::vector<ComponentStats> component_stats(const InstanceMap& inst, const RasterF32& score) {
  if (!score.same_shape(inst.height, inst.width))
    throw std::invalid_argument("component_stats: shape mismatch");
  int32_t max_id = inst.max_id();
  std::vector<long long> area(static_cast<std::size_t>(max_id) + 1, 0);
  std::vector<double> row_sum(area.size(), 0.0), col_sum(area.size(), 0.0),
      score_sum(area.size(), 0.0);
  for (int r = 0; r < inst.height; ++r) {
    for (int c = 0; c < inst.width; ++c) {
      int32_t id = inst.at(r, c);
      if (id <= 0) continue;
      area[id] += 1;
      row_sum[id] += r;
      col_sum[id] += c;
      score_sum[id] += score.at(r, c);
    }
  }
  std::vector<ComponentStats> out;
  for (int32_t id = 1; id <= max_id; ++id) {
    if (area[id] == 0) continue;
    ComponentStats s;
    s.id = id;
    s.area = area[id];
    s.centroid_row = row_sum[id] / static_cast<double>(area[id]);
    s.centroid_col = col_sum[id] / static_cast<double>(area[id]);
    s.mean_score = score_sum[id] / static_cast<double>(area[id]);
    out.push_back(s);
  }
  return out;
}

}  // namespace bonus
