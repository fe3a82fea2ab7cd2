#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bonus {

// Row-major H x W grid of 32-bit reals. Probability/heatmap rasters hold
// values in [0,1]; label-style targets may additionally carry the ignore
// sentinel -1.
struct RasterF32 {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  RasterF32() = default;
  RasterF32(int h, int w, float fill = 0.0f)
      : height(h), width(w),
        values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {
    if (h < 1 || w < 1) throw std::invalid_argument("raster dimensions must be >= 1");
  }

  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * width + c;
  }
  float& at(int r, int c) { return values[index(r, c)]; }
  float at(int r, int c) const { return values[index(r, c)]; }
  std::size_t size() const { return values.size(); }
  bool same_shape(int h, int w) const { return height == h && width == w; }
};

// H x W grid of instance ids; 0 is background. Nonzero ids need not be
// contiguous.
struct InstanceMap {
  int height = 0;
  int width = 0;
  std::vector<int32_t> ids;

  InstanceMap() = default;
  InstanceMap(int h, int w, int32_t fill = 0)
      : height(h), width(w),
        ids(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {
    if (h < 1 || w < 1) throw std::invalid_argument("instance map dimensions must be >= 1");
  }

  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * width + c;
  }
  int32_t& at(int r, int c) { return ids[index(r, c)]; }
  int32_t at(int r, int c) const { return ids[index(r, c)]; }
  std::size_t size() const { return ids.size(); }
  int32_t max_id() const;
};

// Per-pixel supervision class. tag > 0 is Foreground(id), 0 is Background,
// -1 is Ignore (excluded from every loss).
struct TriMask {
  static constexpr int32_t kIgnore = -1;
  static constexpr int32_t kBackground = 0;

  int height = 0;
  int width = 0;
  std::vector<int32_t> tags;

  TriMask() = default;
  TriMask(int h, int w, int32_t fill = kIgnore)
      : height(h), width(w),
        tags(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {
    if (h < 1 || w < 1) throw std::invalid_argument("trimask dimensions must be >= 1");
  }

  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * width + c;
  }
  int32_t& at(int r, int c) { return tags[index(r, c)]; }
  int32_t at(int r, int c) const { return tags[index(r, c)]; }
  std::size_t size() const { return tags.size(); }
};

struct Point {
  int row = 0;
  int col = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Row-major ordering, used wherever a deterministic tie-break is needed.
inline bool row_major_less(const Point& a, const Point& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

// Ordered point annotations with optional per-point scores (empty, or one
// score per point).
struct PointSet {
  std::vector<Point> points;
  std::vector<float> scores;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_scores() const { return !scores.empty(); }

  // Throws if any coordinate falls outside [0,height) x [0,width) or if two
  // points coincide.
  void validate(int height, int width) const;
};

// Minimum Euclidean distance from each pixel center to any annotated point.
// Pixel centers sit on the integer lattice; distances are exact (computed as
// sqrt of the integer squared distance). Throws "no annotations" on an empty
// point set.
RasterF32 distance_to_nearest_point(const PointSet& points, int height, int width);

// Index of the nearest point for each pixel, ties broken by lower point
// index. Shared primitive behind the Voronoi rasterization and foreground id
// assignment.
std::vector<int32_t> nearest_point_index(const PointSet& points, int height, int width);

// Connected components of mask > 0.5. Ids are assigned in ascending
// row-major order of each component's first pixel, starting at 1.
InstanceMap connected_components(const RasterF32& mask, int connectivity);

struct ComponentStats {
  int32_t id = 0;
  long long area = 0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  double mean_score = 0.0;
};

// Area, centroid, and mean score per nonzero id, sorted by id ascending.
std::vector<ComponentStats> component_stats(const InstanceMap& inst, const RasterF32& score);

}  // namespace bonus
