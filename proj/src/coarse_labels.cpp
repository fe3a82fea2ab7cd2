#include "bonus/coarse_labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace bonus {

namespace {

// uniform double in [0,1) from raw engine output; avoids the implementation-
// defined <random> distributions so results are reproducible everywhere
inline double unit_draw(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double sq_norm_diff(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace

TriMask voronoi_labels(const PointSet& points, int height, int width, double fg_radius) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  std::vector<int32_t> cell = nearest_point_index(points, height, width);

  TriMask out(height, width, TriMask::kIgnore);
  const double fg_r_sq = fg_radius * fg_radius;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::size_t i = out.index(r, c);
      int32_t own = cell[i];
      // cell change across any 4-neighbor marks the Voronoi ridge
      bool ridge = (r > 0 && cell[i - width] != own) ||
                   (r + 1 < height && cell[i + width] != own) ||
                   (c > 0 && cell[i - 1] != own) ||
                   (c + 1 < width && cell[i + 1] != own);
      int32_t tag = ridge ? TriMask::kBackground : TriMask::kIgnore;
      const Point& p = points.points[own];
      double dr = r - p.row, dc = c - p.col;
      if (dr * dr + dc * dc <= fg_r_sq) tag = own + 1;  // Foreground wins
      out.tags[i] = tag;
    }
  }
  return out;
}

KMeansResult kmeans(std::span<const double> features, int dim, int k,
                    int max_iters, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("kmeans: dim must be >= 1");
  if (features.size() % dim != 0)
    throw std::invalid_argument("kmeans: feature length not a multiple of dim");
  const std::size_t n = features.size() / dim;
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("kmeans: need 1 <= k <= sample count");

  std::mt19937_64 gen(seed);
  KMeansResult res;
  res.k = k;
  res.dim = dim;
  res.centroids.assign(static_cast<std::size_t>(k) * dim, 0.0);

  // k-means++ seeding
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  std::size_t first = static_cast<std::size_t>(gen() % n);
  chosen[first] = 1;
  std::copy_n(features.data() + first * dim, dim, res.centroids.begin());
  for (int c = 1; c < k; ++c) {
    const double* prev = res.centroids.data() + static_cast<std::size_t>(c - 1) * dim;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      min_sq[i] = std::min(min_sq[i], sq_norm_diff(features.data() + i * dim, prev, dim));
      if (!chosen[i]) total += min_sq[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double u = unit_draw(gen) * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        cum += min_sq[i];
        if (cum > u) {
          pick = i;
          break;
        }
      }
    }
    if (pick == n) {  // all residual weight zero: first unchosen sample
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    chosen[pick] = 1;
    std::copy_n(features.data() + pick * dim,
                dim, res.centroids.begin() + static_cast<std::size_t>(c) * dim);
  }

  auto assign = [&](std::vector<int32_t>& out) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      double best = std::numeric_limits<double>::infinity();
      int32_t best_c = 0;
      for (int c = 0; c < k; ++c) {
        double d = sq_norm_diff(features.data() + static_cast<std::size_t>(i) * dim,
                                res.centroids.data() + static_cast<std::size_t>(c) * dim, dim);
        if (d < best) {  // ties keep the lower centroid index
          best = d;
          best_c = c;
        }
      }
      out[static_cast<std::size_t>(i)] = best_c;
    }
  };

  res.assignments.assign(n, 0);
  assign(res.assignments);

  std::vector<int32_t> next(n, 0);
  std::vector<double> sums(static_cast<std::size_t>(k) * dim);
  std::vector<long long> counts(k);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      int32_t c = res.assignments[i];
      counts[c] += 1;
      const double* f = features.data() + i * dim;
      double* s = sums.data() + static_cast<std::size_t>(c) * dim;
      for (int d = 0; d < dim; ++d) s[d] += f[d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      double inv = 1.0 / static_cast<double>(counts[c]);
      for (int d = 0; d < dim; ++d)
        res.centroids[static_cast<std::size_t>(c) * dim + d] =
            sums[static_cast<std::size_t>(c) * dim + d] * inv;
    }
    res.iterations = iter + 1;
    assign(next);
    if (next == res.assignments) break;
    res.assignments.swap(next);
  }

  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    inertia += sq_norm_diff(features.data() + i * dim,
                            res.centroids.data() +
                                static_cast<std::size_t>(res.assignments[i]) * dim,
                            dim);
  res.inertia = inertia;
  return res;
}

TriMask cluster_labels(const ImageRGB& image, const PointSet& points,
                       double dist_clip, std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  if (dist_clip <= 0.0) throw std::invalid_argument("dist_clip must be positive");
  const int h = image.height, w = image.width;
  if (h < 1 || w < 1) throw std::invalid_argument("empty image");
  points.validate(h, w);

  RasterF32 dist = distance_to_nearest_point(points, h, w);

  const std::size_t n = static_cast<std::size_t>(h) * w;
  constexpr int kDim = 4;
  std::vector<double> features(n * kDim);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::size_t i = static_cast<std::size_t>(r) * w + c;
      const std::uint8_t* px = image.rgb.data() + image.index(r, c);
      double* f = features.data() + i * kDim;
      f[0] = std::min(static_cast<double>(dist.values[i]), dist_clip) / dist_clip;
      f[1] = px[0] / 255.0;
      f[2] = px[1] / 255.0;
      f[3] = px[2] / 255.0;
    }
  }

  KMeansResult km = kmeans(features, kDim, 3, 100, seed);

  // foreground = cluster holding the most annotated points
  long long point_count[3] = {0, 0, 0};
  for (const Point& p : points.points)
    point_count[km.assignments[static_cast<std::size_t>(p.row) * w + p.col]] += 1;
  int fg = 0;
  for (int c = 1; c < 3; ++c)
    if (point_count[c] > point_count[fg]) fg = c;

  // background = non-empty cluster with the largest mean distance feature
  double dist_sum[3] = {0, 0, 0};
  long long member_count[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    int c = km.assignments[i];
    dist_sum[c] += features[i * kDim];
    member_count[c] += 1;
  }
  int bg = -1;
  double bg_mean = -1.0;
  for (int c = 0; c < 3; ++c) {
    if (member_count[c] == 0) continue;
    double mean = dist_sum[c] / static_cast<double>(member_count[c]);
    if (mean > bg_mean) {
      bg_mean = mean;
      bg = c;
    }
  }
  if (bg == fg) throw std::runtime_error("degenerate clustering");

  std::vector<int32_t> owner = nearest_point_index(points, h, w);
  TriMask out(h, w, TriMask::kIgnore);
  for (std::size_t i = 0; i < n; ++i) {
    int c = km.assignments[i];
    if (c == fg)
      out.tags[i] = owner[i] + 1;
    else if (c == bg)
      out.tags[i] = TriMask::kBackground;
  }
  return out;
}

ScalarLoss masked_cross_entropy(const RasterF32& pred, const TriMask& mask,
                                double eps_log) {
  if (!pred.same_shape(mask.height, mask.width))
    throw std::invalid_argument("masked_cross_entropy: shape mismatch");
  if (!(eps_log > 0.0) || eps_log > 1e-3)
    throw std::invalid_argument("eps_log must be in (0, 1e-3]");

  long long supervised = 0;
  for (int32_t t : mask.tags)
    if (t != TriMask::kIgnore) ++supervised;
  if (supervised == 0) throw std::runtime_error("no supervised pixels");

  ScalarLoss out;
  out.grad = RasterF32(pred.height, pred.width, 0.0f);
  const double inv_n = 1.0 / static_cast<double>(supervised);
  const double lo = eps_log, hi = 1.0 - eps_log;
  double loss = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    int32_t t = mask.tags[i];
    if (t == TriMask::kIgnore) continue;
    double p = static_cast<double>(pred.values[i]);
    double pc = std::clamp(p, lo, hi);
    bool clamped = pc != p;
    if (t > 0) {  // foreground, y = 1
      loss -= std::log(pc);
      if (!clamped) out.grad.values[i] = static_cast<float>(-inv_n / pc);
    } else {  // background, y = 0
      loss -= std::log(1.0 - pc);
      if (!clamped) out.grad.values[i] = static_cast<float>(inv_n / (1.0 - pc));
    }
  }
  out.loss = loss * inv_n;
  return out;
}

}  // namespace bonus
