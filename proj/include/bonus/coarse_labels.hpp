#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bonus/heatmap.hpp"
#include "bonus/raster.hpp"

namespace bonus {

// 8-bit RGB image, row-major, 3 bytes per pixel.
struct ImageRGB {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;

  ImageRGB() = default;
  ImageRGB(int h, int w)
      : height(h), width(w),
        rgb(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * 3, 0) {}

  std::size_t index(int r, int c) const {
    return (static_cast<std::size_t>(r) * width + c) * 3;
  }
};

// Rasterized Voronoi supervision: each pixel belongs to its nearest point
// (ties to the lower point index). Pixels whose 4-neighborhood touches a
// different cell become Background; pixels within fg_radius of their cell's
// point become Foreground(point index + 1), overriding Background; the rest
// are Ignore.
TriMask voronoi_labels(const PointSet& points, int height, int width, double fg_radius);

struct KMeansResult {
  std::vector<int32_t> assignments;  // per sample, in [0,k)
  std::vector<double> centroids;     // k x dim, row-major
  int k = 0;
  int dim = 0;
  double inertia = 0.0;  // sum of squared distances to assigned centroids
  int iterations = 0;
};

// Lloyd iterations from k-means++ seeding. Fully deterministic for a given
// seed (sampling uses raw mt19937_64 draws, no <random> distributions).
// Assignment ties go to the lower centroid index; empty clusters keep their
// centroid. Throws when k exceeds the sample count.
KMeansResult kmeans(std::span<const double> features, int dim, int k,
                    int max_iters, std::uint64_t seed);

// Tri-state supervision from k-means over per-pixel features
// (min(D, dist_clip)/dist_clip, R/255, G/255, B/255) with k = 3:
// the cluster holding the most annotated points becomes Foreground (ids from
// the nearest point), the non-empty cluster with the largest mean distance
// feature becomes Background, the remainder Ignore. Throws "degenerate
// clustering" when foreground and background resolve to the same cluster.
TriMask cluster_labels(const ImageRGB& image, const PointSet& points,
                       double dist_clip, std::uint64_t seed);

// Masked binary cross-entropy over non-Ignore pixels:
//   loss = -(1/|Omega|) * sum [y log p + (1-y) log(1-p)]
// with y = 1 on Foreground and 0 on Background, p clamped to
// [eps_log, 1-eps_log]. grad is zero on Ignore pixels (and where the clamp
// is active). Throws when every pixel is ignored.
ScalarLoss masked_cross_entropy(const RasterF32& pred, const TriMask& mask,
                                double eps_log = 1e-7);

}  // namespace bonus
