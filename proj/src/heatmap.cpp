#include "bonus/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bonus/raster.hpp"

namespace bonus {

HeatmapTarget gaussian_heatmap(const PointSet& points, int height, int width,
                               double sigma, double r1, double r2) {
  if (points.empty()) throw std::invalid_argument("no annotations");
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  if (!(r1 > 0.0) || r1 >= r2) throw std::invalid_argument("requires 0 < r1 < r2");
  points.validate(height, width);

  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  HeatmapTarget out(height, width);
#pragma omp parallel for schedule(static)
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

ScalarLoss detection_loss(const RasterF32& pred, const HeatmapTarget& target,
                          double w_fg, double w_bg) {
  if (!pred.same_shape(target.height, target.width))
    throw std::invalid_argument("detection_loss: shape mismatch");
  const std::size_t n = pred.size();

  long long supervised = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (target.values[i] != -1.0f) ++supervised;
  if (supervised == 0) throw std::runtime_error("no supervised pixels");

  ScalarLoss out;
  out.grad = RasterF32(pred.height, pred.width, 0.0f);
  const double inv_n = 1.0 / static_cast<double>(supervised);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    float t = target.values[i];
    if (t == -1.0f) continue;
    double w = t > 0.0f ? w_fg : w_bg;
    double diff = static_cast<double>(t) - static_cast<double>(pred.values[i]);
    loss += w * diff * diff;
    out.grad.values[i] = static_cast<float>(2.0 * w * -diff * inv_n);
  }
  out.loss = loss * inv_n;
  return out;
}

PeakExtraction extract_peaks(const RasterF32& pred, double peak_threshold,
                             int connectivity) {
  RasterF32 clamped(pred.height, pred.width);
  for (std::size_t i = 0; i < pred.size(); ++i)
    clamped.values[i] = std::clamp(pred.values[i], 0.0f, 1.0f);

  RasterF32 binary(pred.height, pred.width);
  for (std::size_t i = 0; i < clamped.size(); ++i)
    binary.values[i] = clamped.values[i] > static_cast<float>(peak_threshold) ? 1.0f : 0.0f;

  PeakExtraction out;
  out.components = connected_components(binary, connectivity);
  for (const ComponentStats& s : component_stats(out.components, clamped)) {
    out.points.points.push_back({static_cast<int>(std::floor(s.centroid_row + 0.5)),
                                 static_cast<int>(std::floor(s.centroid_col + 0.5))});
    out.points.scores.push_back(static_cast<float>(s.mean_score));
  }
  return out;
}

}  // namespace bonus
