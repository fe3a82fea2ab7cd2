#pragma once

#include "bonus/raster.hpp"

namespace bonus {

// Heatmap regression target: exp(-D^2 / 2 sigma^2) inside the foreground
// radius, 0 in the background band, -1 (ignore) beyond r2.
using HeatmapTarget = RasterF32;

struct ScalarLoss {
  double loss = 0.0;
  RasterF32 grad;
};

// Encode point annotations as a Gaussian target:
//   D < r1        -> exp(-D^2 / (2 sigma^2))
//   r1 <= D <= r2 -> 0
//   D > r2        -> -1
// where D is the distance to the nearest point. Throws on empty points,
// sigma <= 0, or r1 >= r2.
HeatmapTarget gaussian_heatmap(const PointSet& points, int height, int width,
                               double sigma, double r1, double r2);

// Weighted MSE over non-ignored pixels:
//   loss = (1/N) * sum w_i * (target_i - pred_i)^2,  N = #(target != -1),
// w_i = w_fg where target > 0 and w_bg where target = 0. grad is
// d loss / d pred, zero at ignored pixels. Throws "no supervised pixels"
// when every pixel is ignored.
ScalarLoss detection_loss(const RasterF32& pred, const HeatmapTarget& target,
                          double w_fg, double w_bg);

struct PeakExtraction {
  PointSet points;        // one point per component, at its rounded centroid
  InstanceMap components; // the thresholded component labeling
};

// Binarize pred at peak_threshold (values clamped to [0,1] on ingest), label
// connected components, and return each component's centroid (half-up
// rounding) with its mean score.
PeakExtraction extract_peaks(const RasterF32& pred, double peak_threshold,
                             int connectivity = 8);

}  // namespace bonus
