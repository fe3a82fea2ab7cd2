#pragma once

#include <span>
#include <vector>

#include "bonus/affinity.hpp"
#include "bonus/heatmap.hpp"
#include "bonus/raster.hpp"

// Serial reference implementations of the parallel kernels. Kept for bit-
// identity tests against the OpenMP paths and for benchmarking; the boundary
// kernels also take the naive per-pair path_pixels route instead of offset
// templates, so they double as an independent oracle.
namespace bonus::reference {

RasterF32 distance_to_nearest_point(const PointSet& points, int height, int width);

std::vector<int32_t> nearest_point_index(const PointSet& points, int height, int width);

HeatmapTarget gaussian_heatmap(const PointSet& points, int height, int width,
                               double sigma, double r1, double r2);

std::vector<AffinityPair> build_affinity_pairs(const CoarseInstancePrediction& coarse,
                                               std::span<const Offset> offsets);

std::vector<double> affinity_from_boundary_batch(const RasterF32& boundary,
                                                 std::span<const AffinityPair> pairs);

BoundaryLossResult boundary_loss(const RasterF32& boundary,
                                 std::span<const AffinityPair> pairs, double eps_log);

}  // namespace bonus::reference
