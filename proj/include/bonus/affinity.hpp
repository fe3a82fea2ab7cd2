#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bonus/raster.hpp"

namespace bonus {

enum class AffinitySubset : std::uint8_t {
  FgPos = 0,    // same instance
  FgNeg = 1,    // different instances
  BgPos = 2,    // both background
  CrossNeg = 3  // one foreground, one background
};

// One supervised pixel pair. Endpoints are stored canonically (a before b in
// row-major order). Pairs with an uncertain endpoint are never emitted.
struct AffinityPair {
  std::uint16_t a_row = 0, a_col = 0;
  std::uint16_t b_row = 0, b_col = 0;
  std::int8_t label = 0;  // 1 positive, 0 negative
  AffinitySubset subset = AffinitySubset::FgPos;

  Point a() const { return {a_row, a_col}; }
  Point b() const { return {b_row, b_col}; }
};

struct Offset {
  int dr = 0;
  int dc = 0;
};

// All lattice offsets in the upper half-disk of radius gamma (dr > 0, or
// dr == 0 and dc > 0), ordered by (dr, dc); each unordered pixel pair is
// generated exactly once. stride > 1 keeps every stride-th offset of that
// list.
std::vector<Offset> half_disk_offsets(double gamma, int stride = 1);

// Coarse prediction binarized with two thresholds: prob > t_f pixels carry
// instance ids (connected components of that mask), prob in [t_b, t_f] is
// uncertain, prob < t_b is confident background.
struct CoarseInstancePrediction {
  RasterF32 prob;
  InstanceMap instances;
  std::vector<std::uint8_t> uncertain;  // per pixel, 1 = uncertain
};

CoarseInstancePrediction make_coarse_prediction(const RasterF32& prob, double t_f,
                                                double t_b, int connectivity = 8);

// Affinity supervision for every confident pixel and in-bounds offset:
// same instance -> (1, FgPos); different instances -> (0, FgNeg); both
// background -> (1, BgPos); mixed -> (0, CrossNeg); any uncertain endpoint
// is skipped. Pair order is deterministic: row-major base pixel, then offset
// index.
std::vector<AffinityPair> build_affinity_pairs(const CoarseInstancePrediction& coarse,
                                               std::span<const Offset> offsets);

// 8-connected digital line from a to b, endpoints inclusive. The traced
// pixel set is symmetric in (a,b): endpoints are ordered row-major before
// tracing and the sequence is reversed as needed so it starts at a.
std::vector<Point> path_pixels(Point a, Point b);

// 1 - max of the boundary map over path_pixels(a, b).
double affinity_from_boundary(const RasterF32& boundary, const AffinityPair& pair);

// Batch evaluation over precomputed per-offset path templates. Exactly equal
// to affinity_from_boundary per pair.
std::vector<double> affinity_from_boundary_batch(const RasterF32& boundary,
                                                 std::span<const AffinityPair> pairs);

struct BoundaryLossResult {
  double loss = 0.0;
  RasterF32 grad;                            // d loss / d boundary
  std::array<std::size_t, 4> subset_counts{};  // indexed by AffinitySubset
};

// Four-way normalized boundary-mining loss:
//   loss = -mean_{FgPos} log a - mean_{BgPos} log a
//          -mean_{FgNeg} log(1-a) - mean_{CrossNeg} log(1-a)
// with a = 1 - path-max, clamped to [eps_log, 1-eps_log]. Empty subsets
// contribute 0; throws "no supervision pairs" when all four are empty.
// Each pair's gradient routes entirely to its path-max pixel (ties: lowest
// row-major index among maxima). Parallel evaluation is bit-identical to the
// serial reference: per-pair terms are computed in parallel and reduced in
// pair order.
BoundaryLossResult boundary_loss(const RasterF32& boundary,
                                 std::span<const AffinityPair> pairs, double eps_log);

// Pixels where a finite-difference check of the boundary-loss subgradient is
// ill-posed: every pair whose two largest path values lie within `gap` marks
// its whole path (perturbing any of those pixels can flip the arg max).
std::vector<std::uint8_t> boundary_tie_exclusion(const RasterF32& boundary,
                                                 std::span<const AffinityPair> pairs,
                                                 double gap);

// Fine-stage hybrid loss: l_vor + l_clu + beta * l_boundary.
double total_fine_loss(double l_vor, double l_clu, double l_boundary, double beta);

}  // namespace bonus
