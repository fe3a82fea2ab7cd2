#pragma once

#include <span>
#include <vector>

#include "bonus/raster.hpp"

namespace bonus {

// One detected pseudo-nucleus, scored for admission.
struct Candidate {
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  long long area = 0;        // pixels^2
  double mean_score = 0.0;   // mean detector score over the component
  double mean_knn_dist = 0.0;  // mean distance to the k nearest existing labels
};

// Min-max normalization onto [0,1]; a constant (or singleton) sequence maps
// to all zeros. Throws on empty input.
std::vector<double> normalize_unit(std::span<const double> values);

// Training difficulty per candidate:
//   TD = N(mean_knn_dist) * N(area) * (1 - N(mean_score))
// with N = min-max normalization over this candidate set. Low TD = easy.
std::vector<double> training_difficulty(std::span<const Candidate> cands);

// Number of candidates admitted this round: floor(n_det * exp(-n_gt/n_det)),
// 0 when n_det = 0.
long long admission_count(long long n_det, long long n_gt);

// Attach mean k-nearest-neighbor distances (candidate centroid to existing
// labels) to component statistics. Fewer than k existing labels -> mean over
// what exists; none -> 0.
std::vector<Candidate> candidates_from_components(std::span<const ComponentStats> stats,
                                                  const PointSet& existing,
                                                  int k_neighbors);

// Drop candidates within existing_radius of an existing label, rank the rest
// by ascending training difficulty (ties by row-major centroid), and keep
// the first admission_count(n_det, n_gt). Returned points are rounded
// centroids carrying the candidate mean score.
PointSet select_pseudo_labels(std::span<const Candidate> cands, const PointSet& existing,
                              double existing_radius, long long n_det, long long n_gt);

}  // namespace bonus
