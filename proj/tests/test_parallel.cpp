#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstring>

#include "bonus/affinity.hpp"
#include "bonus/coarse_labels.hpp"
#include "bonus/heatmap.hpp"
#include "bonus/reference.hpp"
#include "test_util.hpp"

using namespace bonus;

// The OpenMP kernels must be bit-identical to the serial reference
// regardless of the thread count.

namespace {

struct ThreadGuard {
#ifdef _OPENMP
  int saved;
  explicit ThreadGuard(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadGuard() { omp_set_num_threads(saved); }
#else
  explicit ThreadGuard(int) {}
#endif
};

bool bits_equal(const RasterF32& a, const RasterF32& b) {
  return a.height == b.height && a.width == b.width &&
         std::memcmp(a.values.data(), b.values.data(), a.size() * 4) == 0;
}

bool pairs_equal(const std::vector<AffinityPair>& a, const std::vector<AffinityPair>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(AffinityPair)) == 0;
}

}  // namespace

TEST_CASE("distance and heatmap kernels match the serial reference bitwise") {
  auto gen = testutil::rng(301);
  for (int threads : {1, 4}) {
    ThreadGuard guard(threads);
    for (int trial = 0; trial < 5; ++trial) {
      PointSet pts = testutil::random_points(gen, 48, 37, 11);
      CHECK(bits_equal(distance_to_nearest_point(pts, 48, 37),
                       reference::distance_to_nearest_point(pts, 48, 37)));
      CHECK(nearest_point_index(pts, 48, 37) == reference::nearest_point_index(pts, 48, 37));
      CHECK(bits_equal(gaussian_heatmap(pts, 48, 37, 4.0, 8.0, 15.0),
                       reference::gaussian_heatmap(pts, 48, 37, 4.0, 8.0, 15.0)));
    }
  }
}

TEST_CASE("pair construction matches the serial reference") {
  auto gen = testutil::rng(303);
  for (int threads : {1, 4}) {
    ThreadGuard guard(threads);
    RasterF32 prob = testutil::random_raster(gen, 40, 40);
    CoarseInstancePrediction coarse = make_coarse_prediction(prob, 0.6, 0.05, 8);
    std::vector<Offset> offs = half_disk_offsets(5.0);
    CHECK(pairs_equal(build_affinity_pairs(coarse, offs),
                      reference::build_affinity_pairs(coarse, offs)));
  }
}

TEST_CASE("boundary loss and gradient match the serial reference bitwise") {
  auto gen = testutil::rng(305);
  RasterF32 prob = testutil::random_raster(gen, 40, 40);
  CoarseInstancePrediction coarse = make_coarse_prediction(prob, 0.6, 0.05, 8);
  std::vector<AffinityPair> pairs = build_affinity_pairs(coarse, half_disk_offsets(6.0));
  RasterF32 boundary = testutil::random_raster(gen, 40, 40);

  BoundaryLossResult serial = reference::boundary_loss(boundary, pairs, 1e-7);
  for (int threads : {1, 4}) {
    ThreadGuard guard(threads);
    BoundaryLossResult par = boundary_loss(boundary, pairs, 1e-7);
    CHECK(par.loss == serial.loss);  // bitwise, not approximate
    CHECK(bits_equal(par.grad, serial.grad));
    CHECK(par.subset_counts == serial.subset_counts);
  }

  std::vector<double> naive = reference::affinity_from_boundary_batch(boundary, pairs);
  std::vector<double> fast = affinity_from_boundary_batch(boundary, pairs);
  CHECK(naive == fast);
}

TEST_CASE("two runs of the same kernel are identical") {
  auto gen = testutil::rng(307);
  PointSet pts = testutil::random_points(gen, 64, 64, 20);
  RasterF32 a = distance_to_nearest_point(pts, 64, 64);
  RasterF32 b = distance_to_nearest_point(pts, 64, 64);
  CHECK(bits_equal(a, b));
}
