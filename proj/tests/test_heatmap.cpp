#include <doctest.h>

#include <cmath>

#include "bonus/heatmap.hpp"
#include "test_util.hpp"

using namespace bonus;

TEST_CASE("gaussian_heatmap reproduces all branches") {
  PointSet pts;
  pts.points = {{0, 0}};
  // sigma=2, r1=4, r2=8: the row through the point sweeps D = col
  HeatmapTarget h = gaussian_heatmap(pts, 1, 12, 2.0, 4.0, 8.0);
  CHECK(h.at(0, 0) == doctest::Approx(1.0));                    // exp(0)
  CHECK(h.at(0, 2) == doctest::Approx(std::exp(-0.5)));         // 0.60653...
  CHECK(h.at(0, 6) == 0.0f);                                    // zero band
  CHECK(h.at(0, 10) == -1.0f);                                  // ignore band
}

TEST_CASE("gaussian_heatmap validates parameters") {
  PointSet pts;
  pts.points = {{0, 0}};
  CHECK_THROWS_AS(gaussian_heatmap(pts, 4, 4, 2.0, 8.0, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_heatmap(pts, 4, 4, 2.0, 9.0, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_heatmap(pts, 4, 4, 0.0, 4.0, 8.0), std::invalid_argument);
  PointSet empty;
  CHECK_THROWS_AS(gaussian_heatmap(empty, 4, 4, 2.0, 4.0, 8.0), std::invalid_argument);
}

TEST_CASE("gaussian_heatmap is non-increasing in distance inside r1") {
  PointSet pts;
  pts.points = {{16, 16}};
  HeatmapTarget h = gaussian_heatmap(pts, 33, 33, 4.0, 8.0, 15.0);
  RasterF32 d = distance_to_nearest_point(pts, 33, 33);
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (d.values[i] < 8.0f && d.values[j] < 8.0f && d.values[i] <= d.values[j])
        CHECK(h.values[i] >= h.values[j]);
    }
  }
}

TEST_CASE("detection_loss is zero at a perfect prediction") {
  PointSet pts;
  pts.points = {{4, 4}};
  HeatmapTarget t = gaussian_heatmap(pts, 16, 16, 2.0, 4.0, 6.0);
  RasterF32 pred = t;
  for (float& v : pred.values)
    if (v == -1.0f) v = 0.37f;  // ignored pixels may hold anything
  ScalarLoss l = detection_loss(pred, t, 1.0, 0.1);
  CHECK(l.loss == 0.0);
  for (float g : l.grad.values) CHECK(g == 0.0f);
}

TEST_CASE("detection_loss two-pixel weighted fixture") {
  HeatmapTarget t(1, 2);
  t.values = {1.0f, 0.0f};
  RasterF32 pred(1, 2);
  pred.values = {0.0f, 1.0f};
  ScalarLoss l = detection_loss(pred, t, 1.0, 0.1);
  CHECK(l.loss == doctest::Approx(0.55).epsilon(1e-12));
}

TEST_CASE("detection_loss ignores -1 pixels completely") {
  HeatmapTarget t(1, 3);
  t.values = {1.0f, 0.0f, -1.0f};
  RasterF32 pred(1, 3);
  pred.values = {0.5f, 0.25f, 0.0f};
  double base = detection_loss(pred, t, 1.0, 0.1).loss;
  pred.values[2] = 123.0f;
  ScalarLoss l = detection_loss(pred, t, 1.0, 0.1);
  CHECK(l.loss == base);
  CHECK(l.grad.values[2] == 0.0f);
}

TEST_CASE("detection_loss requires at least one supervised pixel") {
  HeatmapTarget t(2, 2, -1.0f);
  RasterF32 pred(2, 2, 0.0f);
  CHECK_THROWS_WITH_AS(detection_loss(pred, t, 1.0, 0.1), "no supervised pixels",
                       std::runtime_error);
  RasterF32 bad(3, 2, 0.0f);
  CHECK_THROWS_AS(detection_loss(bad, t, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("detection_loss gradient matches finite differences") {
  auto gen = testutil::rng(42);
  for (int trial = 0; trial < 3; ++trial) {
    PointSet pts = testutil::random_points(gen, 32, 32, 4);
    HeatmapTarget t = gaussian_heatmap(pts, 32, 32, 2.0, 4.0, 8.0);
    RasterF32 pred = testutil::random_raster(gen, 32, 32);
    ScalarLoss l = detection_loss(pred, t, 1.0, 0.1);
    auto rep = testutil::finite_difference_check(
        [&](const RasterF32& x) { return detection_loss(x, t, 1.0, 0.1).loss; }, pred,
        l.grad, 1e-3);
    CHECK(rep.max_rel_err < 1e-4);
  }
}

TEST_CASE("extract_peaks on an empty map") {
  RasterF32 pred(8, 8, 0.0f);
  PeakExtraction pk = extract_peaks(pred, 0.65);
  CHECK(pk.points.empty());
}

TEST_CASE("extract_peaks centroid and score of a plateau") {
  RasterF32 pred(12, 12, 0.0f);
  for (int r = 4; r <= 6; ++r)
    for (int c = 4; c <= 6; ++c) pred.at(r, c) = 0.9f;
  PeakExtraction pk = extract_peaks(pred, 0.65);
  REQUIRE(pk.points.size() == 1);
  CHECK(pk.points.points[0] == Point{5, 5});
  CHECK(pk.points.scores[0] == doctest::Approx(0.9));
}

TEST_CASE("extract_peaks drops sub-threshold plateaus") {
  RasterF32 pred(8, 8, 0.5f);
  CHECK(extract_peaks(pred, 0.65).points.empty());
}

TEST_CASE("peaks of a heatmap recover well-separated points exactly") {
  // separation > 2*r2 and margin >= r1 keep every disk symmetric and disjoint
  auto gen = testutil::rng(7);
  const double sigma = 4.0, r1 = 8.0, r2 = 15.0;
  std::uniform_int_distribution<int> jitter(-3, 3);
  for (int trial = 0; trial < 5; ++trial) {
    PointSet pts;
    for (int r = 16; r + 16 < 140; r += 40)
      for (int c = 16; c + 16 < 140; c += 40)
        pts.points.push_back({r + jitter(gen), c + jitter(gen)});
    HeatmapTarget h = gaussian_heatmap(pts, 140, 140, sigma, r1, r2);
    RasterF32 pred = h;
    for (float& v : pred.values)
      if (v == -1.0f) v = 0.0f;
    PeakExtraction pk = extract_peaks(pred, 0.1);  // 0.1 < exp(-r1^2/2sigma^2) = 0.135
    REQUIRE(pk.points.size() == pts.size());
    std::vector<Point> got = pk.points.points, want = pts.points;
    auto lt = [](const Point& a, const Point& b) { return bonus::row_major_less(a, b); };
    std::sort(got.begin(), got.end(), lt);
    std::sort(want.begin(), want.end(), lt);
    CHECK(got == want);
  }
}
