#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bonus/curriculum.hpp"
#include "test_util.hpp"

using namespace bonus;

namespace {

Candidate make_cand(double row, double col, long long area, double score, double knn) {
  Candidate c;
  c.centroid_row = row;
  c.centroid_col = col;
  c.area = area;
  c.mean_score = score;
  c.mean_knn_dist = knn;
  return c;
}

std::vector<Candidate> random_candidates(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> pos(0.0, 100.0), score(0.0, 1.0), knn(0.0, 40.0);
  std::uniform_int_distribution<long long> area(1, 400);
  std::vector<Candidate> out;
  for (int i = 0; i < n; ++i)
    out.push_back(make_cand(pos(gen), pos(gen), area(gen), score(gen), knn(gen)));
  return out;
}

}  // namespace

TEST_CASE("normalize_unit min-max and degenerate rules") {
  std::vector<double> v{2.0, 4.0, 6.0};
  CHECK(normalize_unit(v) == std::vector<double>{0.0, 0.5, 1.0});
  std::vector<double> flat{5.0, 5.0, 5.0};
  CHECK(normalize_unit(flat) == std::vector<double>{0.0, 0.0, 0.0});
  std::vector<double> one{3.0};
  CHECK(normalize_unit(one) == std::vector<double>{0.0});
  CHECK_THROWS_AS(normalize_unit(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("training_difficulty poles") {
  std::vector<Candidate> cands{
      make_cand(0, 0, 1, 0.9, 1.0),    // min dist, min area, max score -> 0
      make_cand(1, 1, 50, 0.5, 5.0),   //
      make_cand(2, 2, 100, 0.1, 9.0),  // max dist, max area, min score -> 1
  };
  auto td = training_difficulty(cands);
  CHECK(td[0] == doctest::Approx(0.0));
  CHECK(td[2] == doctest::Approx(1.0));
  CHECK(training_difficulty(std::vector<Candidate>{}).empty());
}

TEST_CASE("training_difficulty midpoint product") {
  std::vector<Candidate> cands{
      make_cand(0, 0, 1, 0.2, 0.0),
      make_cand(1, 1, 3, 0.5, 2.0),  // every factor normalizes to 0.5
      make_cand(2, 2, 5, 0.8, 4.0),
  };
  auto td = training_difficulty(cands);
  CHECK(td[1] == doctest::Approx(0.125));
}

TEST_CASE("admission_count closed-form values") {
  CHECK(admission_count(100, 0) == 100);
  CHECK(admission_count(100, 100) == 36);  // floor(100/e)
  CHECK(admission_count(0, 50) == 0);
}

TEST_CASE("admission_count is non-increasing in n_gt") {
  long long prev = admission_count(100, 0);
  CHECK(prev == 100);
  for (long long g = 1; g <= 500; ++g) {
    long long cur = admission_count(100, g);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("select_pseudo_labels drops overlapping candidates") {
  std::vector<Candidate> cands{make_cand(10, 10, 5, 0.9, 2.0),
                               make_cand(12, 12, 5, 0.8, 3.0)};
  PointSet existing;
  existing.points = {{10, 10}, {12, 13}};
  PointSet out = select_pseudo_labels(cands, existing, 8.0, 2, 2);
  CHECK(out.empty());
}

TEST_CASE("select_pseudo_labels admits everything when n_gt = 0") {
  std::vector<Candidate> cands{make_cand(10, 10, 5, 0.9, 2.0),
                               make_cand(40, 40, 9, 0.8, 9.0),
                               make_cand(70, 70, 7, 0.7, 5.0)};
  PointSet existing;
  PointSet out = select_pseudo_labels(cands, existing, 8.0, 3, 0);
  REQUIRE(out.size() == 3);
  // ascending training difficulty: candidate 0 is easiest, 1 is hardest
  CHECK(out.points[0] == Point{10, 10});
  CHECK(out.points[2] == Point{40, 40});
}

TEST_CASE("select_pseudo_labels takes the lowest-TD prefix") {
  auto gen = testutil::rng(5);
  std::vector<Candidate> cands = random_candidates(gen, 10);
  PointSet existing;  // admission_count(10, 9) = floor(10*exp(-0.9)) = 4
  PointSet out = select_pseudo_labels(cands, existing, 8.0, 10, 9);
  REQUIRE(out.size() == 4);

  // independent sort-and-take oracle with the same tie rule
  auto td = training_difficulty(cands);
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (td[a] != td[b]) return td[a] < td[b];
    if (cands[a].centroid_row != cands[b].centroid_row)
      return cands[a].centroid_row < cands[b].centroid_row;
    return cands[a].centroid_col < cands[b].centroid_col;
  });
  for (int i = 0; i < 4; ++i) {
    const Candidate& c = cands[order[i]];
    CHECK(out.points[i] == Point{static_cast<int>(std::floor(c.centroid_row + 0.5)),
                                 static_cast<int>(std::floor(c.centroid_col + 0.5))});
  }
}

TEST_CASE("selection is invariant to scaling areas or distances") {
  auto gen = testutil::rng(17);
  std::uniform_real_distribution<double> scale_dist(0.01, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Candidate> cands = random_candidates(gen, 12);
    PointSet existing;
    existing.points = {{50, 50}};
    PointSet base = select_pseudo_labels(cands, existing, 6.0, 12, 5);

    double s = scale_dist(gen);
    std::vector<Candidate> scaled_dist = cands;
    for (Candidate& c : scaled_dist) c.mean_knn_dist *= s;
    CHECK(select_pseudo_labels(scaled_dist, existing, 6.0, 12, 5).points == base.points);

    // areas are integers; scale by a positive integer factor
    std::vector<Candidate> scaled_area = cands;
    for (Candidate& c : scaled_area) c.area *= 7;
    CHECK(select_pseudo_labels(scaled_area, existing, 6.0, 12, 5).points == base.points);
  }
}

TEST_CASE("selected points never fall within existing_radius of a label") {
  auto gen = testutil::rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Candidate> cands = random_candidates(gen, 15);
    PointSet existing = testutil::random_points(gen, 100, 100, 6);
    PointSet out = select_pseudo_labels(cands, existing, 8.0, 15, 6);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (const Point& e : existing.points) {
        double dr = out.points[i].row - e.row, dc = out.points[i].col - e.col;
        CHECK(std::sqrt(dr * dr + dc * dc) > 8.0);
      }
    }
  }
}

TEST_CASE("re-selection after merging admits no more points") {
  auto gen = testutil::rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Candidate> cands = random_candidates(gen, 15);
    PointSet existing = testutil::random_points(gen, 100, 100, 4);
    PointSet first = select_pseudo_labels(cands, existing, 8.0, 15,
                                          static_cast<long long>(existing.size()));
    PointSet merged = existing;
    for (const Point& p : first.points) {
      bool dup = false;
      for (const Point& q : merged.points) dup = dup || q == p;
      if (!dup) merged.points.push_back(p);
    }
    PointSet second = select_pseudo_labels(cands, merged, 8.0, 15,
                                           static_cast<long long>(merged.size()));
    CHECK(second.size() <= first.size());
  }
}
