#include "bonus/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bonus {

std::vector<double> normalize_unit(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("normalize_unit: empty sequence");
  auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  double mn = *mn_it, mx = *mx_it;
  std::vector<double> out(values.size(), 0.0);
  if (mx > mn) {
    double inv = 1.0 / (mx - mn);
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mn) * inv;
  }
  return out;
}

std::vector<double> training_difficulty(std::span<const Candidate> cands) {
  if (cands.empty()) return {};
  std::vector<double> dist(cands.size()), area(cands.size()), score(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    dist[i] = cands[i].mean_knn_dist;
    area[i] = static_cast<double>(cands[i].area);
    score[i] = cands[i].mean_score;
  }
  std::vector<double> nd = normalize_unit(dist);
  std::vector<double> na = normalize_unit(area);
  std::vector<double> ns = normalize_unit(score);
  std::vector<double> td(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) td[i] = nd[i] * na[i] * (1.0 - ns[i]);
  return td;
}

long long admission_count(long long n_det, long long n_gt) {
  if (n_det < 0 || n_gt < 0) throw std::invalid_argument("admission_count: negative count");
  if (n_det == 0) return 0;
  double ratio = static_cast<double>(n_gt) / static_cast<double>(n_det);
  return static_cast<long long>(std::floor(static_cast<double>(n_det) * std::exp(-ratio)));
}

std::vector<Candidate> candidates_from_components(std::span<const ComponentStats> stats,
                                                  const PointSet& existing,
                                                  int k_neighbors) {
  if (k_neighbors < 1) throw std::invalid_argument("k_neighbors must be >= 1");
  std::vector<Candidate> out;
  out.reserve(stats.size());
  std::vector<double> dists;
  for (const ComponentStats& s : stats) {
    Candidate c;
    c.centroid_row = s.centroid_row;
    c.centroid_col = s.centroid_col;
    c.area = s.area;
    c.mean_score = s.mean_score;
    if (!existing.empty()) {
      dists.clear();
      for (const Point& p : existing.points) {
        double dr = s.centroid_row - p.row, dc = s.centroid_col - p.col;
        dists.push_back(std::sqrt(dr * dr + dc * dc));
      }
      std::size_t k = std::min<std::size_t>(k_neighbors, dists.size());
      std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
      c.mean_knn_dist = std::accumulate(dists.begin(), dists.begin() + k, 0.0) /
                        static_cast<double>(k);
    }
    out.push_back(c);
  }
  return out;
}

PointSet select_pseudo_labels(std::span<const Candidate> cands, const PointSet& existing,
                              double existing_radius, long long n_det, long long n_gt) {
  std::vector<double> td = training_difficulty(cands);

  // keep candidates clear of every existing label; overlap is measured on
  // the rounded centroid, i.e. the point that would actually be emitted
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    double row = std::floor(cands[i].centroid_row + 0.5);
    double col = std::floor(cands[i].centroid_col + 0.5);
    bool overlaps = false;
    for (const Point& p : existing.points) {
      double dr = row - p.row, dc = col - p.col;
      if (dr * dr + dc * dc <= existing_radius * existing_radius) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) keep.push_back(i);
  }

  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    if (td[a] != td[b]) return td[a] < td[b];
    if (cands[a].centroid_row != cands[b].centroid_row)
      return cands[a].centroid_row < cands[b].centroid_row;
    if (cands[a].centroid_col != cands[b].centroid_col)
      return cands[a].centroid_col < cands[b].centroid_col;
    return a < b;
  });

  long long admit = std::min<long long>(admission_count(n_det, n_gt),
                                        static_cast<long long>(keep.size()));
  PointSet out;
  for (long long i = 0; i < admit; ++i) {
    const Candidate& c = cands[keep[i]];
    out.points.push_back({static_cast<int>(std::floor(c.centroid_row + 0.5)),
                          static_cast<int>(std::floor(c.centroid_col + 0.5))});
    out.scores.push_back(static_cast<float>(c.mean_score));
  }
  return out;
}

}  // namespace bonus
