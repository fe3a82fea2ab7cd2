// Benchmark of the OpenMP kernels against the serial reference, with a
// bit-identity check on every result pair.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bonus/affinity.hpp"
#include "bonus/heatmap.hpp"
#include "bonus/raster.hpp"
#include "bonus/reference.hpp"

using namespace bonus;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool bits_equal(const RasterF32& a, const RasterF32& b) {
  return a.height == b.height && a.width == b.width &&
         std::memcmp(a.values.data(), b.values.data(), a.size() * 4) == 0;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> coord(0, 511);

  bool all_ok = true;

  {  // distance transform, 512x512 with 600 points
    PointSet pts;
    std::vector<char> used(512 * 512, 0);
    while (pts.size() < 600) {
      int r = coord(gen), c = coord(gen);
      if (!used[r * 512 + c]) {
        used[r * 512 + c] = 1;
        pts.points.push_back({r, c});
      }
    }
    auto t0 = clock_type::now();
    RasterF32 ser = reference::distance_to_nearest_point(pts, 512, 512);
    double ts = seconds_since(t0);
    t0 = clock_type::now();
    RasterF32 par = distance_to_nearest_point(pts, 512, 512);
    double tp = seconds_since(t0);
    bool ok = bits_equal(ser, par);
    all_ok = all_ok && ok;
    report("distance_to_nearest_point", ts, tp, ok);

    t0 = clock_type::now();
    HeatmapTarget hs = reference::gaussian_heatmap(pts, 512, 512, 4.0, 8.0, 15.0);
    ts = seconds_since(t0);
    t0 = clock_type::now();
    HeatmapTarget hp = gaussian_heatmap(pts, 512, 512, 4.0, 8.0, 15.0);
    tp = seconds_since(t0);
    ok = bits_equal(hs, hp);
    all_ok = all_ok && ok;
    report("gaussian_heatmap", ts, tp, ok);
  }

  {  // affinity pipeline, 224x224 at gamma 8
    RasterF32 prob(224, 224);
    for (float& v : prob.values) v = static_cast<float>(unit(gen));
    CoarseInstancePrediction coarse = make_coarse_prediction(prob, 0.6, 0.05, 8);
    std::vector<Offset> offsets = half_disk_offsets(8.0);

    auto t0 = clock_type::now();
    std::vector<AffinityPair> ser_pairs = reference::build_affinity_pairs(coarse, offsets);
    double ts = seconds_since(t0);
    t0 = clock_type::now();
    std::vector<AffinityPair> par_pairs = build_affinity_pairs(coarse, offsets);
    double tp = seconds_since(t0);
    bool ok = ser_pairs.size() == par_pairs.size() &&
              std::memcmp(ser_pairs.data(), par_pairs.data(),
                          ser_pairs.size() * sizeof(AffinityPair)) == 0;
    all_ok = all_ok && ok;
    report("build_affinity_pairs", ts, tp, ok);
    std::printf("%-28s %zu pairs, %zu offsets\n", "", par_pairs.size(), offsets.size());

    RasterF32 boundary(224, 224);
    for (float& v : boundary.values) v = static_cast<float>(unit(gen));
    t0 = clock_type::now();
    BoundaryLossResult ser_loss = reference::boundary_loss(boundary, ser_pairs, 1e-7);
    ts = seconds_since(t0);
    t0 = clock_type::now();
    BoundaryLossResult par_loss = boundary_loss(boundary, par_pairs, 1e-7);
    tp = seconds_since(t0);
    ok = ser_loss.loss == par_loss.loss && bits_equal(ser_loss.grad, par_loss.grad);
    all_ok = all_ok && ok;
    report("boundary_loss", ts, tp, ok);
  }

  if (!all_ok) {
    std::printf("FAILURE: parallel results diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
