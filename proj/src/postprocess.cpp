#include "bonus/postprocess.hpp"

#include <algorithm>
#include <vector>

namespace bonus {

namespace {

void check_same_shape(const RasterF32& a, const RasterF32& b, const char* what) {
  if (!a.same_shape(b.height, b.width))
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

RasterF32 subtract_clamp01(const RasterF32& seg, const RasterF32& boundary) {
  check_same_shape(seg, boundary, "subtract_clamp01");
  RasterF32 out(seg.height, seg.width);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seg.size()); ++i)
    out.values[i] = std::clamp(seg.values[i] - boundary.values[i], 0.0f, 1.0f);
  return out;
}

RasterF32 binarize(const RasterF32& x, double threshold) {
  RasterF32 out(x.height, x.width);
  const float t = static_cast<float>(threshold);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i)
    out.values[i] = x.values[i] > t ? 1.0f : 0.0f;
  return out;
}

RasterF32 fill_holes(const RasterF32& mask, long long max_area, int connectivity) {
  // holes are traced with the complement connectivity of the foreground
  const int hole_conn = connectivity == 8 ? 4 : 8;
  RasterF32 inverted(mask.height, mask.width);
  for (std::size_t i = 0; i < mask.size(); ++i)
    inverted.values[i] = mask.values[i] > 0.5f ? 0.0f : 1.0f;
  InstanceMap bg = connected_components(inverted, hole_conn);

  int32_t max_id = bg.max_id();
  std::vector<long long> area(static_cast<std::size_t>(max_id) + 1, 0);
  std::vector<char> touches_border(static_cast<std::size_t>(max_id) + 1, 0);
  for (int r = 0; r < bg.height; ++r) {
    for (int c = 0; c < bg.width; ++c) {
      int32_t id = bg.at(r, c);
      if (id == 0) continue;
      area[id] += 1;
      if (r == 0 || c == 0 || r == bg.height - 1 || c == bg.width - 1)
        touches_border[id] = 1;
    }
  }

  RasterF32 out = mask;
  for (std::size_t i = 0; i < out.size(); ++i) {
    int32_t id = bg.ids[i];
    if (id != 0 && !touches_border[id] && area[id] < max_area) out.values[i] = 1.0f;
  }
  return out;
}

RasterF32 remove_small(const RasterF32& mask, long long min_area, int connectivity) {
  InstanceMap comp = connected_components(mask, connectivity);
  int32_t max_id = comp.max_id();
  std::vector<long long> area(static_cast<std::size_t>(max_id) + 1, 0);
  for (int32_t id : comp.ids)
    if (id > 0) area[id] += 1;

  RasterF32 out = mask;
  for (std::size_t i = 0; i < out.size(); ++i) {
    int32_t id = comp.ids[i];
    if (id != 0 && area[id] < min_area) out.values[i] = 0.0f;
  }
  return out;
}

InstanceMap dilate_disk1(const InstanceMap& inst) {
  InstanceMap out = inst;
  const int h = inst.height, w = inst.width;
  static constexpr int dr[4] = {-1, 1, 0, 0};
  static constexpr int dc[4] = {0, 0, -1, 1};
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (inst.at(r, c) != 0) continue;  // only background pixels are claimed
      int32_t claim = 0;
      for (int d = 0; d < 4; ++d) {
        int nr = r + dr[d], nc = c + dc[d];
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        int32_t id = inst.at(nr, nc);
        if (id != 0 && (claim == 0 || id < claim)) claim = id;  // lower id wins
      }
      if (claim != 0) out.at(r, c) = claim;
    }
  }
  return out;
}

InstanceMap instance_postprocess(const RasterF32& seg, const RasterF32& boundary,
                                 const PipelineConfig& cfg) {
  check_same_shape(seg, boundary, "instance_postprocess");
  RasterF32 diff = subtract_clamp01(seg, boundary);
  RasterF32 binary = binarize(diff, cfg.bin_threshold);
  RasterF32 filled = fill_holes(binary, cfg.hole_fill_area, cfg.connectivity);
  RasterF32 cleaned = remove_small(filled, cfg.min_object_area, cfg.connectivity);
  InstanceMap labeled = connected_components(cleaned, cfg.connectivity);
  return dilate_disk1(labeled);
}

}  // namespace bonus
