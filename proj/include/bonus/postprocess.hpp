#pragma once

#include "bonus/config.hpp"
#include "bonus/raster.hpp"

namespace bonus {

// pointwise clamp(seg - boundary, 0, 1)
RasterF32 subtract_clamp01(const RasterF32& seg, const RasterF32& boundary);

// 1 where x > threshold, else 0
RasterF32 binarize(const RasterF32& x, double threshold);

// Fill background components not touching the raster border whose area is
// below max_area. Holes are traced with the complement connectivity of the
// foreground (8-connected foreground -> 4-connected holes).
RasterF32 fill_holes(const RasterF32& mask, long long max_area, int connectivity = 8);

// Clear foreground components whose area is below min_area.
RasterF32 remove_small(const RasterF32& mask, long long min_area, int connectivity = 8);

// Dilate every instance by the radius-1 lattice disk (the 4-neighborhood
// cross). Only background pixels are claimed; contested pixels go to the
// lower id.
InstanceMap dilate_disk1(const InstanceMap& inst);

// Full inference post-processing:
//   1. clamp(seg - boundary, 0, 1)
//   2. binarize at cfg.bin_threshold
//   3. fill holes with area < cfg.hole_fill_area
//   4. remove components with area < cfg.min_object_area
//   5. connected components with cfg.connectivity
//   6. dilate each component by the radius-1 disk
InstanceMap instance_postprocess(const RasterF32& seg, const RasterF32& boundary,
                                 const PipelineConfig& cfg);

}  // namespace bonus
