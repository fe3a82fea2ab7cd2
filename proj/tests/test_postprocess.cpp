#include <doctest.h>

#include <map>
#include <set>

#include "bonus/postprocess.hpp"
#include "test_util.hpp"

using namespace bonus;

namespace {

PipelineConfig default_cfg() {
  PipelineConfig cfg;
  cfg.validate();
  return cfg;
}

// steps 1-5 composed from the public pieces (no dilation)
InstanceMap labeled_before_dilation(const RasterF32& seg, const RasterF32& boundary,
                                    const PipelineConfig& cfg) {
  RasterF32 diff = subtract_clamp01(seg, boundary);
  RasterF32 binary = binarize(diff, cfg.bin_threshold);
  RasterF32 filled = fill_holes(binary, cfg.hole_fill_area, cfg.connectivity);
  RasterF32 cleaned = remove_small(filled, cfg.min_object_area, cfg.connectivity);
  return connected_components(cleaned, cfg.connectivity);
}

}  // namespace

TEST_CASE("instance_postprocess on an empty segmentation") {
  RasterF32 seg(16, 16, 0.0f), boundary(16, 16, 0.0f);
  InstanceMap out = instance_postprocess(seg, boundary, default_cfg());
  CHECK(out.max_id() == 0);
  RasterF32 bad(8, 16, 0.0f);
  CHECK_THROWS_AS(instance_postprocess(bad, boundary, default_cfg()), std::invalid_argument);
}

TEST_CASE("a boundary line splits a blob into two instances") {
  RasterF32 seg(14, 14, 0.0f), boundary(14, 14, 0.0f);
  for (int r = 2; r < 12; ++r)
    for (int c = 2; c < 12; ++c) seg.at(r, c) = 1.0f;
  for (int c = 0; c < 14; ++c) boundary.at(7, c) = 1.0f;
  InstanceMap out = instance_postprocess(seg, boundary, default_cfg());
  // traced by hand: halves of 50 and 40 px survive the area floor, dilation
  // re-claims the boundary row without merging (contested pixels go to the
  // lower id)
  CHECK(out.max_id() == 2);
  CHECK(out.at(3, 5) == 1);
  CHECK(out.at(10, 5) == 2);
}

TEST_CASE("objects below the area floor are removed") {
  RasterF32 seg(10, 10, 0.0f), boundary(10, 10, 0.0f);
  seg.at(4, 4) = seg.at(4, 5) = 1.0f;  // 2 px < 20
  InstanceMap out = instance_postprocess(seg, boundary, default_cfg());
  CHECK(out.max_id() == 0);
}

TEST_CASE("fill_holes fills enclosed background below the area cap") {
  RasterF32 ring(7, 7, 0.0f);
  for (int r = 1; r <= 5; ++r)
    for (int c = 1; c <= 5; ++c) ring.at(r, c) = 1.0f;
  ring.at(3, 3) = 0.0f;
  RasterF32 filled = fill_holes(ring, 4, 8);
  CHECK(filled.at(3, 3) == 1.0f);  // flood fill from the border never reaches it
  // a solid square is untouched
  RasterF32 solid(5, 5, 1.0f);
  RasterF32 out = fill_holes(solid, 100, 8);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.values[i] == solid.values[i]);
}

TEST_CASE("fill_holes leaves large holes and border bays alone") {
  RasterF32 mask(8, 8, 1.0f);
  for (int r = 2; r <= 5; ++r)
    for (int c = 2; c <= 5; ++c) mask.at(r, c) = 0.0f;  // 16-px hole
  RasterF32 out = fill_holes(mask, 10, 8);
  CHECK(out.at(3, 3) == 0.0f);
  // bay open to the border is not a hole
  RasterF32 bay(6, 6, 1.0f);
  bay.at(0, 3) = bay.at(1, 3) = 0.0f;
  out = fill_holes(bay, 10, 8);
  CHECK(out.at(0, 3) == 0.0f);
  CHECK(out.at(1, 3) == 0.0f);
}

TEST_CASE("remove_small clears components under the minimum area") {
  RasterF32 mask(8, 8, 0.0f);
  mask.at(1, 1) = 1.0f;
  for (int r = 4; r < 7; ++r)
    for (int c = 4; c < 7; ++c) mask.at(r, c) = 1.0f;
  RasterF32 out = remove_small(mask, 5, 8);
  CHECK(out.at(1, 1) == 0.0f);
  CHECK(out.at(5, 5) == 1.0f);
}

TEST_CASE("dilate_disk1 grows a point into a plus shape") {
  InstanceMap inst(5, 5, 0);
  inst.at(2, 2) = 1;
  InstanceMap out = dilate_disk1(inst);
  std::set<std::pair<int, int>> expect{{2, 2}, {1, 2}, {3, 2}, {2, 1}, {2, 3}};
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      CHECK((out.at(r, c) == 1) == (expect.count({r, c}) > 0));
}

TEST_CASE("dilate_disk1 resolves collisions to the lower id and keeps ids") {
  InstanceMap inst(3, 5, 0);
  inst.at(1, 1) = 2;
  inst.at(1, 3) = 1;
  InstanceMap out = dilate_disk1(inst);
  CHECK(out.at(1, 2) == 1);  // contested between 1 and 2
  CHECK(out.at(1, 1) == 2);  // original pixels never change id
  CHECK(out.at(1, 3) == 1);
}

TEST_CASE("dilation only claims background pixels") {
  auto gen = testutil::rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    RasterF32 mask = testutil::random_raster(gen, 20, 20);
    for (float& v : mask.values) v = v > 0.7f ? 1.0f : 0.0f;
    InstanceMap inst = connected_components(mask, 8);
    InstanceMap out = dilate_disk1(inst);
    for (std::size_t i = 0; i < inst.size(); ++i)
      if (inst.ids[i] != 0) CHECK(out.ids[i] == inst.ids[i]);
  }
}

TEST_CASE("instance_postprocess is deterministic") {
  auto gen = testutil::rng(103);
  RasterF32 seg = testutil::random_raster(gen, 32, 32);
  RasterF32 boundary = testutil::random_raster(gen, 32, 32, 0.0, 0.4);
  PipelineConfig cfg = default_cfg();
  cfg.min_object_area = 4;
  cfg.hole_fill_area = 4;
  InstanceMap a = instance_postprocess(seg, boundary, cfg);
  InstanceMap b = instance_postprocess(seg, boundary, cfg);
  CHECK(a.ids == b.ids);
}

TEST_CASE("every instance meets the area floor before dilation") {
  auto gen = testutil::rng(107);
  PipelineConfig cfg = default_cfg();
  cfg.min_object_area = 6;
  cfg.hole_fill_area = 6;
  for (int trial = 0; trial < 10; ++trial) {
    RasterF32 seg = testutil::random_raster(gen, 24, 24);
    RasterF32 boundary = testutil::random_raster(gen, 24, 24, 0.0, 0.3);
    InstanceMap lab = labeled_before_dilation(seg, boundary, cfg);
    RasterF32 dummy(24, 24, 0.0f);
    for (const auto& s : component_stats(lab, dummy)) CHECK(s.area >= 6);
  }
}

TEST_CASE("stronger boundaries never merge instances") {
  auto gen = testutil::rng(109);
  PipelineConfig cfg = default_cfg();
  cfg.min_object_area = 4;
  cfg.hole_fill_area = 4;
  for (int trial = 0; trial < 10; ++trial) {
    RasterF32 seg = testutil::random_raster(gen, 28, 28);
    RasterF32 b1 = testutil::random_raster(gen, 28, 28, 0.0, 0.3);
    RasterF32 b2 = b1;
    RasterF32 extra = testutil::random_raster(gen, 28, 28, 0.0, 0.4);
    for (std::size_t i = 0; i < b2.size(); ++i) b2.values[i] += extra.values[i];
    InstanceMap lab1 = labeled_before_dilation(seg, b1, cfg);
    InstanceMap lab2 = labeled_before_dilation(seg, b2, cfg);
    // each instance under the stronger boundary nests inside exactly one
    // original instance
    std::map<int32_t, std::set<int32_t>> parents;
    for (std::size_t i = 0; i < lab2.size(); ++i)
      if (lab2.ids[i] != 0) {
        CHECK(lab1.ids[i] != 0);
        parents[lab2.ids[i]].insert(lab1.ids[i]);
      }
    for (const auto& [id, ps] : parents) CHECK(ps.size() == 1);
  }
}
