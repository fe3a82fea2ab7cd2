#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "bonus/io.hpp"
#include "test_util.hpp"

using namespace bonus;

namespace {

struct TempDir {
  std::string path;
  TempDir() {
    char tmpl[] = "/tmp/bonus_io_XXXXXX";
    path = mkdtemp(tmpl);
  }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("raster f32 round trip is bitwise exact") {
  TempDir dir;
  auto gen = testutil::rng(201);
  RasterF32 r = testutil::random_raster(gen, 13, 17, -1.0, 1.0);
  r.values[5] = -1.0f;  // sentinel
  std::string path = dir.file("r.bonu");
  write_raster_f32(path, r);
  RasterF32 back = read_raster_f32(path);
  REQUIRE(back.same_shape(13, 17));
  CHECK(std::memcmp(back.values.data(), r.values.data(), r.size() * 4) == 0);
  // and the file itself is byte-stable across writes
  std::string first = slurp(path);
  write_raster_f32(path, r);
  CHECK(slurp(path) == first);
}

TEST_CASE("raster u16 and trimask round trips") {
  TempDir dir;
  InstanceMap inst(4, 5, 0);
  inst.at(0, 0) = 1;
  inst.at(3, 4) = 65534;
  std::string path = dir.file("i.bonu");
  write_raster_u16(path, inst);
  CHECK(read_raster_u16(path).ids == inst.ids);

  inst.at(1, 1) = 70000;
  CHECK_THROWS_AS(write_raster_u16(dir.file("bad.bonu"), inst), std::runtime_error);

  TriMask m(3, 3, TriMask::kIgnore);
  m.at(0, 0) = 7;
  m.at(1, 1) = TriMask::kBackground;
  std::string mpath = dir.file("m.bonu");
  write_trimask(mpath, m);
  CHECK(read_trimask(mpath).tags == m.tags);
}

TEST_CASE("raster reader reports structural errors") {
  TempDir dir;
  std::string path = dir.file("x.bonu");
  std::ofstream(path, std::ios::binary) << "NOPE";
  CHECK_THROWS_WITH_AS(read_raster_f32(path), doctest::Contains("bad magic"),
                       std::runtime_error);

  RasterF32 r(2, 2, 0.5f);
  write_raster_f32(path, r);
  std::string bytes = slurp(path);
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  CHECK_THROWS_WITH_AS(read_raster_f32(path), doctest::Contains("payload size mismatch"),
                       std::runtime_error);
}

TEST_CASE("instance PNG round trip") {
  TempDir dir;
  InstanceMap inst(9, 7, 0);
  inst.at(0, 0) = 3;
  inst.at(4, 4) = 999;
  inst.at(8, 6) = 65535;
  std::string path = dir.file("i.png");
  write_instance_map(path, inst);  // .png routes to the PNG codec
  InstanceMap back = read_instance_map(path);
  REQUIRE(back.height == 9);
  REQUIRE(back.width == 7);
  CHECK(back.ids == inst.ids);
}

TEST_CASE("image PNG round trip") {
  TempDir dir;
  ImageRGB img(6, 8);
  auto gen = testutil::rng(203);
  std::uniform_int_distribution<int> byte(0, 255);
  for (std::uint8_t& v : img.rgb) v = static_cast<std::uint8_t>(byte(gen));
  std::string path = dir.file("img.png");
  write_image_png(path, img);
  ImageRGB back = read_image_png(path);
  REQUIRE(back.height == 6);
  REQUIRE(back.width == 8);
  CHECK(back.rgb == img.rgb);
}

TEST_CASE("points CSV round trip and diagnostics") {
  TempDir dir;
  PointSet pts;
  pts.points = {{0, 0}, {5, 7}, {2, 3}};
  pts.scores = {0.5f, 0.25f, 1.0f};
  std::string path = dir.file("p.csv");
  write_points_csv(path, pts);
  PointSet back = read_points_csv(path, 10, 10);
  CHECK(back.points == pts.points);
  CHECK(back.scores == pts.scores);

  std::ofstream(dir.file("h.csv")) << "x,y\n1,2\n";
  CHECK_THROWS_WITH_AS(read_points_csv(dir.file("h.csv")), doctest::Contains("line 1"),
                       std::runtime_error);
  std::ofstream(dir.file("i.csv")) << "row,col\n1,2\n3,zap\n";
  CHECK_THROWS_WITH_AS(read_points_csv(dir.file("i.csv")), doctest::Contains("line 3"),
                       std::runtime_error);
  std::ofstream(dir.file("d.csv")) << "row,col\n1,2\n1,2\n";
  CHECK_THROWS_WITH_AS(read_points_csv(dir.file("d.csv")), doctest::Contains("duplicate"),
                       std::runtime_error);
  std::ofstream(dir.file("o.csv")) << "row,col\n1,22\n";
  CHECK_THROWS_WITH_AS(read_points_csv(dir.file("o.csv"), 10, 10),
                       doctest::Contains("out of bounds"), std::runtime_error);
}

TEST_CASE("pairs file round trip") {
  TempDir dir;
  std::vector<AffinityPair> pairs{
      {0, 0, 0, 1, 1, AffinitySubset::FgPos},
      {2, 3, 4, 1, 0, AffinitySubset::CrossNeg},
      {5, 5, 7, 7, 0, AffinitySubset::FgNeg},
  };
  std::string path = dir.file("p.bonp");
  write_pairs(path, pairs, 16, 16);
  PairsFile back = read_pairs(path);
  CHECK(back.height == 16);
  CHECK(back.width == 16);
  REQUIRE(back.pairs.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(back.pairs[i].a() == pairs[i].a());
    CHECK(back.pairs[i].b() == pairs[i].b());
    CHECK(back.pairs[i].label == pairs[i].label);
    CHECK(back.pairs[i].subset == pairs[i].subset);
  }

  std::string bytes = slurp(path);
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 1);
  CHECK_THROWS_WITH_AS(read_pairs(path), doctest::Contains("payload size mismatch"),
                       std::runtime_error);

  // a positive subset with a negative label is corrupt
  std::vector<AffinityPair> bad{{0, 0, 0, 1, 0, AffinitySubset::FgPos}};
  std::string bad_path = dir.file("bad.bonp");
  write_pairs(bad_path, bad, 4, 4);
  CHECK_THROWS_WITH_AS(read_pairs(bad_path), doctest::Contains("contradicts"),
                       std::runtime_error);
}
