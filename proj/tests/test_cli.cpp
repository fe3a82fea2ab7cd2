#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "bonus/io.hpp"
#include "bonus/raster.hpp"

// Exercises the CLI surface through the real binary (path from BONUS_CLI,
// set by ctest). Skipped when the binary is not available.

using namespace bonus;

namespace {

struct Cli {
  std::string bin;
  std::string dir;

  bool available() const { return !bin.empty() && std::ifstream(bin).good(); }

  std::string run(const std::string& args) const {
    std::string out = dir + "/stdout.txt";
    std::string cmd = bin + " " + args + " > " + out + " 2> " + dir + "/stderr.txt";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::ifstream in(out);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
};

Cli make_cli() {
  Cli cli;
  const char* env = std::getenv("BONUS_CLI");
  if (env && *env) cli.bin = env;
  char tmpl[] = "/tmp/bonus_cli_XXXXXX";
  cli.dir = mkdtemp(tmpl);
  return cli;
}

}  // namespace

TEST_CASE("cli: heatmap then peaks round-trips well-separated points") {
  Cli cli = make_cli();
  if (!cli.available()) {
    MESSAGE("BONUS_CLI not set; skipping CLI surface test");
    return;
  }
  PointSet pts;
  pts.points = {{12, 12}, {12, 52}, {52, 12}, {52, 52}};
  write_points_csv(cli.dir + "/pts.csv", pts);
  cli.run("heatmap --points " + cli.dir + "/pts.csv --height 64 --width 64 --out " +
          cli.dir + "/t.bonu");
  cli.run("peaks --pred " + cli.dir + "/t.bonu --peak_threshold 0.1 --out " + cli.dir +
          "/back.csv");
  PointSet back = read_points_csv(cli.dir + "/back.csv", 64, 64);
  REQUIRE(back.size() == pts.size());
  auto lt = [](const Point& a, const Point& b) { return row_major_less(a, b); };
  std::sort(back.points.begin(), back.points.end(), lt);
  std::sort(pts.points.begin(), pts.points.end(), lt);
  CHECK(back.points == pts.points);
}

TEST_CASE("cli: eval on identical instance maps reports perfect scores") {
  Cli cli = make_cli();
  if (!cli.available()) {
    MESSAGE("BONUS_CLI not set; skipping CLI surface test");
    return;
  }
  InstanceMap inst(20, 20, 0);
  for (int r = 2; r < 8; ++r)
    for (int c = 2; c < 8; ++c) inst.at(r, c) = 1;
  for (int r = 12; r < 18; ++r)
    for (int c = 12; c < 18; ++c) inst.at(r, c) = 2;
  write_instance_map(cli.dir + "/i.png", inst);
  auto j = nlohmann::json::parse(
      cli.run("eval --pred " + cli.dir + "/i.png --gt " + cli.dir + "/i.png"));
  CHECK(j["aji"].get<double>() == 1.0);
  CHECK(j["pq"].get<double>() == 1.0);
  CHECK(j["object_dice"].get<double>() == 1.0);
  CHECK(j["accuracy"].get<double>() == 1.0);
  CHECK(j.contains("config"));
}
