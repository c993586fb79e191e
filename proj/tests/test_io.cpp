#include <doctest.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <random>

#include "exreg/csv.hpp"
#include "exreg/experiment.hpp"
#include "exreg/svg.hpp"

using namespace exreg;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "exreg_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips arbitrary doubles") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    const std::string s = format_double(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(back == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("locations, observations and matrix CSV round trips") {
  const fs::path dir = temp_dir();
  std::vector<Location> locs{{-1.25, 0.5}, {0.1, 2.0}, {3.0, -4.75}};
  write_locations_csv(dir / "loc.csv", locs);
  const auto back = read_locations_csv(dir / "loc.csv");
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].x == locs[i].x);
    CHECK(back[i].y == locs[i].y);
  }

  ObservationSet obs;
  obs.locations = locs;
  obs.margins = Margins::unit_frechet;
  obs.data.resize(2, 3);
  obs.data << 0.31, 2.25e8, 1.0, 7.5, 0.001, 42.0;
  write_observations_csv(dir / "obs.csv", obs);
  const ObservationSet obs2 = read_observations_csv(dir / "obs.csv", locs, Margins::unit_frechet);
  CHECK((obs2.data - obs.data).cwiseAbs().maxCoeff() == 0.0);
  CHECK(obs2.margins == Margins::unit_frechet);

  Eigen::MatrixXd m(2, 2);
  m << 0.0, 0.123456789012345, 0.123456789012345, 0.0;
  write_square_matrix_csv(dir / "m.csv", m, {0, 1});
  std::vector<int> ids;
  const Eigen::MatrixXd m2 = read_square_matrix_csv(dir / "m.csv", &ids);
  CHECK(ids == std::vector<int>({0, 1}));
  CHECK((m2 - m).cwiseAbs().maxCoeff() == 0.0);

  Clustering c;
  c.labels = {1, 2, 0};
  c.k = 2;
  write_labels_csv(dir / "labels.csv", c);
  const Clustering c2 = read_labels_csv(dir / "labels.csv");
  CHECK(c2.labels == c.labels);
  CHECK(c2.k == 2);
}

TEST_CASE("config parsing, defaults and errors") {
  const auto kv = parse_config_text(
      "# comment\n"
      "preset = example2\n"
      "resolution = 1.0\n"
      "observations = 40\n"
      "clusters = 3\n"
      "globals = 3:0.7, 5:1.0\n"
      "seed = 42\n"
      "out = /tmp/exreg_cfg\n");
  const ExperimentConfig cfg = config_from_map(kv);
  CHECK(cfg.preset == FieldPreset::example2);
  CHECK(cfg.grid.resolution == 1.0);
  CHECK(cfg.observations == 40);
  REQUIRE(cfg.globals.size() == 2);
  CHECK(cfg.globals[0].nu == 3.0);
  CHECK(cfg.globals[0].alpha == 0.7);
  CHECK(cfg.globals[1].nu == 5.0);
  CHECK(*cfg.seed == 42u);
  CHECK(cfg.linkage == Linkage::average);
  CHECK_FALSE(cfg.pair_max_distance.has_value());

  auto bad = kv;
  bad["preset"] = "example9";
  CHECK_THROWS_AS(config_from_map(bad), std::exception);

  auto unknown = kv;
  unknown["presett"] = "example1";
  CHECK_THROWS_WITH_AS(config_from_map(unknown), doctest::Contains("unknown key 'presett'"),
                       ConfigError);

  auto noseed = kv;
  noseed.erase("seed");
  CHECK_THROWS_WITH_AS(config_from_map(noseed), doctest::Contains("seed"), ConfigError);

  auto badnum = kv;
  badnum["resolution"] = "fast";
  CHECK_THROWS_WITH_AS(config_from_map(badnum), doctest::Contains("resolution"), ConfigError);
}

TEST_CASE("heatmap svg output") {
  std::vector<Location> grid{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  SUBCASE("two-color checker") {
    const std::string svg = render_heatmap_svg(grid, {0.0, 1.0, 1.0, 0.0});
    // Four cells plus legend rectangles.
    std::size_t rects = 0, pos = 0;
    while ((pos = svg.find("<rect", pos)) != std::string::npos) {
      ++rects;
      ++pos;
    }
    CHECK(rects >= 4);
    CHECK(svg.find("#153c6b") != std::string::npos);  // low color
    CHECK(svg.find("#cfe5f5") != std::string::npos);  // high color
    CHECK(svg.find("</svg>") != std::string::npos);
  }
  SUBCASE("constant field maps to a single color with one legend value") {
    const std::string svg = render_heatmap_svg(grid, {2.5, 2.5, 2.5, 2.5});
    CHECK(svg.find(">2.5</text>") != std::string::npos);
    // All four cell fills identical (the low end of the ramp).
    std::size_t count = 0, pos = 0;
    while ((pos = svg.find("fill=\"#153c6b\"", pos)) != std::string::npos) {
      ++count;
      ++pos;
    }
    CHECK(count >= 4);
  }
  SUBCASE("non-grid layouts are rejected") {
    const std::vector<Location> ragged{{0, 0}, {1, 0}, {0.5, 1}};
    CHECK_THROWS_AS(render_heatmap_svg(ragged, {1, 2, 3}), UnsupportedLayoutError);
  }
  SUBCASE("winner-style fractions render distinct colors") {
    const std::string svg =
        render_heatmap_svg(grid, {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
    CHECK(svg.find("</svg>") != std::string::npos);
  }
}

TEST_CASE("fnv64 digest is stable and content sensitive") {
  const auto h1 = fnv1a64("abc");
  const auto h2 = fnv1a64("abd");
  CHECK(h1 == fnv1a64("abc"));
  CHECK(h1 != h2);
}
