#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "music2d/scene.hpp"

using namespace music2d;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("preset gamma1-eps matches the reference parameters") {
  const auto config = preset_scene("gamma1-eps");
  CHECK(config.model == SceneModel::Thin);
  REQUIRE(config.curve.has_value());
  CHECK(config.curve->kind() == CurveKind::Gamma1);
  CHECK(config.eps == 5.0);
  CHECK(config.mu == 1.0);
  CHECK(config.h == 0.02);
  CHECK(config.lambda == 0.4);
  CHECK(config.directions == 24);
  CHECK(config.tau == 0.01);
  CHECK(config.cap == 1e6);
  CHECK(config.noise == 0.0);
  CHECK(config.effective_spacing() == 0.2);
  CHECK(config.omega() == doctest::Approx(15.70796).epsilon(1e-6));
}

TEST_CASE("preset gamma2-soft matches the reference parameters") {
  const auto config = preset_scene("gamma2-soft");
  CHECK(config.model == SceneModel::CrackSoft);
  REQUIRE(config.curve.has_value());
  CHECK(config.curve->kind() == CurveKind::Gamma2);
  CHECK(config.lambda == 0.4);
  CHECK(config.directions == 40);

  CHECK_THROWS_AS(preset_scene("nope"), ParseError);
}

TEST_CASE("parse_scene accepts documents and rejects bad keys") {
  const auto config = parse_scene(R"({"preset": "gamma1-eps", "nx": 64, "ny": 64})");
  CHECK(config.nx == 64);
  CHECK(config.eps == 5.0);

  CHECK_THROWS_AS(parse_scene("{}"), ParseError);
  CHECK_THROWS_AS(parse_scene("not json"), ParseError);

  try {
    parse_scene(R"({"preset": "gamma1-eps", "wavelenght": 0.4})");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.key() == "wavelenght");
  }

  try {
    parse_scene(R"({"preset": "gamma1-eps", "lambda": -1})");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.key() == "lambda");
  }

  CHECK_THROWS_AS(parse_scene(R"({"model": "thin", "lambda": 0.4})"), ParseError);
}

TEST_CASE("parse_scene geometry forms") {
  const auto line = parse_scene(
      R"({"model": "thin", "geometry": {"curve": "line", "from": [0, 0], "to": [1, 0]}})");
  REQUIRE(line.curve.has_value());
  CHECK(line.curve->kind() == CurveKind::Line);

  const auto small = parse_scene(
      R"({"model": "small",
          "geometry": {"inclusions": [
            {"center": [0.2, 0.1], "radius": 0.05, "eps": 5},
            {"center": [-0.4, 0.3], "radius": 0.05, "eps": 1, "mu": 5}]}})");
  REQUIRE(small.inclusions.size() == 2);
  CHECK(small.inclusions[1].tensor(0, 0) ==
        doctest::Approx(2 * small.inclusions[1].area * 4.0 / 6.0));

  // disk tensor must come from the final area regardless of key order
  const auto reordered = parse_scene(
      R"({"model": "small",
          "geometry": {"inclusions": [{"mu": 5, "area": 2.0, "center": [0, 0]}]}})");
  CHECK(reordered.inclusions[0].tensor(0, 0) == doctest::Approx(2 * 2.0 * 4.0 / 6.0));

  CHECK_THROWS_AS(
      parse_scene(R"({"model": "small", "geometry": {"curve": "gamma1"}})"), ParseError);
  CHECK_THROWS_AS(
      parse_scene(R"({"model": "thin", "geometry": {"curve": "spiral"}})"), ParseError);
  CHECK_THROWS_AS(
      parse_scene(R"({"model": "thin", "geometry": {"curve": "gamma1", "zzz": 1}})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_scene(
          R"({"model": "small",
              "geometry": {"inclusions": [{"center": [0,0], "mu": 5, "tensor": [[1,0],[0,1]]}]}})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_scene(
          R"({"preset": "gamma1-eps", "strengths": [1, 2]})"),
      ParseError);
}

TEST_CASE("run_scene on the permittivity preset") {
  SceneConfig config = preset_scene("gamma1-eps");
  config.nx = 64;
  config.ny = 64;
  const auto report = run_scene(config);
  CHECK(report.omega == doctest::Approx(15.70796).epsilon(1e-6));
  CHECK(report.points == 6);
  CHECK(report.signal_dim == 6);
  CHECK(report.directions == 24);
  CHECK(report.predictor_kind == MapKind::PredictorEps);
  CHECK_FALSE(report.comparison_alt.has_value());
  CHECK(report.sigma.size() == 24);
  CHECK(report.comparison.pixels > 0);
}

TEST_CASE("run_scene reports both variants for permeability contrast") {
  SceneConfig config = preset_scene("point-mu");
  config.nx = 48;
  config.ny = 48;
  const auto report = run_scene(config);
  CHECK(report.predictor_kind == MapKind::PredictorMu);
  CHECK(report.comparison_alt.has_value());
  CHECK_FALSE(report.cap_hit);
}

TEST_CASE("export_map csv layout and round trip") {
  const ImageGrid<double> grid(0, 1, 0, 1, 2, 2);
  FieldMap<double> map{grid, MatrixX<double>::Zero(2, 2), MapKind::Music, 1e6};

  const fs::path dir = fs::temp_directory_path() / "music2d_test_csv";
  fs::create_directories(dir);
  const fs::path path = dir / "zeros.csv";
  export_map(map, path, ExportFormat::Csv);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y,value");
  int rows = 0;
  for (std::string row; std::getline(in, row);) {
    ++rows;
    CHECK(row.substr(row.rfind(',') + 1) == "0");
  }
  CHECK(rows == 4);

  // irrational values survive the 17-significant-digit round trip bit-exactly
  map.values(0, 0) = std::sqrt(2.0);
  map.values(1, 0) = std::exp(1.0) / 7.0;
  map.values(0, 1) = -std::numbers::pi * 1e-7;
  map.values(1, 1) = 1.0 / 3.0;
  export_map(map, path, ExportFormat::Csv);
  std::ifstream back(path);
  std::getline(back, header);
  std::vector<double> parsed;
  for (std::string row; std::getline(back, row);)
    parsed.push_back(std::strtod(row.c_str() + row.rfind(',') + 1, nullptr));
  REQUIRE(parsed.size() == 4);
  CHECK(parsed[0] == map.values(0, 0));
  CHECK(parsed[1] == map.values(1, 0));
  CHECK(parsed[2] == map.values(0, 1));
  CHECK(parsed[3] == map.values(1, 1));
}

TEST_CASE("export_map pgm scaling") {
  const ImageGrid<double> grid(0, 1, 0, 1, 3, 2);
  FieldMap<double> map{grid, MatrixX<double>::Constant(3, 2, 4.2), MapKind::Music, 1e6};

  const fs::path dir = fs::temp_directory_path() / "music2d_test_pgm";
  fs::create_directories(dir);
  const fs::path path = dir / "map.pgm";
  export_map(map, path, ExportFormat::Pgm);

  std::string data = slurp(path);
  const std::string header = "P5\n3 2\n65535\n";
  CHECK(data.rfind(header, 0) == 0);
  const std::string pixels = data.substr(header.size());
  REQUIRE(pixels.size() == 12);  // 6 pixels x 2 bytes
  for (char byte : pixels) CHECK(byte == 0);  // constant map degenerates to zero

  map.values(2, 1) = 5.0;  // one hot pixel -> full scale
  export_map(map, path, ExportFormat::Pgm);
  data = slurp(path);
  // top row holds the ymax row; hot pixel is its last column
  CHECK(static_cast<unsigned char>(data[header.size() + 4]) == 0xff);
  CHECK(static_cast<unsigned char>(data[header.size() + 5]) == 0xff);
  CHECK(static_cast<unsigned char>(data[header.size() + 0]) == 0x00);
}

TEST_CASE("run_scene writes deterministic artifacts") {
  SceneConfig config = preset_scene("gamma1-eps");
  config.nx = 32;
  config.ny = 32;
  config.noise = 0.01;
  config.seed = 7;

  const fs::path base = fs::temp_directory_path() / "music2d_test_run";
  fs::remove_all(base);
  config.out_dir = (base / "a").string();
  const auto first = run_scene(config);
  config.out_dir = (base / "b").string();
  const auto second = run_scene(config);
  REQUIRE(first.files.size() == second.files.size());
  REQUIRE(first.files.size() == 7);  // 3 maps x 2 formats + sigma
  for (std::size_t i = 0; i < first.files.size(); ++i)
    CHECK(slurp(first.files[i]) == slurp(second.files[i]));
}
