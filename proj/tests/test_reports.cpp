#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "bmolab/config.hpp"
#include "bmolab/report.hpp"

using namespace bmolab;

TEST_CASE("config: parse, defaults, types, and round trip") {
  const std::string text =
      "# comment\n"
      "[run]\n"
      "seed = 7\n"
      "threads = 1\n"
      "\n"
      "[field]\n"
      "catalog = random_piecewise\n"
      "resolution_exp = 6\n"
      "half_range = 1.5\n";
  RunConfig cfg = RunConfig::parse_string(text);
  REQUIRE(cfg.get("field", "catalog") == "random_piecewise");
  REQUIRE(cfg.get_int("run", "seed", 0) == 7);
  REQUIRE(cfg.get_num("field", "half_range", 0) == 1.5);
  REQUIRE(cfg.get("run", "missing", "dflt") == "dflt");
  REQUIRE_THROWS_AS(cfg.get_num("field", "catalog", 0), std::invalid_argument);

  const RunConfig again = RunConfig::parse_string(cfg.serialize());
  REQUIRE(again.serialize() == cfg.serialize());
}

TEST_CASE("config: malformed lines rejected") {
  REQUIRE_THROWS_AS(RunConfig::parse_string("[run\nseed = 1\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(RunConfig::parse_string("just some words\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(RunConfig::parse_string("= value\n"), std::invalid_argument);
}

TEST_CASE("fmt_double: shortest round trip") {
  for (double x : {0.1, 1.0 / 3.0, 0.375, 1e-300, 123456789.123456789, -0.0, 2.0}) {
    const std::string s = fmt_double(x);
    REQUIRE(std::stod(s) == x);
  }
}

TEST_CASE("csv writer: echoes the config and keeps rows verbatim") {
  RunConfig cfg = RunConfig::parse_string("[run]\nseed = 3\n");
  CsvWriter csv("test report", cfg);
  csv.columns({"a", "b"});
  csv.row({"1", "0.5"});
  const std::string text = csv.text();
  REQUIRE(text.find("# test report\n") == 0);
  REQUIRE(text.find("# config run.seed = 3\n") != std::string::npos);
  REQUIRE(text.find("a,b\n1,0.5\n") != std::string::npos);
}

TEST_CASE("svg renderer: emits polylines for each series") {
  const std::string svg =
      render_svg_lines({2, 3, 4}, {{0.1, 0.2, 0.3}, {0.5, 0.5, 0.5}}, {"value", "target"}, "sweep");
  REQUIRE(svg.find("<svg") == 0);
  REQUIRE(svg.find("polyline") != std::string::npos);
  REQUIRE(svg.find("value") != std::string::npos);
  REQUIRE(svg.find("target") != std::string::npos);
  REQUIRE(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("json report: norm structure carries families") {
  CatalogParams p;
  const ScalarField eta = sample_catalog("checkerboard_eta", p, 2, 3, unit_box(2, 3));
  const NormReport rep = b_norm(eta, NormMode::q0);
  const nlohmann::json j = to_json(rep);
  REQUIRE(j["mode"] == "q0");
  REQUIRE(j["per_k"].size() == 3);
  REQUIRE(j["per_k"][0].contains("family"));
  REQUIRE(j["total"].get<double>() == Catch::Approx(rep.total));
}
