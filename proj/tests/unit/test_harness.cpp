#include "affgeo/harness.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace affgeo;
using namespace affgeo::harness;

namespace {

std::string scenario_dir() {
  const char* d = std::getenv("AFFGEO_SCENARIOS");
  return d ? d : AFFGEO_SCENARIO_DIR;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Harness, MinimalScenarioDefaults) {
  Scenario sc = load_scenario(scenario_dir() + "/minimal.json");
  EXPECT_EQ(sc.manifold, "sphere");
  EXPECT_EQ(sc.connection, "round");
  EXPECT_TRUE(sc.checks.empty());
  EXPECT_EQ(sc.rng_seed, 42u);
  EXPECT_DOUBLE_EQ(sc.integrator.step, 1e-3);
}

TEST(Harness, So3SuiteHasTwelveChecks) {
  Scenario sc = load_scenario(scenario_dir() + "/so3_sphere.json");
  EXPECT_EQ(sc.checks.size(), 12u);
}

TEST(Harness, RejectsBadInput) {
  EXPECT_EQ(code_of(R"({"manifold": "torus5"})"), ErrorCode::UnknownCatalogName);
  EXPECT_EQ(code_of(R"({"manifold": "sphere", "connection": "flat"})"), ErrorCode::UnknownCatalogName);
  EXPECT_EQ(code_of(R"({"manifold": "sphere", "fields": ["L9"]})"), ErrorCode::UnknownCatalogName);
  EXPECT_EQ(code_of(R"({"manifold": "sphere", "checks": [{"name": "nope"}]})"), ErrorCode::UnknownCatalogName);
  EXPECT_EQ(code_of(R"({"manifold": "sphere", "colour": 1})"), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"manifold": "sphere", "checks": [{"name": "holonomy", "tol": -1}]})"), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"manifold": "sphere", "checks": [{"name": "holonomy", "samples": 3}]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"manifold": "sphere", "integrator": {"step": 0}})"), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"manifold": 3})"), ErrorCode::ParseError);
}

TEST(Harness, DiagnosticsNameLineAndField) {
  try {
    parse_scenario("{\n  \"manifold\": \"sphere\",\n  \"fields\": [\"L1\",]\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    parse_scenario(R"({"manifold": "sphere", "checks": [{"name": "holonomy"}, {"name": "holonomy", "x": 1}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("checks[1].x"), std::string::npos) << e.what();
  }
}

// A failing or raising check never stops later checks; rows keep declared order.
TEST(Harness, IsolationAndOrder) {
  Scenario sc = parse_scenario(R"({
    "manifold": "sphere", "fields": ["L1", "L2", "L3"],
    "checks": [
      {"name": "killing_residual", "tol": 1e-20, "samples": 10},
      {"name": "flat_closed_form"},
      {"name": "bracket_structure", "samples": 5, "label": "brackets"}
    ]})");
  Report r = run_suite(sc);
  ASSERT_EQ(r.checks.size(), 3u);
  EXPECT_FALSE(r.checks[0].pass);
  EXPECT_GT(r.checks[0].worst, 0.0);
  EXPECT_FALSE(r.checks[1].pass);
  EXPECT_FALSE(r.checks[1].error.empty());
  EXPECT_TRUE(r.checks[2].pass);
  EXPECT_EQ(r.checks[2].name, "brackets");
  EXPECT_FALSE(r.all_passed());
}

TEST(Harness, DeterministicReports) {
  Scenario sc = parse_scenario(R"({
    "manifold": "plane", "fields": ["e1", "rotation"], "rng_seed": 11,
    "checks": [{"name": "exp_aut_affine", "samples": 3}, {"name": "killing_residual", "samples": 5}]})");
  Json a = to_json(run_suite(sc), false), b = to_json(run_suite(sc), false);
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Harness, TolScale) {
  Scenario sc = parse_scenario(R"({"manifold": "plane", "fields": ["quadratic"],
    "checks": [{"name": "nonaffine_detect", "tol": 1.0}, {"name": "killing_residual", "fields": ["e1"]}]})");
  Report r = run_suite(sc, {10.0});
  EXPECT_DOUBLE_EQ(r.checks[0].tol, 0.1);
  EXPECT_DOUBLE_EQ(r.checks[1].tol, 1e-7);
}

TEST(Harness, EmitEmptyReport) {
  const std::string path = ::testing::TempDir() + "empty_report.json";
  emit(Report{}, path);
  Json j = Json::parse(slurp(path));
  EXPECT_TRUE(j["checks"].is_array());
  EXPECT_TRUE(j["checks"].empty());
  std::remove(path.c_str());
  EXPECT_THROW(emit(Report{}, "/nonexistent-dir/x.json"), Error);
}

TEST(Harness, KeyOrderIsStable) {
  Scenario sc = parse_scenario(R"({"manifold": "plane", "fields": ["e1"], "checks": [{"name": "killing_residual"}]})");
  Json j = to_json(run_suite(sc));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j["checks"][0].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"name", "status", "worst", "tol", "bound", "samples", "ms"}));
  EXPECT_EQ(j.begin().key(), "checks");
}

TEST(Harness, GeodesicCsvIsMonotone) {
  Scenario sc = load_scenario(scenario_dir() + "/minimal.json");
  const std::string path = ::testing::TempDir() + "geo.csv";
  emit(sample_trajectory(sc, "geodesic", 1.0), path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,chart,x0,x1,v0,v1");
  double last = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const double t = std::stod(line.substr(0, line.find(',')));
    EXPECT_GT(t, last);
    last = t;
    ++rows;
  }
  EXPECT_GT(rows, 900);
  EXPECT_DOUBLE_EQ(last, 1.0);
  std::remove(path.c_str());
}

TEST(Harness, FrameAndFlowTrajectories) {
  Scenario sc = parse_scenario(R"({"manifold": "sphere", "fields": ["L3"]})");
  Trajectory f = sample_trajectory(sc, "frame", 0.5);
  EXPECT_EQ(f.extra_names.size(), 4u);
  Trajectory fl = sample_trajectory(sc, "flow", 0.5);
  EXPECT_EQ(fl.rows.back().t, 0.5);
  EXPECT_THROW(sample_trajectory(sc, "spiral", 1.0), Error);
}

TEST(Harness, CatalogListsChecks) {
  bool found = false;
  for (const auto& c : check_catalog()) found |= c.name == "holonomy";
  EXPECT_TRUE(found);
}
