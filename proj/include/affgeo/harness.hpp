#pragma once

#include "affgeo/flows.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace affgeo::harness {

using Json = nlohmann::ordered_json;

struct CheckSpec {
  std::string name;   // registry key
  std::string label;  // shown in reports; defaults to name
  double tol = 0.0;
  Json params = Json::object();
};

struct Scenario {
  std::string manifold;
  std::string connection;  // defaults to the manifold's usual connection
  std::vector<std::string> fields;
  std::uint64_t rng_seed = 42;
  IntegratorConfig integrator;
  std::vector<CheckSpec> checks;
};

/// Strict JSON → Scenario. ParseError (with line or field path) on malformed
/// input or unknown keys; UnknownCatalogName on unresolvable names.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

enum class Bound { Upper, Lower };

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double tol = 0.0;
  Bound bound = Bound::Upper;
  int samples = 0;
  double ms = 0.0;
  std::string error;  // set when the check raised
};

struct Report {
  std::vector<CheckResult> checks;
  Json meta = Json::object();
  bool all_passed() const;
};

struct RunOptions {
  /// Upper-bound tolerances are multiplied, lower bounds divided.
  double tol_scale = 1.0;
};

/// Runs the checks in declared order. A raising check becomes a failed row.
Report run_suite(const Scenario& scenario, const RunOptions& opts = {});

struct CheckInfo {
  std::string name;
  Bound bound;
  std::string summary;
};
const std::vector<CheckInfo>& check_catalog();

Json to_json(const Report& report, bool with_timing = true);
/// Writes JSON (".json") or, for reports, a one-row-per-check CSV (".csv").
void emit(const Report& report, const std::string& path);

/// One sampled state of a trajectory: t, chart, coords and extra payload columns.
struct TrajectoryRow {
  double t;
  std::string chart;
  Vec coords;
  Vec extra;
};

struct Trajectory {
  int dim = 0;
  std::vector<std::string> extra_names;
  std::vector<TrajectoryRow> rows;
};

/// "geodesic", "frame" (H_λ) or "flow" (first scenario field) from a point drawn with the scenario seed.
Trajectory sample_trajectory(const Scenario& scenario, const std::string& kind, double t);
void emit(const Trajectory& traj, const std::string& path);

}  // namespace affgeo::harness
