// One line per acceptance criterion; exit status 1 if any fails.
#include "affgeo/catalog.hpp"
#include "affgeo/harness.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

using namespace affgeo;
using namespace affgeo::harness;

namespace {

struct Criterion {
  int id;
  const char* title;
  std::vector<std::string> scenarios;  // JSON texts; every check of every scenario must pass
};

std::string all_fields_json(const std::string& m) {
  std::string s = "[";
  for (const auto& f : catalog::field_names(m)) s += (s.size() > 1 ? ", \"" : "\"") + f + "\"";
  return s + "]";
}

std::vector<std::string> equivalence_scenarios() {
  std::vector<std::string> out;
  for (const auto& m : catalog::manifold_names()) {
    out.push_back(R"({"manifold": ")" + m + R"(", "checks": [{"name": "lift_equivalence", "fields": )" +
                  all_fields_json(m) + "}]}");
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "flat-plane exactness (geodesic, exp, transport, exp_aut) <= 1e-9, |t| <= 10",
       {R"({"manifold": "plane", "checks": [{"name": "flat_closed_form", "tol": 1e-9, "t_max": 10}]})",
        R"({"manifold": "flat3", "checks": [{"name": "flat_closed_form", "tol": 1e-9, "t_max": 10}]})"}},
      {2, "sphere equator returns at 2pi <= 1e-6 (step 1e-3); observed order >= 3.8",
       {R"({"manifold": "sphere", "integrator": {"step": 1e-3},
            "checks": [{"name": "geodesic_periodicity", "tol": 1e-6}, {"name": "geodesic_convergence", "tol": 3.8},
                       {"name": "geodesic_closed_form", "tol": 1e-6}]})"}},
      {3, "holonomy around colatitude circles = 2pi cos(theta0), <= 1e-5",
       {R"({"manifold": "sphere", "checks": [{"name": "holonomy", "tol": 1e-5, "theta0": [0.5235987755982988,
            0.7853981633974483, 1.0471975511965976]}]})"}},
      {4, "change-of-variable residual <= 1e-6 on 100 overlap points (sphere, cart/polar)",
       {R"({"manifold": "sphere", "checks": [{"name": "change_of_variable", "tol": 1e-6, "samples": 100}]})",
        R"({"manifold": "plane_polar", "checks": [{"name": "change_of_variable", "tol": 1e-6, "samples": 100}]})"}},
      {5, "standard-horizontal projection: derivative <= 1e-4, geodesic match <= 1e-5 on [0, 2pi]",
       {R"({"manifold": "sphere", "checks": [
            {"name": "horizontal_projection", "label": "projection_derivative", "part": "derivative", "tol": 1e-4, "samples": 3},
            {"name": "horizontal_projection", "label": "projection_geodesic", "part": "geodesic", "tol": 1e-5, "samples": 3}]})"}},
      {6, "Killing residual <= 1e-8 for so(3) at 100 points; >= 1e-2 for (x1^2, 0)",
       {R"({"manifold": "sphere", "fields": ["L1", "L2", "L3"],
            "checks": [{"name": "killing_residual", "tol": 1e-8, "samples": 100}]})",
        R"({"manifold": "plane", "fields": ["quadratic"], "checks": [{"name": "nonaffine_detect", "tol": 1e-2}]})"}},
      {7, "residual and flow-commutation Killing verdicts agree for every catalog field", equivalence_scenarios()},
      {8, "lift of bracket = bracket of lifts <= 1e-6; [L1, L2] = L3 <= 1e-8",
       {R"({"manifold": "sphere", "fields": ["L1", "L2", "L3"],
            "checks": [{"name": "lift_homomorphism", "tol": 1e-6}, {"name": "bracket_structure", "tol": 1e-8}]})"}},
      {9, "Killing extension at distance 1 recovers the field <= 1e-5; linear in the seed <= 1e-8",
       {R"({"manifold": "sphere", "fields": ["L1", "L2", "L3"],
            "checks": [{"name": "killing_extension", "tol": 1e-5, "distance": 1.0},
                       {"name": "extension_linearity", "tol": 1e-8}]})"}},
      {10, "exp_aut on the sphere: affine, kappa-preserving, natural, Fr homomorphism; rank 3; orbits separate",
       {R"({"manifold": "sphere", "fields": ["L1", "L2", "L3"],
            "checks": [{"name": "exp_aut_affine", "tol": 1e-5}, {"name": "kappa_pullback", "tol": 1e-5},
                       {"name": "exp_commutes", "tol": 1e-5}, {"name": "frame_hom", "tol": 1e-8},
                       {"name": "gram_rank", "expected": 3}, {"name": "orbit_separation", "tol": 1e-3}]})"}},
      {11, "parameter-flow derivative matches kappa^-1 <= 1e-4 (plane, sphere)",
       {R"({"manifold": "plane", "checks": [{"name": "parameter_flow", "tol": 1e-4}]})",
        R"({"manifold": "sphere", "checks": [{"name": "parameter_flow", "tol": 1e-4}]})"}},
      {12, "completeness: sphere and plane reach 1e3 from 20 seeds; punctured disk stops before t = 2",
       {R"({"manifold": "sphere", "checks": [{"name": "completeness", "horizon": 1000, "seeds_count": 20}]})",
        R"({"manifold": "plane", "checks": [{"name": "completeness", "horizon": 1000, "seeds_count": 20}]})",
        R"({"manifold": "punctured_disk", "checks": [{"name": "incompleteness", "tol": 2.0,
            "seeds": [{"chart": "id", "x": [0.3, 0.3], "v": [-1.0, -1.0]}]}]})"}},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::ostringstream detail;
    for (const auto& text : c.scenarios) {
      try {
        Scenario sc = parse_scenario(text);
        Report r = run_suite(sc);
        for (const auto& row : r.checks) {
          pass &= row.pass;
          detail << ' ' << sc.manifold << '/' << row.name << '=' << row.worst;
          if (!row.error.empty()) detail << " (" << row.error << ')';
        }
      } catch (const std::exception& e) {
        pass = false;
        detail << " error: " << e.what();
      }
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %s |%s | %.1fs\n", pass ? "PASS" : "FAIL", c.id, c.title, detail.str().c_str(), s);
    std::fflush(stdout);
    failed += pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
