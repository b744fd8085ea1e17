// affgeo_cli: run scenario files, list the catalog, dump trajectories.
#include "affgeo/catalog.hpp"
#include "affgeo/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>

using namespace affgeo;

namespace {

struct Overrides {
  std::optional<double> step;
  std::optional<std::uint64_t> seed;
};

void apply(harness::Scenario& sc, const Overrides& o) {
  if (o.step) {
    if (!(*o.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "--step must be positive");
    sc.integrator.step = *o.step;
  }
  if (o.seed) sc.rng_seed = *o.seed;
}

void print_report(const harness::Report& r) {
  for (const auto& c : r.checks) {
    std::printf("%-4s %-28s worst=%-12.4e %s %-10.3e n=%-5d %8.1f ms%s%s\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.worst, c.bound == harness::Bound::Upper ? "<=" : ">=", c.tol, c.samples, c.ms,
                c.error.empty() ? "" : "  error: ", c.error.c_str());
  }
  std::printf("%zu/%zu checks passed\n",
              static_cast<std::size_t>(std::count_if(r.checks.begin(), r.checks.end(),
                                                     [](const harness::CheckResult& c) { return c.pass; })),
              r.checks.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chart-based affine manifold engine"};
  app.require_subcommand(1);

  Overrides ov;
  std::string scenario_path, out_path;
  double tol_scale = 1.0;

  auto* run = app.add_subcommand("run", "run the checks of a scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--step", ov.step, "override integrator step");
  run->add_option("--seed", ov.seed, "override rng_seed");
  run->add_option("--tol-scale", tol_scale, "scale all tolerances (lower bounds are divided)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "write report (.json or .csv)");

  auto* list = app.add_subcommand("list", "list manifolds, connections, fields and checks");

  std::string kind = "geodesic";
  double t = 6.283185307179586;
  auto* dump = app.add_subcommand("dump", "write a sampled trajectory as CSV");
  dump->add_option("scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  dump->add_option("--kind", kind, "geodesic | frame | flow")
      ->check(CLI::IsMember({"geodesic", "frame", "flow"}));
  dump->add_option("-t,--time", t, "flow time");
  dump->add_option("--step", ov.step, "override integrator step");
  dump->add_option("--seed", ov.seed, "override rng_seed");
  dump->add_option("--out", out_path, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& m : catalog::manifold_names()) {
        std::cout << m << "\n  connections:";
        for (const auto& c : catalog::connection_names(m)) std::cout << ' ' << c;
        std::cout << "\n  fields:";
        for (const auto& f : catalog::field_names(m)) std::cout << ' ' << f;
        std::cout << '\n';
      }
      std::cout << "checks:\n";
      for (const auto& c : harness::check_catalog())
        std::cout << "  " << c.name << (c.bound == harness::Bound::Lower ? " [lower bound]" : "") << " - "
                  << c.summary << '\n';
      return 0;
    }
    harness::Scenario sc = harness::load_scenario(scenario_path);
    apply(sc, ov);
    if (*run) {
      harness::Report r = harness::run_suite(sc, {tol_scale});
      print_report(r);
      if (!out_path.empty()) harness::emit(r, out_path);
      return r.all_passed() ? 0 : 1;
    }
    if (*dump) {
      harness::emit(harness::sample_trajectory(sc, kind, t), out_path);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
