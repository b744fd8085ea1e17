// Python surface: catalog queries, a few direct geometry calls, and the scenario harness.
#include "affgeo/catalog.hpp"
#include "affgeo/geodesics.hpp"
#include "affgeo/harness.hpp"
#include "affgeo/killing.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace affgeo;

namespace {

IntegratorConfig config(double step) {
  IntegratorConfig cfg;
  cfg.step = step;
  return cfg;
}

Connection default_conn(const std::string& m) {
  return catalog::connection(catalog::default_connection(m), catalog::manifold(m));
}

py::object report_to_python(const harness::Report& r, bool with_timing) {
  return py::module_::import("json").attr("loads")(harness::to_json(r, with_timing).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "chart-based affine manifold engine";

  py::register_exception<Error>(m, "AffgeoError", PyExc_RuntimeError);

  m.attr("catalog_version") = catalog::kVersion;
  m.def("manifolds", &catalog::manifold_names);
  m.def("connections", &catalog::connection_names, py::arg("manifold"));
  m.def("fields", &catalog::field_names, py::arg("manifold"));
  m.def("charts", [](const std::string& name) {
    std::vector<std::string> ids;
    for (const auto& c : catalog::manifold(name)->charts()) ids.push_back(c.id());
    return ids;
  });

  m.def(
      "exp_map",
      [](const std::string& manifold, const std::string& chart, const Vec& x, const Vec& v, double t, double step) {
        Point p = exp_map(default_conn(manifold), {{chart, x}, v}, t, config(step));
        return py::make_tuple(p.chart, p.coords);
      },
      py::arg("manifold"), py::arg("chart"), py::arg("x"), py::arg("v"), py::arg("t") = 1.0, py::arg("step") = 1e-3);

  m.def(
      "geodesic",
      [](const std::string& manifold, const std::string& chart, const Vec& x, const Vec& v, double t, double step) {
        CurveSpec c = geodesic(default_conn(manifold), {{chart, x}, v}, {0.0, t}, config(step));
        const auto& s = c.samples();
        const int n = static_cast<int>(x.size());
        Vec ts(s.size());
        Mat xs(s.size(), n), vs(s.size(), n);
        std::vector<std::string> charts;
        for (std::size_t i = 0; i < s.size(); ++i) {
          ts[i] = s[i].t;
          xs.row(i) = s[i].point.coords.transpose();
          vs.row(i) = s[i].velocity.transpose();
          charts.push_back(s[i].point.chart);
        }
        return py::make_tuple(ts, charts, xs, vs);
      },
      py::arg("manifold"), py::arg("chart"), py::arg("x"), py::arg("v"), py::arg("t"), py::arg("step") = 1e-3,
      "samples (t, chart ids, coords, velocities) of the geodesic with initial velocity v");

  m.def(
      "killing_residual",
      [](const std::string& manifold, const std::string& field, const std::string& chart, const Vec& x) {
        auto atlas = catalog::manifold(manifold);
        return killing_residual_norm(default_conn(manifold), catalog::field(field, atlas), {chart, x});
      },
      py::arg("manifold"), py::arg("field"), py::arg("chart"), py::arg("x"));

  m.def(
      "sphere_embed", [](const std::string& chart, const Vec& x) { return catalog::sphere_embed(chart, x); },
      py::arg("chart"), py::arg("x"));

  m.def(
      "run_scenario",
      [](const std::string& text, double tol_scale, bool with_timing) {
        harness::Scenario sc = harness::parse_scenario(text);
        harness::Report r;
        {
          py::gil_scoped_release release;
          r = harness::run_suite(sc, {tol_scale});
        }
        return report_to_python(r, with_timing);
      },
      py::arg("text"), py::arg("tol_scale") = 1.0, py::arg("with_timing") = true,
      "parse a scenario JSON string, run it and return the report as a dict");

  m.def(
      "run_scenario_file",
      [](const std::string& path, double tol_scale, bool with_timing) {
        harness::Scenario sc = harness::load_scenario(path);
        harness::Report r;
        {
          py::gil_scoped_release release;
          r = harness::run_suite(sc, {tol_scale});
        }
        return report_to_python(r, with_timing);
      },
      py::arg("path"), py::arg("tol_scale") = 1.0, py::arg("with_timing") = true);

  m.def("checks", [] {
    std::vector<std::string> names;
    for (const auto& c : harness::check_catalog()) names.push_back(c.name);
    return names;
  });
}
