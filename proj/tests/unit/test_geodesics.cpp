#include "affgeo/catalog.hpp"
#include "affgeo/geodesics.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>

using namespace affgeo;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
}  // namespace

// Hyperbolic half-plane: the vertical geodesic through (0,1) with velocity (0,1) is y = eᵗ.
TEST(Geodesics, HalfPlaneVertical) {
  auto a = catalog::manifold("halfplane");
  Connection c = catalog::connection("hyperbolic", a);
  CurveSpec g = geodesic(c, {{"h", v2(0.0, 1.0)}, v2(0.0, 1.0)}, {-0.5, 0.6}, {});
  for (const auto& s : g.samples()) {
    EXPECT_NEAR(s.point.coords[0], 0.0, 1e-14);
    EXPECT_NEAR(s.point.coords[1], std::exp(s.t), 1e-11);
  }
}

// Half-circle geodesic: from (0,1) with velocity (1,0), x = tanh t, y = sech t.
TEST(Geodesics, HalfPlaneSemicircle) {
  auto a = catalog::manifold("halfplane");
  Connection c = catalog::connection("hyperbolic", a);
  Point e = exp_map(c, {{"h", v2(0.0, 1.0)}, v2(1.0, 0.0)}, 0.5, {});
  EXPECT_NEAR(e.coords[0], std::tanh(0.5), 1e-11);
  EXPECT_NEAR(e.coords[1], 1.0 / std::cosh(0.5), 1e-11);
}

// Unit speed for time π reaches the antipode, crossing from N into S.
TEST(Geodesics, SphereAntipode) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Point p{"N", v2(0.3, -0.4)};
  Vec x0 = catalog::sphere_embed("N", p.coords);
  Mat j = catalog::sphere_embed_jacobian("N", p.coords);
  Vec v = j.colPivHouseholderQr().solve(Eigen::Vector3d(x0).cross(Eigen::Vector3d::UnitZ()).normalized());
  v /= (j * v).norm();
  Point e = exp_map(c, {p, v}, M_PI, {});
  EXPECT_LT((catalog::sphere_embed(e.chart, e.coords) + x0).norm(), 1e-9);
}

TEST(Geodesics, ExpInverseRoundTrip) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Point x{"N", v2(0.2, 0.1)}, y{"N", v2(-0.3, 0.6)};
  Tangent v = exp_inverse(c, x, y, {});
  Point back = exp_map(c, v, {});
  EXPECT_LT((catalog::sphere_embed(back.chart, back.coords) - catalog::sphere_embed(y.chart, y.coords)).norm(), 1e-9);
}

// Flat plane in polar coordinates: transport round r = 1 keeps Cartesian components.
TEST(Geodesics, PolarTransportKeepsCartesianVector) {
  auto a = catalog::manifold("plane_polar");
  Connection c = catalog::connection("flat", a);
  CurveSpec circle = CurveSpec::from_function(
      "pol", [](double t) { return std::make_pair(v2(1.0, t), v2(0.0, 1.0)); }, -2.0, 2.0, 1e-3);
  Vec v = v2(0.5, 0.3);  // at θ = −2
  Tangent out = parallel_transport(c, circle, -2.0, 2.0, v, {});
  Vec before = a->d_transition({"pol", v2(1.0, -2.0)}, "cart") * v;
  Vec after = a->d_transition(out.base, "cart") * out.vec;
  EXPECT_LT((before - after).norm(), 1e-10);
}

TEST(Geodesics, CurveInterpolation) {
  CurveSpec c = CurveSpec::from_function(
      "id", [](double t) { return std::make_pair(v2(std::sin(t), t * t), v2(std::cos(t), 2 * t)); }, 0.0, 1.0, 0.01);
  auto a = catalog::manifold("plane");
  auto [x, v] = c.evaluate(*a, 0.4321, "id");
  EXPECT_LT((x - v2(std::sin(0.4321), 0.4321 * 0.4321)).norm(), 1e-9);
  EXPECT_LT((v - v2(std::cos(0.4321), 2 * 0.4321)).norm(), 1e-6);
}

TEST(Geodesics, PuncturedDiskIsIncomplete) {
  auto a = catalog::manifold("punctured_disk");
  Connection c = catalog::connection("flat", a);
  CompletenessReport r = completeness_probe(c, {{{"id", v2(0.3, 0.0)}, v2(-1.0, 0.0)}}, 10.0, {});
  ASSERT_EQ(r.seeds.size(), 1u);
  EXPECT_FALSE(r.complete_up_to_horizon);
  EXPECT_LE(r.seeds[0].reached_forward, 0.3 + 1e-12);
  EXPECT_EQ(r.seeds[0].forward, FlowStatus::LeftAtlas);
}

TEST(Geodesics, TorusIsComplete) {
  auto a = catalog::manifold("torus");
  Connection c = catalog::connection("flat", a);
  IntegratorConfig cfg;
  cfg.step = 1e-2;
  cfg.max_hops = 100000;
  CompletenessReport r = completeness_probe(c, {{{"t00", v2(0.4, 0.5)}, v2(0.3, 0.7)}}, 50.0, cfg);
  EXPECT_TRUE(r.complete_up_to_horizon);
  EXPECT_DOUBLE_EQ(r.seeds[0].reached(), 50.0);
}

// A radial line through the origin must leave the polar chart for the Cartesian one.
TEST(Geodesics, PolarLineThroughOrigin) {
  auto a = catalog::manifold("plane_polar");
  Connection c = catalog::connection("flat", a);
  Point e = exp_map(c, {{"pol", v2(0.8, 0.5)}, v2(-1.0, 0.0)}, 1.5, {});
  Vec x = a->transition(e, "cart").coords;
  EXPECT_LT((x - v2(-0.7 * std::cos(0.5), -0.7 * std::sin(0.5))).norm(), 1e-10);
}
