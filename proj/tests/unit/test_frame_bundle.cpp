#include "affgeo/catalog.hpp"
#include "affgeo/frame_bundle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace affgeo;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Mat m2(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }

Frame sphere_frame() { return {"N", v2(0.4, -0.3), m2(1.1, 0.2, -0.3, 0.9)}; }
}  // namespace

TEST(FrameBundle, StateRoundTrip) {
  Frame f = sphere_frame();
  State st = to_state(f);
  EXPECT_EQ(st.s.size(), 6);
  EXPECT_DOUBLE_EQ(st.s[3], 0.2);  // row-major g block
  Frame back = to_frame(st);
  EXPECT_EQ(back.g, f.g);
}

TEST(FrameBundle, KappaInverseRoundTrip) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Frame f = sphere_frame();
  FrameTangent ft{v2(0.3, -0.8), m2(0.1, 0.5, -0.4, 0.2)};
  KappaValue k = kappa(c, f, ft);
  FrameTangent back = kappa_inverse(c, f, k);
  EXPECT_LT((back.v - ft.v).norm(), 1e-13);
  EXPECT_LT((back.w - ft.w).norm(), 1e-13);
  Mat km = kappa_matrix(c, f);
  EXPECT_LT((km * pack(ft) - pack(k)).norm(), 1e-13);
}

// θ is the frame coordinates of the base vector.
TEST(FrameBundle, SolderingSolves) {
  Frame f = sphere_frame();
  FrameTangent ft{v2(0.3, -0.8), Mat::Zero(2, 2)};
  EXPECT_LT((f.g * soldering(f, ft) - ft.v).norm(), 1e-14);
}

// Equivariance: θ_{pa}(v, W a) = a⁻¹ θ_p(v, W), ω_{pa}(v, W a) = a⁻¹ ω_p(v, W) a.
TEST(FrameBundle, RightActionEquivariance) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Frame f = sphere_frame();
  Mat g2 = m2(0.7, -0.4, 0.3, 1.2);
  FrameTangent ft{v2(0.3, -0.8), m2(0.1, 0.5, -0.4, 0.2)};
  KappaValue k0 = kappa(c, f, ft);
  KappaValue k1 = kappa(c, rho(f, g2), {ft.v, ft.w * g2});
  EXPECT_LT((k1.theta - g2.inverse() * k0.theta).norm(), 1e-13);
  EXPECT_LT((k1.omega - g2.inverse() * k0.omega * g2).norm(), 1e-13);
}

TEST(FrameBundle, SingularInputs) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Frame f = sphere_frame();
  try {
    rho(f, m2(1, 2, 2, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularGroupElement);
  }
  Frame bad{"N", v2(0, 0), m2(1, 1, 1, 1)};
  try {
    kappa(c, bad, {v2(1, 0), Mat::Zero(2, 2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularFrame);
  }
}

// Flat plane: H_λ moves x along g λ with g fixed.
TEST(FrameBundle, FlatHorizontalFlowIsStraight) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  Frame f{"id", v2(0.1, 0.2), m2(1, 0.5, 0, 2)};
  Vec lambda = v2(0.3, -0.1);
  State end = integrate(standard_horizontal(c, lambda), to_state(f), 1.5, {});
  Frame e = to_frame(end);
  EXPECT_LT((e.x - (f.x + 1.5 * f.g * lambda)).norm(), 1e-13);
  EXPECT_LT((e.g - f.g).norm(), 1e-13);
}

// Constant fundamental fields: the flow of κ⁻¹(0, A) is right multiplication by e^{tA}.
TEST(FrameBundle, VerticalFlowIsGroupAction) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Frame f = sphere_frame();
  Mat A = m2(0, -1, 1, 0);
  State end = integrate(kappa_field(c, {Vec::Zero(2), A}), to_state(f), M_PI / 2, {});
  Frame e = to_frame(end);
  EXPECT_LT((e.x - f.x).norm(), 1e-13);
  EXPECT_LT((e.g - f.g * m2(0, -1, 1, 0)).norm(), 1e-11);
}

TEST(FrameBundle, KappaFieldJacobianMatchesFD) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  FrameVectorField h = kappa_field(c, {v2(0.4, -0.2), m2(0.1, 0.3, -0.2, 0.05)});
  State st = to_state(sphere_frame());
  Mat j = h.jacobian(st.chart, st.s);
  Mat fd(6, 6);
  const double eps = 1e-6;
  for (int i = 0; i < 6; ++i) {
    Vec d = Vec::Unit(6, i) * eps;
    fd.col(i) = (h.value(st.chart, st.s + d) - h.value(st.chart, st.s - d)) / (2 * eps);
  }
  EXPECT_LT((j - fd).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(FrameBundle, HorizontalProjectionOnSphere) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Frame f = sphere_frame();
  ProjectionDefect d = horizontal_projection_defect(c, v2(0.5, 0.2), f, {0.0, 2 * M_PI}, {});
  EXPECT_LT(d.derivative, 1e-4);
  EXPECT_LT(d.geodesic, 1e-5);
}

TEST(FrameBundle, ParameterFlowMatchesKappaInverse) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  EXPECT_LT(parameter_flow_derivative_defect(kappa_family(c), to_state(sphere_frame()), {}), 1e-4);
}
