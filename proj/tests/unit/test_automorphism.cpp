#include "affgeo/automorphism.hpp"
#include "affgeo/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace affgeo;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Mat m2(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }
}  // namespace

// exp_aut(ξ) = Fl^ξ_{−1}: for rot(x) = (−y, x) that is rotation by −1 radian.
TEST(Automorphism, ExpAutOfPlaneRotation) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  Diffeo e = exp_aut(c, catalog::field("rotation", a), {});
  Mat r = m2(std::cos(1.0), std::sin(1.0), -std::sin(1.0), std::cos(1.0));
  Point p{"id", v2(0.4, 0.7)};
  EXPECT_LT((e.apply(p).coords - r * p.coords).norm(), 1e-12);
  EXPECT_LT((e.jacobian(p) - r).norm(), 1e-12);
  EXPECT_LT(e.hessian(p).max_abs(), 1e-6);
}

TEST(Automorphism, NotKilling) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  try {
    exp_aut(c, catalog::field("quadratic", a), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotKilling);
  }
}

// Sign convention on the sphere: exp_aut(Σ ωᵢ Lᵢ) is the rotation by +|ω| about ω.
TEST(Automorphism, SphereExpMatchesRigidRotation) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Vec w = (Vec(3) << 0.3, -0.5, 0.8).finished();
  Diffeo e = exp_aut(c, catalog::sphere_rotation(a, w), {});
  Diffeo r = catalog::sphere_rotation_map(a, catalog::rotation_matrix(w));
  for (Point p : {Point{"N", v2(0.2, 0.3)}, Point{"S", v2(-0.6, 0.1)}}) {
    Point q1 = e.apply(p), q2 = r.apply(p);
    EXPECT_LT((catalog::sphere_embed(q1.chart, q1.coords) - catalog::sphere_embed(q2.chart, q2.coords)).norm(), 1e-10);
  }
}

TEST(Automorphism, ComposeAndInverse) {
  auto a = catalog::manifold("sphere");
  Diffeo r = catalog::sphere_rotation_map(a, catalog::rotation_matrix((Vec(3) << 0.2, 0.1, -0.4).finished()));
  Diffeo id = r.compose(r.inverse());
  Point p{"N", v2(0.3, -0.2)};
  Point q = id.apply(p);
  EXPECT_LT((catalog::sphere_embed(q.chart, q.coords) - catalog::sphere_embed("N", p.coords)).norm(), 1e-14);
  EXPECT_LT((id.jacobian(p) - Mat::Identity(2, 2)).norm(), 1e-12);
}

TEST(Automorphism, RigidRotationIsAffine) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Diffeo r = catalog::sphere_rotation_map(a, catalog::rotation_matrix((Vec(3) << 0.7, 0.1, -0.4).finished()));
  Vec res = affine_residual(r, c, c, {"N", v2(0.3, -0.2)}, v2(1, 0.5), v2(-0.3, 0.8));
  EXPECT_LT(res.norm(), 1e-5);
}

// x -> x + (x₁², 0) is not affine for the flat connection: residual = (2 v₁ w₁, 0).
TEST(Automorphism, NonAffineMap) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  ClosedMap m;
  m.map = [](const Point& p) { return Point{p.chart, p.coords + v2(p.coords[0] * p.coords[0], 0)}; };
  Diffeo f = Diffeo::closed_form("bend", a, m);
  Vec res = affine_residual(f, c, c, {"id", v2(0.2, 0.1)}, v2(1, 0), v2(0.5, 2));
  EXPECT_LT((res - v2(1.0, 0.0)).norm(), 1e-5);
}

TEST(Automorphism, FrameLiftAndKappa) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Diffeo e = exp_aut(c, catalog::field("L2", a), {});
  FrameDiffeo fd = frame_lift(e);
  Frame p{"N", v2(0.2, 0.4), m2(1, 0.1, -0.2, 0.9)};
  Frame q = fd.apply(p);
  EXPECT_LT((q.g - e.jacobian(project(p)) * p.g).norm(), 1e-10);
  FrameTangent ft{v2(0.3, -0.1), m2(0.2, 0, 0.1, -0.3)};
  EXPECT_LT(kappa_pullback_defect(c, fd, p, ft, {}), 1e-8);
}

// The closed-form frame lift respects composition.
TEST(Automorphism, FrameLiftIsHomomorphism) {
  auto a = catalog::manifold("sphere");
  Diffeo f = catalog::sphere_rotation_map(a, catalog::rotation_matrix((Vec(3) << 0.2, 0.1, -0.4).finished()));
  Diffeo g = catalog::sphere_rotation_map(a, catalog::rotation_matrix((Vec(3) << -0.5, 0.3, 0.2).finished()));
  Frame p{"N", v2(0.2, 0.4), m2(1, 0.1, -0.2, 0.9)};
  Frame lhs = frame_lift(f.compose(g)).apply(p);
  Frame rhs = frame_lift(f).apply(frame_lift(g).apply(p));
  EXPECT_LT(frame_distance(*a, lhs, rhs), 1e-12);
}

TEST(Automorphism, ExpCommutes) {
  auto a = catalog::manifold("halfplane");
  Connection c = catalog::connection("hyperbolic", a);
  Diffeo e = exp_aut(c, catalog::field("h_special", a).scaled(0.3), {});
  EXPECT_LT(exp_commutes_defect(c, e, {{"h", v2(0.1, 1.2)}, v2(0.4, -0.2)}, {}), 1e-8);
}

TEST(Automorphism, FlowWordInverseAndJacobian) {
  auto a = catalog::manifold("plane");
  Diffeo w = Diffeo::flow_word("w", {{catalog::field("e1", a), 0.5}, {catalog::field("rotation", a), 0.3}}, {});
  Point p{"id", v2(0.1, 0.2)};
  Point back = w.inverse().apply(w.apply(p));
  EXPECT_LT((back.coords - p.coords).norm(), 1e-12);
  EXPECT_LT((w.jacobian(p) - m2(std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3))).norm(), 1e-12);
}

// Inverse Jacobian when the forward map lands in a different chart than the query point.
TEST(Automorphism, InverseJacobianAcrossCharts) {
  auto a = catalog::manifold("sphere");
  Diffeo r = catalog::sphere_rotation_map(a, catalog::rotation_matrix((Vec(3) << 2.5, 0.0, 0.0).finished()));
  Diffeo inv = r.inverse();
  Point p{"N", v2(0.9, 0.6)};
  Point q = inv.apply(p);
  Mat expect = a->d_transition(r.apply(q), "N") * r.jacobian(q);
  EXPECT_LT((inv.jacobian(p) * expect - Mat::Identity(2, 2)).norm(), 1e-12);
  Mat fd = Diffeo::closed_form("fdinv", a, ClosedMap{[&](const Point& x) { return inv.apply(x); }, {}, {}, {}})
               .jacobian(p);
  EXPECT_LT((inv.jacobian(p) - fd).norm(), 1e-6);
}
