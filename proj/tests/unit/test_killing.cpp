#include "affgeo/catalog.hpp"
#include "affgeo/killing.hpp"

#include <gtest/gtest.h>

using namespace affgeo;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Mat m2(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }
}  // namespace

// Natural lift of a linear field A x is (A x, A g).
TEST(Killing, NaturalLiftOfLinearField) {
  auto a = catalog::manifold("plane");
  VectorField lin = catalog::field("linear", a);
  Mat A = lin.jacobian("id", v2(0, 0));
  Frame f{"id", v2(0.3, -0.4), m2(1, 0.2, -0.1, 0.8)};
  Vec val = natural_lift(lin)(to_state(f));
  EXPECT_LT((val.head(2) - A * f.x).norm(), 1e-15);
  EXPECT_LT((unflatten_rowmajor(val.tail(4), 2) - A * f.g).norm(), 1e-15);
}

TEST(Killing, LiftJacobianMatchesFD) {
  auto a = catalog::manifold("sphere");
  FrameVectorField lift = natural_lift(catalog::field("L1", a));
  State st = to_state({"N", v2(0.3, 0.5), m2(1, 0.2, -0.1, 0.8)});
  Mat j = lift.jacobian(st.chart, st.s), fd(6, 6);
  for (int i = 0; i < 6; ++i) {
    Vec d = Vec::Unit(6, i) * 1e-6;
    fd.col(i) = (lift.value(st.chart, st.s + d) - lift.value(st.chart, st.s - d)) / 2e-6;
  }
  EXPECT_LT((j - fd).cwiseAbs().maxCoeff(), 1e-7);
}

// Flat plane, ξ = (x₁², 0): the residual reduces to d²ξ(v, w) = (2 v₁ w₁, 0).
TEST(Killing, ResidualOfQuadraticField) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  Vec r = killing_residual(c, catalog::field("quadratic", a), {"id", v2(0.3, 0.1)}, v2(0.5, 1), v2(-2, 3));
  EXPECT_LT((r - v2(-2.0, 0.0)).norm(), 1e-12);
  EXPECT_NEAR(killing_residual_norm(c, catalog::field("quadratic", a), {"id", v2(0.3, 0.1)}), 2.0, 1e-12);
}

TEST(Killing, CatalogFieldsClassified) {
  struct Case {
    const char* m;
    const char* f;
    bool killing;
  };
  for (const Case& k : {Case{"sphere", "L1", true}, Case{"sphere", "dilation", false},
                        Case{"halfplane", "h_special", true}, Case{"halfplane", "h_shear", false},
                        Case{"torus", "shear", false}, Case{"plane_polar", "rotation", true},
                        Case{"flat3", "linear", true}}) {
    auto a = catalog::manifold(k.m);
    Connection c = catalog::connection(catalog::default_connection(k.m), a);
    double worst = 0.0;
    for (const auto& p : killing_samples(catalog::field(k.f, a)))
      worst = std::max(worst, killing_residual_norm(c, catalog::field(k.f, a), p));
    if (k.killing) EXPECT_LT(worst, 1e-8) << k.m << "/" << k.f;
    else EXPECT_GT(worst, 1e-2) << k.m << "/" << k.f;
  }
}

// [e1, rotation] = d rot · e1 = e2 with rot(x) = (−y, x).
TEST(Killing, BracketOnPlane) {
  auto a = catalog::manifold("plane");
  VectorField b = bracket(catalog::field("e1", a), catalog::field("rotation", a));
  EXPECT_LT((b(Point{"id", v2(0.4, 0.9)}) - v2(0, 1)).norm(), 1e-14);
}

TEST(Killing, So3Brackets) {
  auto a = catalog::manifold("sphere");
  VectorField l1 = catalog::field("L1", a), l2 = catalog::field("L2", a), l3 = catalog::field("L3", a);
  for (Point p : {Point{"N", v2(0.3, 0.2)}, Point{"S", v2(-0.5, 0.7)}, Point{"colatlon", v2(1.2, 0.4)}}) {
    EXPECT_LT((bracket(l1, l2)(p) - l3(p)).norm(), 1e-12);
    EXPECT_LT((bracket(l2, l3)(p) - l1(p)).norm(), 1e-12);
    EXPECT_LT((bracket(l3, l1)(p) + bracket(l1, l3)(p)).norm(), 1e-14);
  }
}

TEST(Killing, LiftCommutationSeparatesKillingFromNot) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  Frame f{"id", v2(0.2, 0.1), m2(1, 0.3, 0, 1)};
  EXPECT_LT(lift_commutation_defect(c, catalog::field("rotation", a), v2(0.4, -0.3), f, 0.25, 0.25, {}), 1e-10);
  EXPECT_GT(lift_commutation_defect(c, catalog::field("quadratic", a), v2(0.4, -0.3), f, 0.25, 0.25, {}), 1e-4);
}

TEST(Killing, SeedArithmetic) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Point p{"N", v2(0.2, 0.3)};
  KillingSeed s1 = ev_embedding(c, catalog::field("L1", a), p);
  KillingSeed s2 = ev_embedding(c, catalog::field("L2", a), p);
  KillingSeed sum = 2.0 * s1 + s2;
  EXPECT_LT((sum.value - (2 * s1.value + s2.value)).norm(), 1e-15);
  KillingSeed far = ev_embedding(c, catalog::field("L1", a), {"N", v2(0.5, 0.3)});
  try {
    s1 + far;
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BasePointMismatch);
  }
}

// Extension of the rotation seed along a zig-zag of horizontal legs and moves.
TEST(Killing, ExtensionRecoversRotation) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  VectorField rot = catalog::field("rotation", a);
  Point x{"id", v2(0.1, -0.2)};
  HorizontalPath path(x);
  path.leg(v2(0.5, 0.2), 1.0).move(m2(0, -1, 2, 0)).leg(v2(0.3, 0.1), 0.7);
  Tangent t = extend_killing(c, ev_embedding(c, rot, x), path, {});
  EXPECT_LT((t.vec - rot(t.base)).norm(), 1e-12);
  Frame end = path_end(c, path, {});
  EXPECT_LT((end.x - t.base.coords).norm(), 1e-14);
}

TEST(Killing, ExtensionErrors) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  KillingSeed s = ev_embedding(c, catalog::field("e1", a), {"id", v2(0, 0)});
  HorizontalPath wrong(Point{"id", v2(0.1, 0)});
  try {
    extend_killing(c, s, wrong, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SeedChartMismatch);
  }
  HorizontalPath p(Point{"id", v2(0, 0)});
  EXPECT_THROW(p.move(m2(1, 1, 1, 1)), Error);
}

TEST(Killing, PathToReachesTarget) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  Point x{"N", v2(0.1, 0.2)}, y{"N", v2(-0.4, 0.5)};
  Frame end = path_end(c, path_to(c, x, y, {}), {});
  EXPECT_LT((catalog::sphere_embed(end.chart, end.x) - catalog::sphere_embed("N", y.coords)).norm(), 1e-8);
}

TEST(Killing, GramRank) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  Point p{"id", v2(0.3, 0.1)};
  std::vector<KillingSeed> seeds;
  for (const char* f : {"e1", "e2", "rotation", "linear"}) seeds.push_back(ev_embedding(c, catalog::field(f, a), p));
  EXPECT_EQ(gram_rank(seeds), 4);
  seeds.push_back(2.0 * seeds[0] + seeds[2]);
  EXPECT_EQ(gram_rank(seeds), 4);
  EXPECT_EQ(gram_rank({seeds[0], seeds[0]}), 1);
}
