#include "affgeo/catalog.hpp"
#include "affgeo/connection.hpp"
#include "affgeo/vector_field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace affgeo;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
}  // namespace

// Polar flat connection: Γ^r_θθ = −r, Γ^θ_rθ = 1/r, and B(v,w) = −Γ(w,v).
TEST(Connection, PolarCoefficientsMatchChristoffel) {
  auto a = catalog::manifold("plane_polar");
  Connection c = catalog::connection("flat", a);
  const double r = 1.3;
  Vec v = v2(0.4, -0.7), w = v2(-0.2, 0.9);
  Vec gamma(2);
  gamma[0] = -r * v[1] * w[1];
  gamma[1] = (v[0] * w[1] + v[1] * w[0]) / r;
  EXPECT_LT((eval_B(c, {"pol", v2(r, 0.2)}, v, w) + gamma).norm(), 1e-14);
}

TEST(Connection, ChangeOfVariableSphere) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    // the N/S overlap is 1/2 < |x| < 2
    const double r = 1.05 + 0.35 * u(rng), phi = 3.0 * u(rng);
    Vec x = v2(r * std::cos(phi), r * std::sin(phi));
    Vec v = v2(u(rng), u(rng)), w = v2(u(rng), u(rng));
    EXPECT_LT(change_of_variable_residual(c, {"N", x}, v, w, "N", "S"), 1e-6);
  }
}

TEST(Connection, ChangeOfVariablePolar) {
  auto a = catalog::manifold("plane_polar");
  Connection c = catalog::connection("flat", a);
  EXPECT_LT(change_of_variable_residual(c, {"cart", v2(0.6, 0.8)}, v2(1, 2), v2(-1, 0.5), "cart", "pol"), 1e-6);
}

// A deliberately wrong connection on S breaks the transformation law.
TEST(Connection, ChangeOfVariableDetectsMismatch) {
  auto a = catalog::manifold("plane_polar");
  Connection zero = from_christoffel("zero", a,
                                     {{"cart", [](const Vec&) { return BilinearMap::zero(2, 2); }},
                                      {"pol", [](const Vec&) { return BilinearMap::zero(2, 2); }}});
  EXPECT_GT(change_of_variable_residual(zero, {"cart", v2(0.6, 0.8)}, v2(1, 2), v2(-1, 0.5), "cart", "pol"), 1e-2);
}

// ∇_v η = dη v − B(η, v); flat plane: the rotation field has ∇_v η = J v.
TEST(Connection, CovariantDerivativeFlat) {
  auto a = catalog::manifold("plane");
  Connection c = catalog::connection("flat", a);
  VectorField rot = catalog::field("rotation", a);
  Point p{"id", v2(0.3, 0.5)};
  Vec v = v2(1.0, 2.0);
  Tangent t = covariant_derivative(c, rot, {p, v});
  Mat j = rot.jacobian("id", p.coords);
  EXPECT_LT((t.vec - j * v).norm(), 1e-14);
}

// Round sphere in polar chart coordinates: ∇_{∂φ} ∂φ = −sinθ cosθ ∂θ.
TEST(Connection, ColatLonGeodesicCurvature) {
  auto a = catalog::manifold("sphere");
  Connection c = catalog::connection("round", a);
  const double th = 1.1;
  Vec b = eval_B(c, {"colatlon", v2(th, 0.3)}, v2(0, 1), v2(0, 1));
  // x'' = B(x', x') so B(∂φ,∂φ) = −Γ^θ_φφ ∂θ = sinθ cosθ ∂θ
  EXPECT_NEAR(b[0], std::sin(th) * std::cos(th), 1e-14);
  EXPECT_NEAR(b[1], 0.0, 1e-14);
}

TEST(Connection, AnalyticGradientMatchesFD) {
  auto a = catalog::manifold("halfplane");
  Connection c = catalog::connection("hyperbolic", a);
  Vec x = v2(0.2, 1.1);
  auto grad = c.gradient("h", x);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec e = Vec::Unit(2, i);
    BilinearMap fp = c.coefficients("h", x + h * e), fm = c.coefficients("h", x - h * e);
    Mat fdiff = (fp.data() - fm.data()) / (2 * h);
    EXPECT_LT((grad[i].data() - fdiff).cwiseAbs().maxCoeff(), 1e-7);
  }
}
