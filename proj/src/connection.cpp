#include "affgeo/connection.hpp"

#include "affgeo/finite_diff.hpp"
#include "affgeo/vector_field.hpp"

namespace affgeo {

const LocalConnection& Connection::local(const ChartId& chart) const {
  auto it = local_.find(chart);
  if (it == local_.end()) throw Error(ErrorCode::ChartMissing, "connection " + name_ + " has no data on chart " + chart);
  return it->second;
}

BilinearMap Connection::coefficients(const ChartId& chart, const Vec& x) const { return local(chart).coefficients(x); }

std::vector<BilinearMap> Connection::gradient(const ChartId& chart, const Vec& x) const {
  const auto& lc = local(chart);
  if (lc.derivative) return lc.derivative(x);
  const Chart& c = atlas_->chart(chart);
  return fd::bilinear_gradient(lc.coefficients, x, [&c](const Vec& y) { return c.contains(y); });
}

BilinearMap Connection::derivative(const ChartId& chart, const Vec& x, const Vec& a) const {
  auto grad = gradient(chart, x);
  BilinearMap out = BilinearMap::zero(atlas_->dim(), atlas_->dim());
  for (int i = 0; i < a.size(); ++i) out += a[i] * grad[i];
  return out;
}

Vec eval_B(const Connection& conn, const Point& point, const Vec& v, const Vec& w) {
  return conn.coefficients(point)(v, w);
}

Tangent covariant_derivative(const Connection& conn, const VectorField& eta, const Tangent& at) {
  const Point& p = at.base;
  Vec eta_x = eta(p);
  Vec out = eta.jacobian(p.chart, p.coords) * at.vec - conn.coefficients(p)(eta_x, at.vec);
  return {p, std::move(out)};
}

Tangent connector_apply(const Connection& conn, const SecondOrderTangent& sot) {
  return {sot.base, sot.z - conn.coefficients(sot.base)(sot.v, sot.w)};
}

double change_of_variable_residual(const Connection& conn, const Point& point, const Vec& v, const Vec& w,
                                   const ChartId& chart1, const ChartId& chart2) {
  const Atlas& atlas = conn.atlas();
  Point x1 = atlas.transition(point, chart1);
  Point x2 = atlas.transition(x1, chart2);
  Mat dh = atlas.d_transition(x1, chart2);
  BilinearMap d2h = atlas.d2_transition(x1, chart2);
  Vec lhs = conn.coefficients(x2)(dh * v, dh * w);
  Vec rhs = d2h(v, w) + dh * conn.coefficients(x1)(v, w);
  return (lhs - rhs).norm();
}

Connection from_christoffel(std::string name, AtlasPtr atlas, const std::map<ChartId, ChristoffelField>& gamma,
                            bool torsion_free) {
  Connection conn(std::move(name), std::move(atlas), torsion_free);
  for (const auto& [chart, g] : gamma) {
    LocalConnection lc;
    lc.coefficients = [g](const Vec& x) { return -1.0 * g(x).swapped(); };
    conn.set_local(chart, std::move(lc));
  }
  return conn;
}

}  // namespace affgeo
