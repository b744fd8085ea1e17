#pragma once

#include "affgeo/atlas.hpp"
#include "affgeo/linalg.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace affgeo {

class VectorField;

/// Local representation x -> B^φ_x of an affine connection on one chart, with
/// an optional analytic derivative: dB(x)[i] = ∂B/∂x_i.
struct LocalConnection {
  std::function<BilinearMap(const Vec&)> coefficients;
  std::function<std::vector<BilinearMap>(const Vec&)> derivative;
};

/// A point (x, v, w, z) of TTM in chart form.
struct SecondOrderTangent {
  Point base;
  Vec v, w, z;
};

/// Affine connection stored chart by chart as the bilinear fields B^φ.
class Connection {
 public:
  Connection(std::string name, AtlasPtr atlas, bool torsion_free = true)
      : name_(std::move(name)), atlas_(std::move(atlas)), torsion_free_(torsion_free) {}

  void set_local(const ChartId& chart, LocalConnection local) { local_[chart] = std::move(local); }

  const std::string& name() const { return name_; }
  const Atlas& atlas() const { return *atlas_; }
  const AtlasPtr& atlas_ptr() const { return atlas_; }
  bool torsion_free() const { return torsion_free_; }
  bool has_chart(const ChartId& chart) const { return local_.count(chart) > 0; }

  BilinearMap coefficients(const ChartId& chart, const Vec& x) const;
  BilinearMap coefficients(const Point& p) const { return coefficients(p.chart, p.coords); }

  /// dB(x)(a) = Σ a_i ∂B/∂x_i; central differences when no analytic form is registered.
  BilinearMap derivative(const ChartId& chart, const Vec& x, const Vec& a) const;
  std::vector<BilinearMap> gradient(const ChartId& chart, const Vec& x) const;

 private:
  const LocalConnection& local(const ChartId& chart) const;

  std::string name_;
  AtlasPtr atlas_;
  bool torsion_free_;
  std::map<ChartId, LocalConnection> local_;
};

/// B^φ_x(v, w) at the given point.
Vec eval_B(const Connection& conn, const Point& point, const Vec& v, const Vec& w);

/// (∇_v η)(x) = dη(x) v − B_x(η(x), v).
Tangent covariant_derivative(const Connection& conn, const VectorField& eta, const Tangent& at);

/// Connector K in chart form: (x, v, w, z) -> (x, z − B_x(v, w)).
Tangent connector_apply(const Connection& conn, const SecondOrderTangent& sot);

/// ‖B2_{h(x)}(dh v, dh w) − d²h(v, w) − dh B1_x(v, w)‖ for the transition from chart1 to chart2.
double change_of_variable_residual(const Connection& conn, const Point& point, const Vec& v, const Vec& w,
                                   const ChartId& chart1, const ChartId& chart2);

/// Christoffel symbols per chart, Γ_x(v, w)^k = Γ^k_ij v^i w^j.
using ChristoffelField = std::function<BilinearMap(const Vec&)>;

/// Builds B from Christoffel symbols via B_x(v, w) = −Γ_x(w, v), so that
/// ∇_ξ η = dη(ξ) + Γ(ξ, η) in the classical index convention.
Connection from_christoffel(std::string name, AtlasPtr atlas, const std::map<ChartId, ChristoffelField>& gamma,
                            bool torsion_free = true);

}  // namespace affgeo
