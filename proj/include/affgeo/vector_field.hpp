#pragma once

#include "affgeo/atlas.hpp"
#include "affgeo/linalg.hpp"

#include <functional>
#include <map>
#include <string>

namespace affgeo {

/// Which bundle a chart-local state vector lives on. All three share the
/// convention that the first n entries are the base-point coordinates.
///   Base    : x                      (dim n)
///   Tangent : (x, v)                 (dim 2n), TM
///   Frame   : (x, g row-major)       (dim n + n²), Fr(M) in bundle charts
enum class Space { Base, Tangent, Frame };

int state_dim(Space space, int n);

/// A state of one of the bundles above in a given chart.
struct State {
  ChartId chart;
  Vec s;
};

/// Chart-local form of a vector field on one chart.
struct LocalField {
  std::function<Vec(const Vec&)> value;
  std::function<Mat(const Vec&)> jacobian;         // optional
  std::function<BilinearMap(const Vec&)> hessian;  // optional, Base fields only
};

/// Vector field on M or on one of its bundles, given chart by chart. Missing
/// derivatives are supplied by central differences.
class VectorField {
 public:
  VectorField(std::string name, AtlasPtr atlas, Space space = Space::Base)
      : name_(std::move(name)), atlas_(std::move(atlas)), space_(space) {}

  VectorField& set_local(const ChartId& chart, LocalField local) {
    local_[chart] = std::move(local);
    return *this;
  }

  const std::string& name() const { return name_; }
  Space space() const { return space_; }
  const Atlas& atlas() const { return *atlas_; }
  const AtlasPtr& atlas_ptr() const { return atlas_; }
  int base_dim() const { return atlas_->dim(); }
  int dim() const { return state_dim(space_, atlas_->dim()); }

  bool has_chart(const ChartId& chart) const { return local_.count(chart) > 0; }
  bool has_analytic_jacobian(const ChartId& chart) const;
  bool has_analytic_hessian(const ChartId& chart) const;

  Vec value(const ChartId& chart, const Vec& s) const;
  Mat jacobian(const ChartId& chart, const Vec& s) const;
  BilinearMap hessian(const ChartId& chart, const Vec& s) const;

  Vec operator()(const State& st) const { return value(st.chart, st.s); }
  Vec operator()(const Point& p) const { return value(p.chart, p.coords); }

  /// A copy renamed and scaled by a constant.
  VectorField scaled(double a, std::string name = {}) const;
  /// Pointwise sum on the charts both fields define.
  VectorField plus(const VectorField& other, std::string name = {}) const;

 private:
  const LocalField& local(const ChartId& chart) const;
  bool stencil_inside(const ChartId& chart, const Vec& s) const;

  std::string name_;
  AtlasPtr atlas_;
  Space space_;
  std::map<ChartId, LocalField> local_;
};

using FrameVectorField = VectorField;

}  // namespace affgeo
