#include "affgeo/vector_field.hpp"

#include "affgeo/finite_diff.hpp"

namespace affgeo {

int state_dim(Space space, int n) {
  switch (space) {
    case Space::Base: return n;
    case Space::Tangent: return 2 * n;
    case Space::Frame: return n + n * n;
  }
  return n;
}

const LocalField& VectorField::local(const ChartId& chart) const {
  auto it = local_.find(chart);
  if (it == local_.end()) throw Error(ErrorCode::ChartMissing, "field " + name_ + " is not defined on chart " + chart);
  return it->second;
}

bool VectorField::has_analytic_jacobian(const ChartId& chart) const {
  auto it = local_.find(chart);
  return it != local_.end() && static_cast<bool>(it->second.jacobian);
}

bool VectorField::has_analytic_hessian(const ChartId& chart) const {
  auto it = local_.find(chart);
  return it != local_.end() && static_cast<bool>(it->second.hessian);
}

bool VectorField::stencil_inside(const ChartId& chart, const Vec& s) const {
  return atlas_->chart(chart).contains(s.head(atlas_->dim()));
}

Vec VectorField::value(const ChartId& chart, const Vec& s) const { return local(chart).value(s); }

Mat VectorField::jacobian(const ChartId& chart, const Vec& s) const {
  const auto& lf = local(chart);
  if (lf.jacobian) return lf.jacobian(s);
  return fd::jacobian(lf.value, s, [&](const Vec& y) { return stencil_inside(chart, y); });
}

BilinearMap VectorField::hessian(const ChartId& chart, const Vec& s) const {
  const auto& lf = local(chart);
  if (lf.hessian) return lf.hessian(s);
  auto inside = [&](const Vec& y) { return stencil_inside(chart, y); };
  if (lf.jacobian) return fd::hessian_from_jacobian(lf.jacobian, s, inside);
  return fd::hessian(lf.value, s, inside);
}

VectorField VectorField::scaled(double a, std::string name) const {
  VectorField out(name.empty() ? name_ : std::move(name), atlas_, space_);
  for (const auto& [chart, lf] : local_) {
    LocalField s;
    s.value = [f = lf.value, a](const Vec& x) -> Vec { return a * f(x); };
    if (lf.jacobian) s.jacobian = [f = lf.jacobian, a](const Vec& x) -> Mat { return a * f(x); };
    if (lf.hessian) s.hessian = [f = lf.hessian, a](const Vec& x) { return a * f(x); };
    out.set_local(chart, std::move(s));
  }
  return out;
}

VectorField VectorField::plus(const VectorField& other, std::string name) const {
  if (other.space_ != space_ || other.atlas_ != atlas_)
    throw Error(ErrorCode::InvalidArgument, "cannot add fields on different spaces");
  VectorField out(name.empty() ? name_ + "+" + other.name_ : std::move(name), atlas_, space_);
  for (const auto& [chart, a] : local_) {
    auto it = other.local_.find(chart);
    if (it == other.local_.end()) continue;
    const LocalField& b = it->second;
    LocalField s;
    s.value = [fa = a.value, fb = b.value](const Vec& x) -> Vec { return fa(x) + fb(x); };
    if (a.jacobian && b.jacobian)
      s.jacobian = [fa = a.jacobian, fb = b.jacobian](const Vec& x) -> Mat { return fa(x) + fb(x); };
    if (a.hessian && b.hessian)
      s.hessian = [fa = a.hessian, fb = b.hessian](const Vec& x) { return fa(x) + fb(x); };
    out.set_local(chart, std::move(s));
  }
  return out;
}

}  // namespace affgeo
