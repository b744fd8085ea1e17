#pragma once

#include "affgeo/errors.hpp"
#include "affgeo/linalg.hpp"

#include <functional>

namespace affgeo::fd {

using VecFn = std::function<Vec(const Vec&)>;
using MatFn = std::function<Mat(const Vec&)>;
using DomainFn = std::function<bool(const Vec&)>;

inline void require_inside(const DomainFn& inside, const Vec& x) {
  if (inside && !inside(x)) throw Error(ErrorCode::StencilLeavesDomain, "finite-difference stencil exits the chart domain");
}

/// Central-difference Jacobian with step h1.
Mat jacobian(const VecFn& f, const Vec& x, const DomainFn& inside = {});

/// Second derivative by nested central differences of f with step h2.
BilinearMap hessian(const VecFn& f, const Vec& x, const DomainFn& inside = {});

/// Second derivative by central differences of an analytic Jacobian (step h1).
BilinearMap hessian_from_jacobian(const MatFn& jac, const Vec& x, const DomainFn& inside = {});

/// Directional derivatives of a bilinear-valued map: result[i] = d/dx_i B(x).
std::vector<BilinearMap> bilinear_gradient(const std::function<BilinearMap(const Vec&)>& b, const Vec& x,
                                           const DomainFn& inside = {});

}  // namespace affgeo::fd
