#include "affgeo/finite_diff.hpp"

namespace affgeo::fd {

Mat jacobian(const VecFn& f, const Vec& x, const DomainFn& inside) {
  const double h = step1(x);
  const int n = static_cast<int>(x.size());
  Mat jac;
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    require_inside(inside, xp);
    require_inside(inside, xm);
    Vec col = (f(xp) - f(xm)) / (2.0 * h);
    if (i == 0) jac.resize(col.size(), n);
    jac.col(i) = col;
  }
  return jac;
}

BilinearMap hessian(const VecFn& f, const Vec& x, const DomainFn& inside) {
  const double h = step2(x);
  const int n = static_cast<int>(x.size());
  auto eval = [&](int i, double si, int j, double sj) {
    Vec y = x;
    y[i] += si * h;
    y[j] += sj * h;
    require_inside(inside, y);
    return f(y);
  };
  Vec f0 = f(x);
  BilinearMap out(static_cast<int>(f0.size()), n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Vec d;
      if (i == j) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        require_inside(inside, xp);
        require_inside(inside, xm);
        d = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
      } else {
        d = (eval(i, 1, j, 1) - eval(i, 1, j, -1) - eval(i, -1, j, 1) + eval(i, -1, j, -1)) / (4.0 * h * h);
      }
      for (int k = 0; k < d.size(); ++k) {
        out.at(k, i, j) = d[k];
        out.at(k, j, i) = d[k];
      }
    }
  }
  return out;
}

BilinearMap hessian_from_jacobian(const MatFn& jac, const Vec& x, const DomainFn& inside) {
  const double h = step1(x);
  const int n = static_cast<int>(x.size());
  BilinearMap out;
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    require_inside(inside, xp);
    require_inside(inside, xm);
    Mat d = (jac(xp) - jac(xm)) / (2.0 * h);
    if (i == 0) out = BilinearMap(static_cast<int>(d.rows()), n);
    for (int k = 0; k < d.rows(); ++k)
      for (int j = 0; j < n; ++j) out.at(k, i, j) = d(k, j);
  }
  // Symmetrize; mixed partials commute for smooth maps.
  BilinearMap sym = 0.5 * (out + out.swapped());
  return sym;
}

std::vector<BilinearMap> bilinear_gradient(const std::function<BilinearMap(const Vec&)>& b, const Vec& x,
                                           const DomainFn& inside) {
  const double h = step1(x);
  const int n = static_cast<int>(x.size());
  std::vector<BilinearMap> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    require_inside(inside, xp);
    require_inside(inside, xm);
    out.push_back((1.0 / (2.0 * h)) * (b(xp) - b(xm)));
  }
  return out;
}

}  // namespace affgeo::fd
