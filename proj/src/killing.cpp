#include "affgeo/killing.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <memory>
#include <tuple>

namespace affgeo {

FrameVectorField natural_lift(const VectorField& field) {
  if (field.space() != Space::Base) throw Error(ErrorCode::InvalidArgument, "natural_lift needs a field on M");
  const int n = field.base_dim();
  FrameVectorField lift(field.name() + "_lift", field.atlas_ptr(), Space::Frame);
  auto xi = std::make_shared<const VectorField>(field);
  for (const auto& chart : field.atlas().charts()) {
    if (!field.has_chart(chart.id())) continue;
    const ChartId id = chart.id();
    LocalField lf;
    lf.value = [xi, id, n](const Vec& s) -> Vec {
      Vec x = s.head(n);
      Mat g = unflatten_rowmajor(s.tail(n * n), n);
      Vec out(n + n * n);
      out << xi->value(id, x), flatten_rowmajor(xi->jacobian(id, x) * g);
      return out;
    };
    lf.jacobian = [xi, id, n](const Vec& s) -> Mat {
      const int dim = n + n * n;
      Vec x = s.head(n);
      Mat g = unflatten_rowmajor(s.tail(n * n), n);
      Mat dxi = xi->jacobian(id, x);
      BilinearMap d2 = xi->hessian(id, x);
      Mat jac = Mat::Zero(dim, dim);
      jac.topLeftCorner(n, n) = dxi;
      for (int i = 0; i < n; ++i) jac.block(n, i, n * n, 1) = flatten_rowmajor(d2.fix_first(Vec::Unit(n, i)) * g);
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) jac(n + k * n + b, n + a * n + b) = dxi(k, a);
      return jac;
    };
    lift.set_local(id, std::move(lf));
  }
  return lift;
}

Vec killing_residual(const Connection& conn, const VectorField& field, const Point& point, const Vec& v,
                     const Vec& w) {
  const ChartId& c = point.chart;
  const Vec& x = point.coords;
  Vec xi = field.value(c, x);
  Mat dxi = field.jacobian(c, x);
  BilinearMap d2 = field.hessian(c, x);
  BilinearMap b = conn.coefficients(c, x);
  BilinearMap db = conn.derivative(c, x, xi);
  return d2(v, w) + dxi * b(v, w) - db(v, w) - b(dxi * v, w) - b(v, dxi * w);
}

double killing_residual_norm(const Connection& conn, const VectorField& field, const Point& point) {
  const int n = field.base_dim();
  const ChartId& c = point.chart;
  const Vec& x = point.coords;
  // assemble once instead of n² calls
  Vec xi = field.value(c, x);
  Mat dxi = field.jacobian(c, x);
  BilinearMap d2 = field.hessian(c, x);
  BilinearMap b = conn.coefficients(c, x);
  BilinearMap db = conn.derivative(c, x, xi);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec v = Vec::Unit(n, i), w = Vec::Unit(n, j);
      Vec r = d2(v, w) + dxi * b(v, w) - db(v, w) - b(dxi * v, w) - b(v, dxi * w);
      worst = std::max(worst, r.norm());
    }
  return worst;
}

VectorField bracket(const VectorField& f1, const VectorField& f2) {
  if (f1.space() != f2.space() || f1.atlas_ptr() != f2.atlas_ptr())
    throw Error(ErrorCode::InvalidArgument, "bracket of fields on different spaces");
  VectorField out("[" + f1.name() + "," + f2.name() + "]", f1.atlas_ptr(), f1.space());
  auto a = std::make_shared<const VectorField>(f1);
  auto b = std::make_shared<const VectorField>(f2);
  for (const auto& chart : f1.atlas().charts()) {
    const ChartId id = chart.id();
    if (!f1.has_chart(id) || !f2.has_chart(id)) continue;
    LocalField lf;
    lf.value = [a, b, id](const Vec& x) -> Vec {
      return b->jacobian(id, x) * a->value(id, x) - a->jacobian(id, x) * b->value(id, x);
    };
    if (f1.space() == Space::Base) {
      // d(dξ2 ξ1) = d²ξ2(ξ1, ·) + dξ2 dξ1
      lf.jacobian = [a, b, id](const Vec& x) -> Mat {
        Vec v1 = a->value(id, x), v2 = b->value(id, x);
        Mat j1 = a->jacobian(id, x), j2 = b->jacobian(id, x);
        return b->hessian(id, x).fix_first(v1) + j2 * j1 - a->hessian(id, x).fix_first(v2) - j1 * j2;
      };
    }
    out.set_local(id, std::move(lf));
  }
  return out;
}

double lift_commutation_defect(const Connection& conn, const VectorField& field, const Vec& lambda,
                               const Frame& frame, double s, double t, const IntegratorConfig& cfg) {
  return commutation_defect(natural_lift(field), standard_horizontal(conn, lambda), to_state(frame), s, t, cfg);
}

KillingSeed ev_embedding(const Connection& conn, const VectorField& field, const Point& at) {
  Vec xi = field.value(at.chart, at.coords);
  BilinearMap b = conn.coefficients(at);
  Mat nabla = field.jacobian(at.chart, at.coords) - b.fix_first(xi);
  return {at, std::move(xi), std::move(nabla)};
}

KillingSeed operator+(const KillingSeed& a, const KillingSeed& b) {
  if (a.at.chart != b.at.chart || (a.at.coords - b.at.coords).norm() > 1e-12)
    throw Error(ErrorCode::BasePointMismatch, "seeds live at different points");
  return {a.at, a.value + b.value, a.nabla + b.nabla};
}

KillingSeed operator*(double s, const KillingSeed& a) { return {a.at, s * a.value, s * a.nabla}; }

HorizontalPath& HorizontalPath::leg(Vec lambda, double duration) {
  if (!std::isfinite(duration)) throw Error(ErrorCode::InvalidArgument, "path duration must be finite");
  steps_.emplace_back(Leg{std::move(lambda), duration});
  return *this;
}

HorizontalPath& HorizontalPath::move(Mat g) {
  if (!(std::abs(g.determinant()) > 1e-12))
    throw Error(ErrorCode::SingularGroupElement, "path move by a singular matrix");
  steps_.emplace_back(Move{std::move(g)});
  return *this;
}

HorizontalPath& HorizontalPath::append(const HorizontalPath& other) {
  steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
  return *this;
}

HorizontalPath path_to(const Connection& conn, const Point& x, const Point& y, const IntegratorConfig& cfg) {
  Tangent v = exp_inverse(conn, x, y, cfg);
  HorizontalPath path(v.base);
  path.leg(v.vec, 1.0);
  return path;
}

namespace {

// Walks the path, carrying the frame state and (optionally) one tangent column.
std::pair<State, Mat> walk(const Connection& conn, const HorizontalPath& path, Mat w, const IntegratorConfig& cfg) {
  const int n = conn.atlas().dim();
  State st = to_state(Frame{path.start().chart, path.start().coords, Mat::Identity(n, n)});
  for (const auto& step : path.steps()) {
    if (const auto* leg = std::get_if<HorizontalPath::Leg>(&step)) {
      FrameVectorField h = standard_horizontal(conn, leg->lambda);
      if (w.cols() > 0) {
        std::tie(st, w) = variational_flow(h, st, w, leg->duration, cfg);
      } else {
        st = integrate(h, st, leg->duration, cfg);
      }
    } else {
      const Mat& g = std::get<HorizontalPath::Move>(step).g;
      // ρ_g is linear in the g-block: g ↦ g·g2, and so is its tangent map.
      Frame f = to_frame(st);
      st = to_state(Frame{f.chart, f.x, f.g * g});
      for (int c = 0; c < w.cols(); ++c) {
        Mat block = unflatten_rowmajor(w.col(c).tail(n * n), n) * g;
        w.col(c).tail(n * n) = flatten_rowmajor(block);
      }
    }
  }
  return {st, w};
}

}  // namespace

Frame path_end(const Connection& conn, const HorizontalPath& path, const IntegratorConfig& cfg) {
  return to_frame(walk(conn, path, Mat(), cfg).first);
}

Tangent extend_killing(const Connection& conn, const KillingSeed& seed, const HorizontalPath& path,
                       const IntegratorConfig& cfg) {
  if (seed.at.chart != path.start().chart || (seed.at.coords - path.start().coords).norm() > 1e-12)
    throw Error(ErrorCode::SeedChartMismatch, "seed at chart " + seed.at.chart + " does not match path start in " +
                                                  path.start().chart);
  const int n = conn.atlas().dim();
  // Φ inversion at g = id: dξ = nabla + B(ξ, ·)
  BilinearMap b = conn.coefficients(seed.at);
  Mat dxi = seed.nabla + b.fix_first(seed.value);
  Mat w0(n + n * n, 1);
  w0.col(0) << seed.value, flatten_rowmajor(dxi);
  auto [st, w] = walk(conn, path, w0, cfg);
  return {Point{st.chart, st.s.head(n)}, w.col(0).head(n)};
}

int gram_rank(const std::vector<KillingSeed>& seeds) {
  if (seeds.empty()) return 0;
  const auto& ref = seeds.front().at;
  const int n = static_cast<int>(ref.coords.size());
  Mat m(n + n * n, static_cast<Eigen::Index>(seeds.size()));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& s = seeds[i];
    if (s.at.chart != ref.chart || (s.at.coords - ref.coords).norm() > 1e-12)
      throw Error(ErrorCode::BasePointMismatch, "gram_rank needs seeds at one base point");
    m.col(static_cast<Eigen::Index>(i)) << s.value, flatten_rowmajor(s.nabla);
  }
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-8 * sv[0]) ++rank;
  return rank;
}

}  // namespace affgeo
