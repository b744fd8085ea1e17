#include "affgeo/frame_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace affgeo {

namespace {

constexpr double kDetGuard = 1e-12;

void require_invertible(const Mat& g, ErrorCode code) {
  if (!(std::abs(g.determinant()) > kDetGuard)) throw Error(code, "matrix is singular (|det| <= 1e-12)");
}

Mat horizontal_block(const BilinearMap& b, const Mat& g, const Vec& v) {
  // column j = B_x(g e_j, v)
  return b.fix_second(v) * g;
}

}  // namespace

State to_state(const Frame& f) {
  const auto n = f.x.size();
  State st{f.chart, Vec(n + n * n)};
  st.s << f.x, flatten_rowmajor(f.g);
  return st;
}

Frame to_frame(const State& st) {
  const int n = static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 4.0 * st.s.size())) / 2.0));
  return {st.chart, st.s.head(n), unflatten_rowmajor(st.s.tail(n * n), n)};
}

Vec pack(const FrameTangent& ft) {
  Vec out(ft.v.size() + ft.w.size());
  out << ft.v, flatten_rowmajor(ft.w);
  return out;
}

FrameTangent unpack_tangent(const Eigen::Ref<const Vec>& v, int n) {
  return {v.head(n), unflatten_rowmajor(v.tail(n * n), n)};
}

Vec pack(const KappaValue& kv) {
  Vec out(kv.theta.size() + kv.omega.size());
  out << kv.theta, flatten_rowmajor(kv.omega);
  return out;
}

KappaValue unpack_kappa(const Eigen::Ref<const Vec>& v, int n) {
  return {v.head(n), unflatten_rowmajor(v.tail(n * n), n)};
}

Frame rho(const Frame& frame, const Mat& g2) {
  require_invertible(g2, ErrorCode::SingularGroupElement);
  return {frame.chart, frame.x, frame.g * g2};
}

Vec soldering(const Frame& frame, const FrameTangent& ft) {
  require_invertible(frame.g, ErrorCode::SingularFrame);
  return frame.g.partialPivLu().solve(ft.v);
}

Mat connection_form(const Connection& conn, const Frame& frame, const FrameTangent& ft) {
  require_invertible(frame.g, ErrorCode::SingularFrame);
  BilinearMap b = conn.coefficients(frame.chart, frame.x);
  return frame.g.partialPivLu().solve(ft.w - horizontal_block(b, frame.g, ft.v));
}

KappaValue kappa(const Connection& conn, const Frame& frame, const FrameTangent& ft) {
  return {soldering(frame, ft), connection_form(conn, frame, ft)};
}

FrameTangent kappa_inverse(const Connection& conn, const Frame& frame, const KappaValue& kv) {
  require_invertible(frame.g, ErrorCode::SingularFrame);
  BilinearMap b = conn.coefficients(frame.chart, frame.x);
  Vec v = frame.g * kv.theta;
  Mat w = frame.g * kv.omega + horizontal_block(b, frame.g, v);
  return {std::move(v), std::move(w)};
}

Mat kappa_matrix(const Connection& conn, const Frame& frame) {
  const int n = static_cast<int>(frame.x.size());
  const int dim = n + n * n;
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    FrameTangent ft = unpack_tangent(Vec::Unit(dim, i), n);
    m.col(i) = pack(kappa(conn, frame, ft));
  }
  return m;
}

FrameVectorField kappa_field(const Connection& conn, const KappaValue& kv) {
  const int n = conn.atlas().dim();
  FrameVectorField field("eta", conn.atlas_ptr(), Space::Frame);
  auto shared = std::make_shared<const Connection>(conn);
  for (const auto& chart : conn.atlas().charts()) {
    if (!conn.has_chart(chart.id())) continue;
    const ChartId id = chart.id();
    LocalField lf;
    lf.value = [c = shared, id, kv, n](const Vec& s) -> Vec {
      Frame f{id, s.head(n), unflatten_rowmajor(s.tail(n * n), n)};
      BilinearMap b = c->coefficients(id, f.x);
      Vec v = f.g * kv.theta;
      Mat w = f.g * kv.omega + horizontal_block(b, f.g, v);
      Vec out(n + n * n);
      out << v, flatten_rowmajor(w);
      return out;
    };
    lf.jacobian = [c = shared, id, kv, n](const Vec& s) -> Mat {
      const int dim = n + n * n;
      Vec x = s.head(n);
      Mat g = unflatten_rowmajor(s.tail(n * n), n);
      BilinearMap b = c->coefficients(id, x);
      auto grad = c->gradient(id, x);
      const Vec& lambda = kv.theta;
      const Vec v = g * lambda;
      Mat jac = Mat::Zero(dim, dim);
      // base directions
      for (int i = 0; i < n; ++i) jac.block(n, i, n * n, 1) = flatten_rowmajor(horizontal_block(grad[i], g, v));
      // fibre directions g(a, bcol)
      for (int a = 0; a < n; ++a) {
        const Vec ea = Vec::Unit(n, a);
        const Vec b_ea_v = b(ea, v);
        for (int bc = 0; bc < n; ++bc) {
          Mat e = Mat::Zero(n, n);
          e(a, bc) = 1.0;
          const Vec dv = e * lambda;
          Mat dw = e * kv.omega + b.fix_second(dv) * g;
          dw.col(bc) += b_ea_v;
          Vec col(dim);
          col << dv, flatten_rowmajor(dw);
          jac.col(n + a * n + bc) = col;
        }
      }
      return jac;
    };
    field.set_local(id, std::move(lf));
  }
  return field;
}

FrameVectorField standard_horizontal(const Connection& conn, const Vec& lambda) {
  const int n = conn.atlas().dim();
  FrameVectorField h = kappa_field(conn, KappaValue{lambda, Mat::Zero(n, n)});
  return h;
}

ParametrizedField kappa_family(const Connection& conn) {
  const int n = conn.atlas().dim();
  auto shared = std::make_shared<const Connection>(conn);
  return {"kappa_inverse", n + n * n, [c = shared, n](const Vec& param) {
            return kappa_field(*c, unpack_kappa(param, n));
          }};
}

ProjectionDefect horizontal_projection_defect(const Connection& conn, const Vec& lambda, const Frame& frame,
                                              TimeSpan t_span, const IntegratorConfig& cfg) {
  const Atlas& atlas = conn.atlas();
  FrameVectorField h = standard_horizontal(conn, lambda);

  std::vector<std::pair<double, Frame>> traj;
  auto record = [&](double t) {
    auto part = frame_trajectory(h, frame, t, cfg);
    return part;
  };
  if (t_span.first < 0.0) {
    traj = record(t_span.first);
    std::reverse(traj.begin(), traj.end());
    traj.pop_back();
  }
  auto fwd = record(t_span.second);
  traj.insert(traj.end(), fwd.begin(), fwd.end());

  ProjectionDefect out;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const Frame& mid = traj[k].second;
    auto prev = atlas.try_transition(project(traj[k - 1].second), mid.chart);
    auto next = atlas.try_transition(project(traj[k + 1].second), mid.chart);
    if (!prev || !next) continue;
    const double dt = traj[k + 1].first - traj[k - 1].first;
    Vec fd_velocity = (next->coords - prev->coords) / dt;
    out.derivative = std::max(out.derivative, (fd_velocity - mid.g * lambda).norm());
  }

  if (lambda.norm() > 0.0 || t_span.second > t_span.first) {
    CurveSpec geo = geodesic(conn, Tangent{project(frame), frame.g * lambda}, t_span, cfg);
    for (const auto& [t, f] : traj) {
      auto [x, v] = geo.evaluate(atlas, t, f.chart);
      (void)v;
      out.geodesic = std::max(out.geodesic, (x - f.x).norm());
    }
  }
  return out;
}

std::vector<std::pair<double, Frame>> frame_trajectory(const FrameVectorField& field, const Frame& start, double t,
                                                       const IntegratorConfig& cfg) {
  std::vector<std::pair<double, Frame>> out;
  FlowOptions opts;
  opts.observer = [&](double tk, const State& st, const Mat&) { out.emplace_back(tk, to_frame(st)); };
  FlowTrace tr = flow_trace(field, to_state(start), Mat(), t, cfg, opts);
  if (tr.status == FlowStatus::HopLimit) throw Error(ErrorCode::HopLimit, "frame flow exceeded the hop limit");
  if (tr.status != FlowStatus::Ok) throw Error(ErrorCode::LeftAtlas, "frame flow left the atlas");
  return out;
}

}  // namespace affgeo
