#include "affgeo/flows.hpp"

#include "affgeo/finite_diff.hpp"

#include <cmath>

namespace affgeo {

std::string_view to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::Ok: return "ok";
    case FlowStatus::LeftAtlas: return "left_atlas";
    case FlowStatus::HopLimit: return "hop_limit";
    case FlowStatus::Diverged: return "diverged";
  }
  return "unknown";
}

State StateSpace::transfer(const State& st, const ChartId& target) const {
  const int n = atlas_->dim();
  if (st.chart == target) return st;
  Point b = base(st);
  Point nb = atlas_->transition(b, target);
  State out{target, Vec(st.s.size())};
  out.s.head(n) = nb.coords;
  if (kind_ == Space::Base) return out;
  Mat dh = atlas_->d_transition(b, target);
  if (kind_ == Space::Tangent) {
    out.s.tail(n) = dh * st.s.tail(n);
  } else {
    Mat g = unflatten_rowmajor(st.s.tail(n * n), n);
    out.s.tail(n * n) = flatten_rowmajor(dh * g);
  }
  return out;
}

std::optional<State> StateSpace::try_transfer(const State& st, const ChartId& target) const {
  if (!atlas_->try_transition(base(st), target)) return std::nullopt;
  return transfer(st, target);
}

Mat StateSpace::transfer_jacobian(const State& st, const ChartId& target) const {
  const int n = atlas_->dim();
  const int dim = this->dim();
  if (st.chart == target) return Mat::Identity(dim, dim);
  Point b = base(st);
  Mat dh = atlas_->d_transition(b, target);
  Mat jac = Mat::Zero(dim, dim);
  jac.topLeftCorner(n, n) = dh;
  if (kind_ == Space::Base) return jac;
  BilinearMap d2h = atlas_->d2_transition(b, target);
  if (kind_ == Space::Tangent) {
    jac.bottomLeftCorner(n, n) = d2h.fix_second(st.s.tail(n));
    jac.bottomRightCorner(n, n) = dh;
    return jac;
  }
  Mat g = unflatten_rowmajor(st.s.tail(n * n), n);
  for (int i = 0; i < n; ++i) {
    Vec ei = Vec::Unit(n, i);
    for (int j = 0; j < n; ++j) {
      Vec d = d2h(ei, g.col(j));
      for (int k = 0; k < n; ++k) jac(n + k * n + j, i) = d[k];
    }
  }
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int bcol = 0; bcol < n; ++bcol) jac(n + k * n + bcol, n + a * n + bcol) = dh(k, a);
  return jac;
}

namespace {

struct Derivative {
  Vec ds;
  Mat dw;
};

Derivative eval_rhs(const VectorField& field, const ChartId& chart, const Vec& s, const Mat& w) {
  Derivative d{field.value(chart, s), Mat()};
  if (w.cols() > 0) d.dw = field.jacobian(chart, s) * w;
  return d;
}

// Endpoint depths can both be positive while the chord passes through a hole
// (a removed point, a coordinate singularity). Search the chord for its
// shallowest point; only called near the chart edge, where this can matter.
bool chord_tunnels(const Chart& chart, const Vec& a, const Vec& b) {
  auto depth = [&](double s) { return chart.depth(a + s * (b - a)); };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (depth(m1) < depth(m2)) hi = m2;
    else lo = m1;
  }
  return depth(0.5 * (lo + hi)) <= 1e-12;
}

}  // namespace

FlowTrace flow_trace(const VectorField& field, const State& start, const Mat& tangent, double t,
                     const IntegratorConfig& cfg, const FlowOptions& opts) {
  if (!(cfg.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "integrator step must be positive");
  const StateSpace space(field.atlas_ptr(), field.space());
  const Atlas& atlas = field.atlas();
  if (start.s.size() != space.dim()) throw Error(ErrorCode::InvalidArgument, "state dimension mismatch");
  if (!atlas.contains(space.base(start))) throw Error(ErrorCode::LeftAtlas, "start point is outside its chart");

  const auto allowed = [&field](const ChartId& c) { return field.has_chart(c); };
  FlowTrace tr{start, tangent, 0.0, 0, FlowStatus::Ok};
  const bool variational = tangent.cols() > 0;

  // Move off a chart the field does not cover before the first step.
  if (!field.has_chart(start.chart)) {
    auto target = atlas.best_chart(space.base(start), 0.0, allowed);
    if (!target) throw Error(ErrorCode::ChartMissing, "field " + field.name() + " undefined near start point");
    if (variational) tr.tangent = space.transfer_jacobian(tr.end, *target) * tr.tangent;
    tr.end = space.transfer(tr.end, *target);
  }
  if (opts.observer) opts.observer(0.0, tr.end, tr.tangent);
  if (t == 0.0) return tr;

  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / cfg.step - 1e-9)));
  const double h = t / static_cast<double>(steps);

  State cur = tr.end;
  Mat w = tr.tangent;
  bool redone = false;
  for (long k = 0; k < steps; ++k) {
    const ChartId c = cur.chart;
    Derivative k1 = eval_rhs(field, c, cur.s, w);
    Derivative k2 = eval_rhs(field, c, cur.s + 0.5 * h * k1.ds, variational ? Mat(w + 0.5 * h * k1.dw) : w);
    Derivative k3 = eval_rhs(field, c, cur.s + 0.5 * h * k2.ds, variational ? Mat(w + 0.5 * h * k2.dw) : w);
    Derivative k4 = eval_rhs(field, c, cur.s + h * k3.ds, variational ? Mat(w + h * k3.dw) : w);
    State next{c, cur.s + (h / 6.0) * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds)};
    Mat wnext = variational ? Mat(w + (h / 6.0) * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw)) : w;

    if (!next.s.allFinite() || (variational && !wnext.allFinite())) {
      tr.status = FlowStatus::LeftAtlas;
      return tr;
    }

    Point b = space.base(next);
    const Chart& chart = atlas.chart(c);
    const int n = atlas.dim();
    if (!chart.contains(b.coords, cfg.rechart_margin) && chart.contains(b.coords) &&
        chord_tunnels(chart, cur.s.head(n), b.coords)) {
      // redo the step from another chart, or give up
      auto other = atlas.best_chart(space.base(cur), 0.0, [&](const ChartId& id) { return id != c && allowed(id); });
      if (redone || !other) {
        tr.status = FlowStatus::LeftAtlas;
        return tr;
      }
      if (++tr.hops > cfg.max_hops) {
        tr.status = FlowStatus::HopLimit;
        return tr;
      }
      if (variational) w = space.transfer_jacobian(cur, *other) * w;
      cur = space.transfer(cur, *other);
      redone = true;
      --k;
      continue;
    }
    redone = false;
    if (!chart.contains(b.coords, cfg.rechart_margin)) {
      std::optional<ChartId> target = atlas.best_chart(b, cfg.rechart_margin, allowed);
      if (!target && !chart.contains(b.coords)) target = atlas.best_chart(b, 0.0, allowed);
      if (!target && !chart.contains(b.coords)) {
        tr.status = FlowStatus::LeftAtlas;
        return tr;
      }
      if (target && *target != c) {
        if (++tr.hops > cfg.max_hops) {
          tr.status = FlowStatus::HopLimit;
          return tr;
        }
        if (variational) wnext = space.transfer_jacobian(next, *target) * wnext;
        next = space.transfer(next, *target);
      }
    }

    cur = std::move(next);
    w = std::move(wnext);
    const double tk = (k + 1 == steps) ? t : h * static_cast<double>(k + 1);
    if (opts.diverged && opts.diverged(cur)) {
      tr.status = FlowStatus::Diverged;
      return tr;
    }
    tr.end = cur;
    tr.tangent = w;
    tr.reached = tk;
    if (opts.observer) opts.observer(tk, cur, w);
  }
  return tr;
}

namespace {

void raise_on_failure(const FlowTrace& tr, const VectorField& field) {
  switch (tr.status) {
    case FlowStatus::Ok: return;
    case FlowStatus::HopLimit:
      throw Error(ErrorCode::HopLimit, "flow of " + field.name() + " exceeded the chart-hop limit at t=" +
                                           std::to_string(tr.reached));
    default:
      throw Error(ErrorCode::LeftAtlas, "flow of " + field.name() + " left the atlas at t=" +
                                            std::to_string(tr.reached));
  }
}

}  // namespace

State integrate(const VectorField& field, const State& start, double t, const IntegratorConfig& cfg) {
  FlowTrace tr = flow_trace(field, start, Mat(), t, cfg);
  raise_on_failure(tr, field);
  return tr.end;
}

Point integrate(const VectorField& field, const Point& start, double t, const IntegratorConfig& cfg) {
  State end = integrate(field, State{start.chart, start.coords}, t, cfg);
  return {end.chart, end.s.head(field.base_dim())};
}

std::pair<State, Mat> variational_flow(const VectorField& field, const State& start, const Mat& w0, double t,
                                       const IntegratorConfig& cfg) {
  FlowTrace tr = flow_trace(field, start, w0, t, cfg);
  raise_on_failure(tr, field);
  return {tr.end, tr.tangent};
}

std::pair<Point, Vec> variational_flow(const VectorField& field, const Point& start, const Vec& w0, double t,
                                       const IntegratorConfig& cfg) {
  auto [end, w] = variational_flow(field, State{start.chart, start.coords}, Mat(w0), t, cfg);
  return {Point{end.chart, end.s.head(field.base_dim())}, w.col(0)};
}

double state_distance(const StateSpace& space, const State& a, const State& b) {
  if (auto bb = space.try_transfer(b, a.chart)) return (a.s - bb->s).norm();
  if (auto aa = space.try_transfer(a, b.chart)) return (aa->s - b.s).norm();
  throw Error(ErrorCode::NoCommonChart, "states in charts " + a.chart + " and " + b.chart + " share no chart");
}

double commutation_defect(const VectorField& xi, const VectorField& eta, const State& start, double s, double t,
                          const IntegratorConfig& cfg) {
  State a = integrate(xi, integrate(eta, start, t, cfg), s, cfg);
  State b = integrate(eta, integrate(xi, start, s, cfg), t, cfg);
  return state_distance(StateSpace(xi.atlas_ptr(), xi.space()), a, b);
}

double lie_derivative_defect(const VectorField& field, const VectorField& other, const State& at,
                             const IntegratorConfig& cfg, double t) {
  const StateSpace space(field.atlas_ptr(), field.space());
  State back = integrate(field, at, -t, cfg);
  Vec y_back = other(back);
  auto [fwd, pushed] = variational_flow(field, back, Mat(y_back), t, cfg);
  Vec pushed_here = pushed.col(0);
  if (fwd.chart != at.chart) pushed_here = space.transfer_jacobian(fwd, at.chart) * pushed_here;
  return (pushed_here - other(at)).norm() / std::abs(t);
}

double parameter_flow_derivative_defect(const ParametrizedField& family, const State& p,
                                        const IntegratorConfig& cfg) {
  const int m = family.param_dim;
  const Vec zero = Vec::Zero(m);
  const double eps = fd::step1(zero);
  Mat fd_jac;
  Mat exact;
  for (int i = 0; i < m; ++i) {
    Vec e = Vec::Unit(m, i);
    VectorField plus = family.member(eps * e);
    VectorField minus = family.member(-eps * e);
    const StateSpace space(plus.atlas_ptr(), plus.space());
    State sp = integrate(plus, p, 1.0, cfg);
    State sm = integrate(minus, p, 1.0, cfg);
    sp = space.transfer(sp, p.chart);
    sm = space.transfer(sm, p.chart);
    Vec col = (sp.s - sm.s) / (2.0 * eps);
    Vec direct = family.member(e)(p);
    if (i == 0) {
      fd_jac.resize(col.size(), m);
      exact.resize(direct.size(), m);
    }
    fd_jac.col(i) = col;
    exact.col(i) = direct;
  }
  return operator_norm(fd_jac - exact);
}

}  // namespace affgeo
