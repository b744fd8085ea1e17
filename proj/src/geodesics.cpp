#include "affgeo/geodesics.hpp"

#include "affgeo/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace affgeo {

VectorField geodesic_spray(const Connection& conn) {
  VectorField spray("geodesic_spray[" + conn.name() + "]", conn.atlas_ptr(), Space::Tangent);
  const int n = conn.atlas().dim();
  auto shared = std::make_shared<const Connection>(conn);
  for (const auto& chart : conn.atlas().charts()) {
    if (!conn.has_chart(chart.id())) continue;
    const ChartId id = chart.id();
    LocalField lf;
    lf.value = [c = shared, id, n](const Vec& s) -> Vec {
      Vec out(2 * n);
      Vec v = s.tail(n);
      out.head(n) = v;
      out.tail(n) = c->coefficients(id, s.head(n))(v, v);
      return out;
    };
    lf.jacobian = [c = shared, id, n](const Vec& s) -> Mat {
      Vec x = s.head(n), v = s.tail(n);
      BilinearMap b = c->coefficients(id, x);
      auto grad = c->gradient(id, x);
      Mat jac = Mat::Zero(2 * n, 2 * n);
      jac.topRightCorner(n, n) = Mat::Identity(n, n);
      for (int i = 0; i < n; ++i) jac.block(n, i, n, 1) = grad[i](v, v);
      jac.bottomRightCorner(n, n) = b.fix_second(v) + b.fix_first(v);
      return jac;
    };
    spray.set_local(id, std::move(lf));
  }
  return spray;
}

CurveSpec::CurveSpec(std::vector<CurveSample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a curve needs at least two samples");
  for (std::size_t i = 1; i < samples_.size(); ++i)
    if (!(samples_[i].t > samples_[i - 1].t))
      throw Error(ErrorCode::InvalidArgument, "curve sample times must be strictly increasing");
}

CurveSpec CurveSpec::from_function(const ChartId& chart, const std::function<std::pair<Vec, Vec>(double)>& curve,
                                   double t0, double t1, double dt) {
  const long steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
  std::vector<CurveSample> samples;
  samples.reserve(steps + 1);
  for (long k = 0; k <= steps; ++k) {
    const double t = (k == steps) ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(steps);
    auto [x, v] = curve(t);
    samples.push_back({t, Point{chart, std::move(x)}, std::move(v)});
  }
  return CurveSpec(std::move(samples));
}

std::size_t CurveSpec::interval(double t) const {
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double value, const CurveSample& s) { return value < s.t; });
  std::size_t idx = (it == samples_.begin()) ? 0 : static_cast<std::size_t>(it - samples_.begin()) - 1;
  return std::min(idx, samples_.size() - 2);
}

namespace {

std::pair<Vec, Vec> sample_in_chart(const Atlas& atlas, const CurveSample& s, const ChartId& chart) {
  if (s.point.chart == chart) return {s.point.coords, s.velocity};
  auto p = atlas.try_transition(s.point, chart);
  if (!p) throw Error(ErrorCode::LeftAtlas, "curve sample cannot be expressed in chart " + chart);
  return {p->coords, atlas.d_transition(s.point, chart) * s.velocity};
}

}  // namespace

std::pair<Vec, Vec> CurveSpec::evaluate(const Atlas& atlas, double t, const ChartId& chart) const {
  const std::size_t i = interval(t);
  const CurveSample& a = samples_[i];
  const CurveSample& b = samples_[i + 1];
  auto [p0, m0] = sample_in_chart(atlas, a, chart);
  auto [p1, m1] = sample_in_chart(atlas, b, chart);
  const double dt = b.t - a.t;
  const double s = (t - a.t) / dt;
  const double s2 = s * s, s3 = s2 * s;
  Vec pos = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * dt * m0 + (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * dt * m1;
  Vec vel = ((6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * dt * m0 + (-6 * s2 + 6 * s) * p1 +
             (3 * s2 - 2 * s) * dt * m1) /
            dt;
  return {std::move(pos), std::move(vel)};
}

Tangent CurveSpec::velocity_at(const Atlas& atlas, double t) const {
  const ChartId& chart = samples_[interval(t)].point.chart;
  auto [x, v] = evaluate(atlas, t, chart);
  return {Point{chart, std::move(x)}, std::move(v)};
}

namespace {

State tangent_state(const Tangent& v) {
  const auto n = v.vec.size();
  State st{v.base.chart, Vec(2 * n)};
  st.s << v.base.coords, v.vec;
  return st;
}

void raise_on(FlowStatus status, double reached, const std::string& what) {
  if (status == FlowStatus::HopLimit)
    throw Error(ErrorCode::HopLimit, what + " exceeded the chart-hop limit at t=" + std::to_string(reached));
  if (status != FlowStatus::Ok)
    throw Error(ErrorCode::LeftAtlas, what + " left the atlas at t=" + std::to_string(reached));
}

std::vector<CurveSample> trace_geodesic(const VectorField& spray, const State& start, double t,
                                        const IntegratorConfig& cfg) {
  const int n = spray.base_dim();
  std::vector<CurveSample> out;
  FlowOptions opts;
  opts.observer = [&](double tk, const State& st, const Mat&) {
    out.push_back({tk, Point{st.chart, st.s.head(n)}, st.s.tail(n)});
  };
  FlowTrace tr = flow_trace(spray, start, Mat(), t, cfg, opts);
  raise_on(tr.status, tr.reached, "geodesic");
  return out;
}

}  // namespace

CurveSpec geodesic(const Connection& conn, const Tangent& v0, TimeSpan t_span, const IntegratorConfig& cfg) {
  if (!(t_span.first <= 0.0 && 0.0 <= t_span.second && t_span.first < t_span.second))
    throw Error(ErrorCode::InvalidArgument, "geodesic time span must contain 0");
  VectorField spray = geodesic_spray(conn);
  State start = tangent_state(v0);
  std::vector<CurveSample> samples;
  if (t_span.first < 0.0) {
    samples = trace_geodesic(spray, start, t_span.first, cfg);
    std::reverse(samples.begin(), samples.end());
    samples.pop_back();  // t = 0 is recorded again by the forward pass
  }
  if (t_span.second > 0.0) {
    auto fwd = trace_geodesic(spray, start, t_span.second, cfg);
    samples.insert(samples.end(), fwd.begin(), fwd.end());
  } else {
    samples.push_back({0.0, v0.base, v0.vec});
  }
  return CurveSpec(std::move(samples));
}

Point exp_map(const Connection& conn, const Tangent& v, double t, const IntegratorConfig& cfg) {
  VectorField spray = geodesic_spray(conn);
  FlowTrace tr = flow_trace(spray, tangent_state(v), Mat(), t, cfg);
  raise_on(tr.status, tr.reached, "geodesic");
  return {tr.end.chart, tr.end.s.head(conn.atlas().dim())};
}

Point exp_map(const Connection& conn, const Tangent& v, const IntegratorConfig& cfg) {
  return exp_map(conn, v, 1.0, cfg);
}

ExpInverseResult exp_inverse_solve(const Connection& conn, const Point& x, const Point& y,
                                   const IntegratorConfig& cfg) {
  constexpr int kMaxIterations = 50;
  constexpr double kTolerance = 1e-10;
  const Atlas& atlas = conn.atlas();
  const int n = atlas.dim();

  auto shoot = [&](const Vec& v) -> Vec {
    Point end = exp_map(conn, Tangent{x, v}, cfg);
    auto in_y = atlas.try_transition(end, y.chart);
    if (!in_y) throw Error(ErrorCode::NoConvergence, "shooting left the chart of the target point");
    return in_y->coords;
  };

  Vec v = Vec::Zero(n);
  if (auto yx = atlas.try_transition(y, x.chart)) v = yx->coords - x.coords;

  for (int iter = 0; iter <= kMaxIterations; ++iter) {
    Vec r = shoot(v) - y.coords;
    if (r.norm() <= kTolerance) return {Tangent{x, v}, iter, r.norm()};
    if (iter == kMaxIterations) break;
    const double h = fd::step1(v);
    Mat jac(n, n);
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Unit(n, i) * h;
      jac.col(i) = (shoot(v + e) - shoot(v - e)) / (2.0 * h);
    }
    v -= jac.fullPivLu().solve(r);
    if (!v.allFinite()) break;
  }
  throw Error(ErrorCode::NoConvergence, "exp inverse did not converge; target likely outside a normal neighborhood");
}

Tangent exp_inverse(const Connection& conn, const Point& x, const Point& y, const IntegratorConfig& cfg) {
  return exp_inverse_solve(conn, x, y, cfg).v;
}

Tangent parallel_transport(const Connection& conn, const CurveSpec& curve, double t0, double t1, const Vec& v,
                           const IntegratorConfig& cfg) {
  const Atlas& atlas = conn.atlas();
  ChartId chart = curve.samples()[curve.interval(t0)].point.chart;
  Vec gamma = v;
  if (t0 == t1) return {Point{chart, curve.evaluate(atlas, t0, chart).first}, gamma};

  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t1 - t0) / cfg.step - 1e-9)));
  const double h = (t1 - t0) / static_cast<double>(steps);

  auto rhs = [&](double t, const Vec& g) -> Vec {
    auto [x, dx] = curve.evaluate(atlas, t, chart);
    return conn.coefficients(chart, x)(g, dx);
  };

  for (long k = 0; k < steps; ++k) {
    const double t = t0 + h * static_cast<double>(k);
    const ChartId& seg_chart = curve.samples()[curve.interval(t + 0.5 * h)].point.chart;
    if (seg_chart != chart) {
      Point here{chart, curve.evaluate(atlas, t, chart).first};
      Tangent moved = atlas.recharter_tangent(Tangent{here, gamma}, seg_chart);
      gamma = moved.vec;
      chart = seg_chart;
    }
    Vec k1 = rhs(t, gamma);
    Vec k2 = rhs(t + 0.5 * h, gamma + 0.5 * h * k1);
    Vec k3 = rhs(t + 0.5 * h, gamma + 0.5 * h * k2);
    Vec k4 = rhs(t + h, gamma + h * k3);
    gamma += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!gamma.allFinite()) throw Error(ErrorCode::LeftAtlas, "parallel transport diverged");
  }
  return {Point{chart, curve.evaluate(atlas, t1, chart).first}, gamma};
}

CompletenessReport completeness_probe(const Connection& conn, const std::vector<Tangent>& seeds, double horizon,
                                      const IntegratorConfig& cfg) {
  constexpr double kDivergence = 1e8;
  const int n = conn.atlas().dim();
  VectorField spray = geodesic_spray(conn);
  FlowOptions opts;
  opts.diverged = [n](const State& st) { return !(st.s.tail(n).norm() <= kDivergence); };

  CompletenessReport report;
  report.horizon = horizon;
  for (const auto& seed : seeds) {
    ProbeSeedResult r;
    r.seed = seed;
    FlowTrace fwd = flow_trace(spray, tangent_state(seed), Mat(), horizon, cfg, opts);
    FlowTrace bwd = flow_trace(spray, tangent_state(seed), Mat(), -horizon, cfg, opts);
    r.forward = fwd.status;
    r.backward = bwd.status;
    r.reached_forward = std::abs(fwd.reached);
    r.reached_backward = std::abs(bwd.reached);
    if (r.forward != FlowStatus::Ok || r.backward != FlowStatus::Ok) report.complete_up_to_horizon = false;
    report.seeds.push_back(std::move(r));
  }
  return report;
}

}  // namespace affgeo
