#include "affgeo/automorphism.hpp"

#include "affgeo/finite_diff.hpp"
#include "affgeo/killing.hpp"

#include <random>
#include <tuple>

namespace affgeo {

namespace {

// Coordinates of q in `chart`, or StencilLeavesDomain if the overlap is missed.
Vec coords_in(const Atlas& atlas, const Point& q, const ChartId& chart) {
  if (q.chart == chart) return q.coords;
  auto r = atlas.try_transition(q, chart);
  if (!r) throw Error(ErrorCode::StencilLeavesDomain, "stencil image leaves chart " + chart);
  return r->coords;
}

Mat jac_in(const Atlas& atlas, const Point& image, const Mat& jac, const ChartId& chart) {
  if (image.chart == chart) return jac;
  if (!atlas.try_transition(image, chart))
    throw Error(ErrorCode::StencilLeavesDomain, "stencil image leaves chart " + chart);
  return atlas.d_transition(image, chart) * jac;
}

fd::DomainFn inside_chart(const Atlas& atlas, const ChartId& chart) {
  return [&atlas, chart](const Vec& y) { return atlas.chart(chart).contains(y); };
}

}  // namespace

Diffeo Diffeo::closed_form(std::string name, AtlasPtr atlas, ClosedMap map) {
  if (!map.map) throw Error(ErrorCode::InvalidArgument, "closed-form diffeo needs a map");
  Diffeo d(std::move(name), std::move(atlas), Kind::ClosedForm);
  d.closed_ = std::make_shared<const ClosedMap>(std::move(map));
  return d;
}

Diffeo Diffeo::flow_word(std::string name, std::vector<FlowLetter> word, const IntegratorConfig& cfg) {
  if (word.empty()) throw Error(ErrorCode::InvalidArgument, "empty flow word; use Diffeo::identity");
  AtlasPtr atlas = word.front().field.atlas_ptr();
  for (const auto& l : word)
    if (l.field.atlas_ptr() != atlas || l.field.space() != Space::Base)
      throw Error(ErrorCode::InvalidArgument, "flow word letters must be fields on one manifold");
  Diffeo d(std::move(name), std::move(atlas), Kind::FlowWord);
  d.word_ = std::move(word);
  d.cfg_ = cfg;
  return d;
}

Diffeo Diffeo::identity(AtlasPtr atlas) {
  const int n = atlas->dim();
  ClosedMap m;
  m.map = [](const Point& p) { return p; };
  m.jacobian = [n](const Point&) -> Mat { return Mat::Identity(n, n); };
  m.hessian = [n](const Point&) { return BilinearMap::zero(n, n); };
  m.inverse = m.map;
  return closed_form("id", std::move(atlas), std::move(m));
}

Point Diffeo::apply(const Point& p) const {
  if (kind_ == Kind::ClosedForm) return closed_->map(p);
  Point q = p;
  for (const auto& l : word_) q = integrate(l.field, q, l.t, cfg_);
  return q;
}

Mat Diffeo::jacobian(const Point& p) const {
  const Atlas& a = *atlas_;
  if (kind_ == Kind::ClosedForm) {
    if (closed_->jacobian) return closed_->jacobian(p);
    const ChartId target = closed_->map(p).chart;
    auto f = [this, &a, &p, &target](const Vec& x) { return coords_in(a, closed_->map(Point{p.chart, x}), target); };
    return fd::jacobian(f, p.coords, inside_chart(a, p.chart));
  }
  const int n = a.dim();
  State st{p.chart, p.coords};
  Mat w = Mat::Identity(n, n);
  for (const auto& l : word_) std::tie(st, w) = variational_flow(l.field, st, w, l.t, cfg_);
  return w;
}

BilinearMap Diffeo::hessian(const Point& p) const {
  const Atlas& a = *atlas_;
  if (kind_ == Kind::ClosedForm && closed_->hessian) return closed_->hessian(p);
  const ChartId target = apply(p).chart;
  auto inside = inside_chart(a, p.chart);
  if (kind_ == Kind::ClosedForm && !closed_->jacobian) {
    auto f = [this, &a, &p, &target](const Vec& x) { return coords_in(a, closed_->map(Point{p.chart, x}), target); };
    return fd::hessian(f, p.coords, inside);
  }
  auto jac = [this, &a, &p, &target](const Vec& x) -> Mat {
    Point q{p.chart, x};
    return jac_in(a, apply(q), jacobian(q), target);
  };
  return fd::hessian_from_jacobian(jac, p.coords, inside);
}

Tangent Diffeo::push(const Tangent& v) const { return {apply(v.base), jacobian(v.base) * v.vec}; }

Diffeo Diffeo::inverse() const {
  if (kind_ == Kind::FlowWord) {
    std::vector<FlowLetter> rev(word_.rbegin(), word_.rend());
    for (auto& l : rev) l.t = -l.t;
    return flow_word(name_ + "^-1", std::move(rev), cfg_);
  }
  if (!closed_->inverse) throw Error(ErrorCode::InvalidArgument, "closed-form diffeo " + name_ + " has no inverse");
  ClosedMap m;
  m.map = closed_->inverse;
  m.inverse = closed_->map;
  // inverse function theorem: d(f⁻¹)_p = (df_{f⁻¹(p)})⁻¹
  auto self = std::make_shared<const Diffeo>(*this);
  m.jacobian = [self](const Point& p) -> Mat {
    Point q = self->closed_->inverse(p);
    return jac_in(self->atlas(), self->apply(q), self->jacobian(q), p.chart).inverse();
  };
  return closed_form(name_ + "^-1", atlas_, std::move(m));
}

Diffeo Diffeo::compose(const Diffeo& other) const {
  if (other.atlas_ != atlas_) throw Error(ErrorCode::InvalidArgument, "composing diffeos of different manifolds");
  if (kind_ == Kind::FlowWord && other.kind_ == Kind::FlowWord) {
    std::vector<FlowLetter> w = other.word_;
    w.insert(w.end(), word_.begin(), word_.end());
    return flow_word(name_ + "*" + other.name_, std::move(w), cfg_);
  }
  auto f = std::make_shared<const Diffeo>(*this);
  auto g = std::make_shared<const Diffeo>(other);
  ClosedMap m;
  m.map = [f, g](const Point& p) { return f->apply(g->apply(p)); };
  m.jacobian = [f, g](const Point& p) -> Mat {
    Point q = g->apply(p);
    return f->jacobian(q) * g->jacobian(p);
  };
  m.hessian = [f, g](const Point& p) {
    Point q = g->apply(p);
    Mat jg = g->jacobian(p);
    return f->hessian(q).compose_right(jg, jg) + g->hessian(p).compose_left(f->jacobian(q));
  };
  const bool invertible = (kind_ == Kind::FlowWord || closed_->inverse) &&
                          (other.kind_ == Kind::FlowWord || other.closed_->inverse);
  if (invertible) {
    auto fi = std::make_shared<const Diffeo>(inverse());
    auto gi = std::make_shared<const Diffeo>(other.inverse());
    m.inverse = [fi, gi](const Point& p) { return gi->apply(fi->apply(p)); };
  }
  return closed_form(name_ + "*" + other.name_, atlas_, std::move(m));
}

Vec affine_residual(const Diffeo& f, const Connection& conn1, const Connection& conn2, const Point& point,
                    const Vec& v, const Vec& w) {
  Point y = f.apply(point);
  Mat j = f.jacobian(point);
  BilinearMap h = f.hessian(point);
  return h(v, w) + j * conn1.coefficients(point)(v, w) - conn2.coefficients(y)(j * v, j * w);
}

Frame FrameDiffeo::apply(const Frame& p) const {
  if (base_.kind() == Diffeo::Kind::ClosedForm) {
    Point x = project(p);
    Point y = base_.apply(x);
    return {y.chart, y.coords, base_.jacobian(x) * p.g};
  }
  State st = to_state(p);
  for (const auto& l : base_.word()) st = integrate(natural_lift(l.field), st, l.t, base_.config());
  return to_frame(st);
}

std::pair<Frame, FrameTangent> FrameDiffeo::push(const Frame& p, const FrameTangent& ft) const {
  const int n = static_cast<int>(p.x.size());
  if (base_.kind() == Diffeo::Kind::ClosedForm) {
    Point x = project(p);
    Point y = base_.apply(x);
    Mat j = base_.jacobian(x);
    BilinearMap h = base_.hessian(x);
    Frame fp{y.chart, y.coords, j * p.g};
    return {fp, FrameTangent{j * ft.v, h.fix_first(ft.v) * p.g + j * ft.w}};
  }
  State st = to_state(p);
  Mat w = pack(ft);
  for (const auto& l : base_.word())
    std::tie(st, w) = variational_flow(natural_lift(l.field), st, w, l.t, base_.config());
  return {to_frame(st), unpack_tangent(w.col(0), n)};
}

FrameDiffeo frame_lift(const Diffeo& f) { return FrameDiffeo(f); }

double max_killing_residual(const Connection& conn, const VectorField& field, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, killing_residual_norm(conn, field, p));
  return worst;
}

std::vector<Point> killing_samples(const VectorField& field, int per_chart, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  for (const auto& chart : field.atlas().charts()) {
    if (!field.has_chart(chart.id())) continue;
    const Vec& lo = chart.sample_lo();
    const Vec& hi = chart.sample_hi();
    int got = 0;
    for (int tries = 0; got < per_chart && tries < 100 * per_chart; ++tries) {
      Vec x(lo.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
      if (!chart.contains(x, 0.1)) continue;
      out.push_back({chart.id(), x});
      ++got;
    }
  }
  return out;
}

Diffeo exp_aut(const Connection& conn, const VectorField& field, const std::vector<Point>& samples,
               const IntegratorConfig& cfg, double tol_kill) {
  const double r = max_killing_residual(conn, field, samples);
  if (!(r <= tol_kill))
    throw Error(ErrorCode::NotKilling, "field " + field.name() + " has Killing residual " + std::to_string(r));
  return Diffeo::flow_word("exp(" + field.name() + ")", {FlowLetter{field, -1.0}}, cfg);
}

Diffeo exp_aut(const Connection& conn, const VectorField& field, const IntegratorConfig& cfg, double tol_kill) {
  return exp_aut(conn, field, killing_samples(field), cfg, tol_kill);
}

Frame orbit_point(const FrameDiffeo& fd, const Frame& p) { return fd.apply(p); }

double frame_distance(const Atlas& atlas, const Frame& a, const Frame& b) {
  StateSpace space(std::shared_ptr<const Atlas>(std::shared_ptr<const Atlas>{}, &atlas), Space::Frame);
  return state_distance(space, to_state(a), to_state(b));
}

double kappa_pullback_defect(const Connection& conn, const FrameDiffeo& fd, const Frame& frame,
                             const FrameTangent& ft, const IntegratorConfig& cfg) {
  (void)cfg;  // flow words carry their own config
  auto [fp, tft] = fd.push(frame, ft);
  KappaValue k1 = kappa(conn, fp, tft);
  KappaValue k0 = kappa(conn, frame, ft);
  return (k1.theta - k0.theta).norm() + (k1.omega - k0.omega).norm();
}

double exp_commutes_defect(const Connection& conn, const Diffeo& f, const Tangent& v, const IntegratorConfig& cfg) {
  Point a = f.apply(exp_map(conn, v, cfg));
  Point b = exp_map(conn, f.push(v), cfg);
  StateSpace space(f.atlas_ptr(), Space::Base);
  return state_distance(space, State{a.chart, a.coords}, State{b.chart, b.coords});
}

}  // namespace affgeo
