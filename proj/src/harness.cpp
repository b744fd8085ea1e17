#include "affgeo/harness.hpp"

#include "affgeo/automorphism.hpp"
#include "affgeo/catalog.hpp"
#include "affgeo/frame_bundle.hpp"
#include "affgeo/geodesics.hpp"
#include "affgeo/killing.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace affgeo::harness {

namespace {

constexpr double kPi = std::numbers::pi;

// ---- evaluation context -------------------------------------------------------

struct Ctx {
  const Scenario& sc;
  AtlasPtr atlas;
  Connection conn;
  IntegratorConfig cfg;
  std::mt19937_64 rng;
  const Json& params;

  int n() const { return atlas->dim(); }

  double num(const char* key, double def) const { return params.contains(key) ? params[key].get<double>() : def; }
  int count(const char* key, int def) const { return params.contains(key) ? params[key].get<int>() : def; }

  std::vector<VectorField> fields() const {
    std::vector<std::string> names = sc.fields;
    if (params.contains("fields")) names = params["fields"].get<std::vector<std::string>>();
    if (names.empty()) throw Error(ErrorCode::InvalidArgument, "check needs at least one field");
    std::vector<VectorField> out;
    for (const auto& name : names) out.push_back(catalog::field(name, atlas));
    return out;
  }

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

  Vec random_vec(int dim, double scale) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

  /// Uniform in a chart's sample box, inside the 10% safety margin.
  Point random_point(const std::string& only_chart = {}) {
    const auto& charts = atlas->charts();
    for (int tries = 0; tries < 10000; ++tries) {
      const Chart& c = only_chart.empty()
                           ? charts[std::uniform_int_distribution<std::size_t>(0, charts.size() - 1)(rng)]
                           : atlas->chart(only_chart);
      Vec x(n());
      for (int i = 0; i < n(); ++i) x[i] = uniform(c.sample_lo()[i], c.sample_hi()[i]);
      if (c.contains(x, 0.1)) return {c.id(), x};
    }
    throw Error(ErrorCode::InvalidArgument, "could not draw a sample point");
  }

  Frame random_frame(const std::string& only_chart = {}) {
    Point p = random_point(only_chart);
    Mat g;
    do {
      g = Mat::Identity(n(), n()) + 0.2 * Mat(random_vec(n() * n(), 1.0).reshaped(n(), n()));
    } while (g.determinant() < 0.2);
    return {p.chart, p.coords, g};
  }
};

struct Outcome {
  double worst = 0.0;
  int samples = 0;
};

void track(Outcome& o, double value) {
  o.worst = std::max(o.worst, value);
  ++o.samples;
}

// ---- independent oracles -------------------------------------------------------

bool is_sphere(const Ctx& c) { return c.atlas->name() == "sphere"; }

// Riemannian length in the catalog metrics (flat: Euclidean in Cartesian charts).
double metric_norm(const Ctx& c, const Point& p, const Vec& v) {
  const std::string& m = c.atlas->name();
  if (m == "sphere") return (catalog::sphere_embed_jacobian(p.chart, p.coords) * v).norm();
  if (m == "halfplane") return v.norm() / p.coords[1];
  if (p.chart == "pol") return std::hypot(v[0], p.coords[0] * v[1]);
  return v.norm();
}

// Point and velocity in an ambient Cartesian picture where geodesics are known.
std::pair<Vec, Vec> ambient(const Ctx& c, const Point& p, const Vec& v) {
  const std::string& m = c.atlas->name();
  if (m == "sphere") return {catalog::sphere_embed(p.chart, p.coords), catalog::sphere_embed_jacobian(p.chart, p.coords) * v};
  if (m == "plane_polar" && p.chart == "pol") {
    return {c.atlas->transition(p, "cart").coords, c.atlas->d_transition(p, "cart") * v};
  }
  if (m == "plane" || m == "flat3" || m == "plane_polar" || m == "disk" || m == "punctured_disk") return {p.coords, v};
  throw Error(ErrorCode::InvalidArgument, "no closed-form geodesic oracle on " + m);
}

// Great circle on the sphere, straight line otherwise.
Vec geodesic_oracle(const Ctx& c, const Vec& x0, const Vec& v0, double t) {
  if (!is_sphere(c)) return x0 + t * v0;
  const double s = v0.norm();
  if (s == 0.0) return x0;
  return std::cos(s * t) * x0 + std::sin(s * t) * v0 / s;
}

Vec normalize_metric(const Ctx& c, const Point& p, Vec v, double length = 1.0) {
  return v * (length / metric_norm(c, p, v));
}

std::vector<Point> sample_points(Ctx& c, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(c.random_point());
  return out;
}

// ---- checks ---------------------------------------------------------------------

Outcome check_chart_roundtrip(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 100);
  for (int k = 0; k < samples; ++k) {
    Point p = c.random_point();
    Vec v = c.random_vec(c.n(), 1.0);
    for (const auto& other : c.atlas->charts()) {
      if (other.id() == p.chart) continue;
      auto q = c.atlas->try_transition(p, other.id());
      if (!q) continue;
      Point back = c.atlas->transition(*q, p.chart);
      Tangent tv = c.atlas->recharter_tangent(c.atlas->recharter_tangent({p, v}, other.id()), p.chart);
      track(o, std::max((back.coords - p.coords).norm(), (tv.vec - v).norm() / v.norm()));
    }
  }
  return o;
}

Outcome check_change_of_variable(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 100);
  int guard = 0;
  while (o.samples < samples && ++guard < 100 * samples) {
    Point p = c.random_point();
    Vec v = c.random_vec(c.n(), 1.0), w = c.random_vec(c.n(), 1.0);
    for (const auto& other : c.atlas->charts()) {
      if (other.id() == p.chart || !c.atlas->try_transition(p, other.id(), 0.05)) continue;
      track(o, change_of_variable_residual(c.conn, p, v, w, p.chart, other.id()));
    }
  }
  if (o.samples == 0) throw Error(ErrorCode::NotInOverlap, "atlas has no chart overlaps to test");
  return o;
}

Outcome check_flat_closed_form(Ctx& c) {
  const std::string& m = c.atlas->name();
  if (m != "plane" && m != "flat3") throw Error(ErrorCode::InvalidArgument, "flat_closed_form needs plane or flat3");
  Outcome o;
  const double tmax = c.num("t_max", 10.0);
  const int samples = c.count("samples", 5);
  const int n = c.n();
  for (int k = 0; k < samples; ++k) {
    Point p = c.random_point();
    Vec v = c.random_vec(n, 1.0);
    CurveSpec geo = geodesic(c.conn, {p, v}, {-tmax, tmax}, c.cfg);
    for (const auto& s : geo.samples()) track(o, (s.point.coords - (p.coords + s.t * v)).norm());
    track(o, (exp_map(c.conn, {p, v}, c.cfg).coords - (p.coords + v)).norm());
    // transport around a circle of radius 1 leaves vectors fixed
    Vec x0 = p.coords;
    CurveSpec loop = CurveSpec::from_function(
        p.chart,
        [&](double t) {
          Vec x = x0, dx = Vec::Zero(n);
          x[0] += std::cos(t) - 1.0;
          x[1] += std::sin(t);
          dx[0] = -std::sin(t);
          dx[1] = std::cos(t);
          return std::make_pair(x, dx);
        },
        0.0, 2.0 * kPi, c.cfg.step);
    Vec w = c.random_vec(n, 1.0);
    track(o, (parallel_transport(c.conn, loop, 0.0, 2.0 * kPi, w, c.cfg).vec - w).norm());
    // exp_aut of translation and rotation: x -> x − e1 and x -> R(−1) x
    Diffeo tr = exp_aut(c.conn, catalog::field("e1", c.atlas), c.cfg);
    track(o, (tr.apply(p).coords - (p.coords - Vec::Unit(n, 0))).norm());
    const std::string rot = m == "plane" ? "rotation" : "rotation_z";
    Diffeo rf = exp_aut(c.conn, catalog::field(rot, c.atlas), c.cfg);
    Vec expect = p.coords;
    expect[0] = std::cos(1.0) * p.coords[0] + std::sin(1.0) * p.coords[1];
    expect[1] = -std::sin(1.0) * p.coords[0] + std::cos(1.0) * p.coords[1];
    track(o, (rf.apply(p).coords - expect).norm());
    // linear field x -> A x: exp_aut is x -> e^{-A} x
    VectorField lin = catalog::field("linear", c.atlas);
    Mat a = lin.jacobian(p.chart, p.coords);
    Diffeo lf = exp_aut(c.conn, lin, c.cfg);
    track(o, (lf.apply(p).coords - Mat((-a).exp()) * p.coords).norm());
  }
  return o;
}

Outcome check_geodesic_closed_form(Ctx& c) {
  Outcome o;
  const double tmax = c.num("t_max", 2.0 * kPi);
  const int samples = c.count("samples", 5);
  for (int k = 0; k < samples; ++k) {
    Point p = c.random_point();
    Vec v = normalize_metric(c, p, c.random_vec(c.n(), 1.0), c.uniform(0.5, 1.5));
    auto [x0, v0] = ambient(c, p, v);
    CurveSpec geo = geodesic(c.conn, {p, v}, {0.0, tmax}, c.cfg);
    for (const auto& s : geo.samples())
      track(o, (ambient(c, s.point, s.velocity).first - geodesic_oracle(c, x0, v0, s.t)).norm());
  }
  return o;
}

// unit-speed equator geodesic, N chart
double equator_return_error(Ctx& c, double step) {
  IntegratorConfig cfg = c.cfg;
  cfg.step = step;
  Point p{"N", (Vec(2) << 1.0, 0.0).finished()};
  Vec v = (Vec(2) << 0.0, 1.0).finished();  // |u| = 1: conformal factor 1
  Point end = exp_map(c.conn, {p, v}, 2.0 * kPi, cfg);
  return (catalog::sphere_embed(end.chart, end.coords) - catalog::sphere_embed(p.chart, p.coords)).norm();
}

Outcome check_geodesic_periodicity(Ctx& c) {
  if (!is_sphere(c)) throw Error(ErrorCode::InvalidArgument, "geodesic_periodicity needs the sphere");
  return {equator_return_error(c, c.cfg.step), 1};
}

Outcome check_geodesic_convergence(Ctx& c) {
  if (!is_sphere(c)) throw Error(ErrorCode::InvalidArgument, "geodesic_convergence needs the sphere");
  const double h = c.num("coarse_step", 2e-2);
  const double e1 = equator_return_error(c, h), e2 = equator_return_error(c, h / 2.0);
  return {std::log2(e1 / e2), 2};
}

Outcome check_holonomy(Ctx& c) {
  if (!is_sphere(c)) throw Error(ErrorCode::InvalidArgument, "holonomy needs the sphere");
  std::vector<double> thetas{kPi / 6, kPi / 4, kPi / 3};
  if (c.params.contains("theta0")) thetas = c.params["theta0"].get<std::vector<double>>();
  Outcome o;
  for (double th : thetas) {
    const double rho = std::tan(th / 2.0);
    CurveSpec loop = CurveSpec::from_function(
        "N",
        [rho](double t) {
          Vec x = (Vec(2) << rho * std::cos(t), rho * std::sin(t)).finished();
          Vec dx = (Vec(2) << -rho * std::sin(t), rho * std::cos(t)).finished();
          return std::make_pair(x, dx);
        },
        0.0, 2.0 * kPi, c.cfg.step);
    Vec v = (Vec(2) << 1.0, 0.0).finished();
    Vec got = parallel_transport(c.conn, loop, 0.0, 2.0 * kPi, v, c.cfg).vec;
    // conformal chart: the holonomy is a plain rotation of the coordinate vector
    const double a = -2.0 * kPi * std::cos(th);
    Vec expect = (Vec(2) << std::cos(a) * v[0] - std::sin(a) * v[1], std::sin(a) * v[0] + std::cos(a) * v[1]).finished();
    track(o, (got - expect).norm());
  }
  return o;
}

Outcome check_horizontal_projection(Ctx& c) {
  Outcome o;
  const double tmax = c.num("t_max", 2.0 * kPi);
  const int samples = c.count("samples", 2);
  const std::string part = c.params.value("part", std::string("both"));
  for (int k = 0; k < samples; ++k) {
    Frame f = c.random_frame();
    Vec lambda = c.random_vec(c.n(), 1.0);
    // keep |gλ| ≈ 1 in the metric so the sweep covers a full great circle
    lambda *= 1.0 / metric_norm(c, project(f), f.g * lambda);
    ProjectionDefect d = horizontal_projection_defect(c.conn, lambda, f, {0.0, tmax}, c.cfg);
    double value = part == "derivative" ? d.derivative : part == "geodesic" ? d.geodesic : std::max(d.derivative, d.geodesic);
    track(o, value);
  }
  return o;
}

Outcome check_killing_residual(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 100);
  for (const auto& f : c.fields())
    for (const auto& p : sample_points(c, samples)) track(o, killing_residual_norm(c.conn, f, p));
  return o;
}

// lower bound: worst = smallest per-field maximum residual
Outcome check_nonaffine_detect(Ctx& c) {
  Outcome o{std::numeric_limits<double>::infinity(), 0};
  const int samples = c.count("samples", 100);
  for (const auto& f : c.fields()) {
    double best = 0.0;
    for (const auto& p : sample_points(c, samples)) {
      best = std::max(best, killing_residual_norm(c.conn, f, p));
      ++o.samples;
    }
    o.worst = std::min(o.worst, best);
  }
  return o;
}

// worst = number of fields on which the two Killing verdicts disagree
Outcome check_lift_equivalence(Ctx& c) {
  Outcome o;
  const double thr_res = c.num("residual_threshold", 1e-8);
  const double thr_comm = c.num("commutation_threshold", 1e-4);
  const double s = c.num("s", 0.25), t = c.num("t", 0.25);
  const int samples = c.count("samples", 20);
  const int flows = c.count("flow_samples", 3);
  for (const auto& f : c.fields()) {
    double res = 0.0, comm = 0.0;
    for (const auto& p : sample_points(c, samples)) res = std::max(res, killing_residual_norm(c.conn, f, p));
    for (int k = 0; k < flows; ++k) {
      Frame fr = c.random_frame();
      // stay well inside the chart so the composite flows do not leave it
      Point deep = c.random_point();
      fr.chart = deep.chart;
      fr.x = deep.coords;
      Vec lambda = 0.5 * c.random_vec(c.n(), 1.0);
      comm = std::max(comm, lift_commutation_defect(c.conn, f, lambda, fr, s, t, c.cfg));
    }
    o.worst += ((res <= thr_res) != (comm <= thr_comm)) ? 1.0 : 0.0;
    o.samples += samples + flows;
  }
  return o;
}

Outcome check_bracket_structure(Ctx& c) {
  std::vector<std::array<std::string, 3>> triples;
  if (c.params.contains("triples")) {
    for (const auto& t : c.params["triples"]) triples.push_back({t[0], t[1], t[2]});
  } else if (is_sphere(c)) {
    triples = {{"L1", "L2", "L3"}, {"L2", "L3", "L1"}, {"L3", "L1", "L2"}};
  } else {
    throw Error(ErrorCode::InvalidArgument, "bracket_structure needs 'triples' off the sphere");
  }
  Outcome o;
  const int samples = c.count("samples", 50);
  for (const auto& [a, b, r] : triples) {
    VectorField br = bracket(catalog::field(a, c.atlas), catalog::field(b, c.atlas));
    for (const auto& p : sample_points(c, samples)) {
      Vec expect = r == "0" ? Vec::Zero(c.n()) : catalog::field(r, c.atlas)(p);
      track(o, (br(p) - expect).norm());
    }
  }
  return o;
}

Outcome check_lift_homomorphism(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 20);
  auto fields = c.fields();
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      FrameVectorField lhs = natural_lift(bracket(fields[i], fields[j]));
      FrameVectorField rhs = bracket(natural_lift(fields[i]), natural_lift(fields[j]));
      for (int k = 0; k < samples; ++k) {
        State st = to_state(c.random_frame());
        track(o, (lhs(st) - rhs(st)).norm());
      }
    }
  return o;
}

Outcome check_killing_extension(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 3);
  const double dist = c.num("distance", 1.0);
  for (const auto& f : c.fields())
    for (int k = 0; k < samples; ++k) {
      Point x = c.random_point();
      Vec v = normalize_metric(c, x, c.random_vec(c.n(), 1.0), dist);
      HorizontalPath path(x);
      path.leg(v, 1.0);
      Tangent ext = extend_killing(c.conn, ev_embedding(c.conn, f, x), path, c.cfg);
      track(o, (ext.vec - f(ext.base)).norm());
    }
  return o;
}

Outcome check_extension_linearity(Ctx& c) {
  Outcome o;
  auto fields = c.fields();
  const int samples = c.count("samples", 3);
  for (int k = 0; k < samples; ++k) {
    Point x = c.random_point();
    HorizontalPath path(x);
    path.leg(normalize_metric(c, x, c.random_vec(c.n(), 1.0)), 0.6).move(Mat::Identity(c.n(), c.n()) * 1.3);
    path.leg(c.random_vec(c.n(), 0.5), 0.5);
    KillingSeed s1 = ev_embedding(c.conn, fields[0], x);
    KillingSeed s2 = ev_embedding(c.conn, fields[fields.size() > 1 ? 1 : 0], x);
    const double a = c.uniform(-2.0, 2.0);
    Vec lhs = extend_killing(c.conn, a * s1 + s2, path, c.cfg).vec;
    Vec rhs = a * extend_killing(c.conn, s1, path, c.cfg).vec + extend_killing(c.conn, s2, path, c.cfg).vec;
    track(o, (lhs - rhs).norm());
  }
  return o;
}

Outcome check_exp_aut_affine(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 10);
  for (const auto& f : c.fields()) {
    Diffeo e = exp_aut(c.conn, f, c.cfg);
    for (const auto& p : sample_points(c, samples)) {
      Vec v = c.random_vec(c.n(), 1.0), w = c.random_vec(c.n(), 1.0);
      track(o, affine_residual(e, c.conn, c.conn, p, v, w).norm());
    }
  }
  return o;
}

Outcome check_kappa_pullback(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 5);
  for (const auto& f : c.fields()) {
    FrameDiffeo fd = frame_lift(exp_aut(c.conn, f, c.cfg));
    for (int k = 0; k < samples; ++k) {
      Frame p = c.random_frame();
      FrameTangent ft{c.random_vec(c.n(), 1.0), Mat(c.random_vec(c.n() * c.n(), 1.0).reshaped(c.n(), c.n()))};
      track(o, kappa_pullback_defect(c.conn, fd, p, ft, c.cfg));
    }
  }
  return o;
}

Outcome check_exp_commutes(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 5);
  for (const auto& f : c.fields()) {
    Diffeo e = exp_aut(c.conn, f, c.cfg);
    for (int k = 0; k < samples; ++k) {
      Point p = c.random_point();
      Vec v = normalize_metric(c, p, c.random_vec(c.n(), 1.0));
      track(o, exp_commutes_defect(c.conn, e, {p, v}, c.cfg));
    }
  }
  return o;
}

Outcome check_frame_hom(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 20);
  Diffeo f = Diffeo::identity(c.atlas), g = Diffeo::identity(c.atlas);
  if (is_sphere(c)) {
    f = catalog::sphere_rotation_map(c.atlas, catalog::rotation_matrix(c.random_vec(3, 1.0)), "R1");
    g = catalog::sphere_rotation_map(c.atlas, catalog::rotation_matrix(c.random_vec(3, 1.0)), "R2");
  } else {
    auto fields = c.fields();
    f = exp_aut(c.conn, fields[0], c.cfg);
    g = exp_aut(c.conn, fields.size() > 1 ? fields[1] : fields[0], c.cfg);
  }
  FrameDiffeo ffg = frame_lift(f.compose(g)), ff = frame_lift(f), fg = frame_lift(g);
  for (int k = 0; k < samples; ++k) {
    Frame p = c.random_frame();
    track(o, frame_distance(*c.atlas, ffg.apply(p), ff.apply(fg.apply(p))));
  }
  return o;
}

// worst = |rank − expected|
Outcome check_gram_rank(Ctx& c) {
  auto fields = c.fields();
  const int expected = c.count("expected", static_cast<int>(fields.size()));
  Outcome o;
  const int samples = c.count("samples", 5);
  for (int k = 0; k < samples; ++k) {
    Point p = c.random_point();
    std::vector<KillingSeed> seeds;
    for (const auto& f : fields) seeds.push_back(ev_embedding(c.conn, f, p));
    track(o, std::abs(gram_rank(seeds) - expected));
  }
  return o;
}

// lower bound: smallest separation between orbit points of distinct small exponentials
Outcome check_orbit_separation(Ctx& c) {
  auto fields = c.fields();
  const double scale = c.num("scale", 0.1);
  Outcome o{std::numeric_limits<double>::infinity(), 0};
  const int samples = c.count("samples", 2);
  std::vector<FrameDiffeo> lifts;
  for (const auto& f : fields) lifts.push_back(frame_lift(exp_aut(c.conn, f.scaled(scale), c.cfg)));
  for (int k = 0; k < samples; ++k) {
    Frame p = c.random_frame();
    std::vector<Frame> images;
    for (const auto& l : lifts) images.push_back(orbit_point(l, p));
    for (std::size_t i = 0; i < images.size(); ++i)
      for (std::size_t j = i + 1; j < images.size(); ++j) {
        o.worst = std::min(o.worst, frame_distance(*c.atlas, images[i], images[j]));
        ++o.samples;
      }
  }
  return o;
}

Outcome check_parameter_flow(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 2);
  ParametrizedField fam = kappa_family(c.conn);
  for (int k = 0; k < samples; ++k) track(o, parameter_flow_derivative_defect(fam, to_state(c.random_frame()), c.cfg));
  return o;
}

std::vector<Tangent> probe_seeds(Ctx& c, int count) {
  std::vector<Tangent> seeds;
  if (c.params.contains("seeds")) {
    for (const auto& s : c.params["seeds"])
      seeds.push_back({Point{s.at("chart").get<std::string>(), Vec::Map(s.at("x").get<std::vector<double>>().data(), c.n())},
                       Vec::Map(s.at("v").get<std::vector<double>>().data(), c.n())});
    return seeds;
  }
  for (int k = 0; k < count; ++k) {
    Point p = c.random_point();
    seeds.push_back({p, normalize_metric(c, p, c.random_vec(c.n(), 1.0))});
  }
  return seeds;
}

// lower bound: smallest time reached in either direction
Outcome check_completeness(Ctx& c) {
  IntegratorConfig cfg = c.cfg;
  cfg.step = c.num("step", 1e-2);
  const double horizon = c.num("horizon", 1e3);
  CompletenessReport r = completeness_probe(c.conn, probe_seeds(c, c.count("seeds_count", 20)), horizon, cfg);
  Outcome o{std::numeric_limits<double>::infinity(), 0};
  for (const auto& s : r.seeds) {
    o.worst = std::min(o.worst, s.reached());
    ++o.samples;
  }
  return o;
}

// worst = the furthest time any seed's forward geodesic reached
Outcome check_incompleteness(Ctx& c) {
  const double horizon = c.num("horizon", 10.0);
  CompletenessReport r = completeness_probe(c.conn, probe_seeds(c, c.count("seeds_count", 1)), horizon, c.cfg);
  Outcome o;
  for (const auto& s : r.seeds) track(o, s.reached_forward);
  return o;
}

Outcome check_exp_group_law(Ctx& c) {
  Outcome o;
  const int samples = c.count("samples", 10);
  for (const auto& f : c.fields()) {
    Diffeo roundtrip = exp_aut(c.conn, f, c.cfg).compose(exp_aut(c.conn, f.scaled(-1.0), c.cfg));
    StateSpace space(c.atlas, Space::Base);
    for (const auto& p : sample_points(c, samples)) {
      Point q = roundtrip.apply(p);
      track(o, state_distance(space, {p.chart, p.coords}, {q.chart, q.coords}));
    }
  }
  return o;
}

// ---- registry -------------------------------------------------------------------------

struct CheckDef {
  CheckInfo info;
  double default_tol;
  std::set<std::string> params;
  std::function<Outcome(Ctx&)> run;
};

const std::map<std::string, CheckDef>& registry() {
  static const std::map<std::string, CheckDef> defs = [] {
    std::map<std::string, CheckDef> m;
    auto add = [&m](std::string name, Bound b, double tol, std::set<std::string> params, std::string summary,
                    std::function<Outcome(Ctx&)> fn) {
      m.emplace(name, CheckDef{{name, b, std::move(summary)}, tol, std::move(params), std::move(fn)});
    };
    const auto U = Bound::Upper, L = Bound::Lower;
    add("chart_roundtrip", U, 1e-10, {"samples"}, "h_ji(h_ij(x)) = x and tangent re-charting round trips",
        check_chart_roundtrip);
    add("change_of_variable", U, 1e-6, {"samples"}, "B2(dh v, dh w) = d²h(v,w) + dh B1(v,w) on overlaps",
        check_change_of_variable);
    add("flat_closed_form", U, 1e-9, {"samples", "t_max"},
        "flat geodesics, exp, transport and exp_aut against closed forms", check_flat_closed_form);
    add("geodesic_closed_form", U, 1e-6, {"samples", "t_max"}, "geodesics against great circles / straight lines",
        check_geodesic_closed_form);
    add("geodesic_periodicity", U, 1e-6, {}, "unit-speed equator returns at t = 2π", check_geodesic_periodicity);
    add("geodesic_convergence", L, 3.8, {"coarse_step"}, "observed RK order from step halving",
        check_geodesic_convergence);
    add("holonomy", U, 1e-5, {"theta0"}, "transport around latitude circles rotates by 2π cos θ0", check_holonomy);
    add("horizontal_projection", U, 1e-4, {"samples", "t_max", "part"}, "q∘Fl^{H_λ} is the geodesic with velocity pλ",
        check_horizontal_projection);
    add("killing_residual", U, 1e-8, {"samples", "fields"}, "second-order Killing residual", check_killing_residual);
    add("nonaffine_detect", L, 1e-2, {"samples", "fields"}, "largest residual of non-affine fields",
        check_nonaffine_detect);
    add("lift_equivalence", U, 0.5,
        {"samples", "flow_samples", "fields", "s", "t", "residual_threshold", "commutation_threshold"},
        "residual and [ξ̄, H_λ]-commutation verdicts agree (count of disagreements)", check_lift_equivalence);
    add("bracket_structure", U, 1e-8, {"samples", "triples"}, "chart brackets match structure constants",
        check_bracket_structure);
    add("lift_homomorphism", U, 1e-6, {"samples", "fields"}, "lift of bracket = bracket of lifts",
        check_lift_homomorphism);
    add("killing_extension", U, 1e-5, {"samples", "fields", "distance"}, "extension of ev-seed recovers the field",
        check_killing_extension);
    add("extension_linearity", U, 1e-8, {"samples", "fields"}, "extension is linear in the seed",
        check_extension_linearity);
    add("exp_aut_affine", U, 1e-5, {"samples", "fields"}, "affine residual of exp_aut", check_exp_aut_affine);
    add("kappa_pullback", U, 1e-5, {"samples", "fields"}, "Fr(exp_aut)^* κ = κ", check_kappa_pullback);
    add("exp_commutes", U, 1e-5, {"samples", "fields"}, "f∘exp = exp∘Tf", check_exp_commutes);
    add("frame_hom", U, 1e-8, {"samples", "fields"}, "Fr(f∘g) = Fr(f)∘Fr(g)", check_frame_hom);
    add("gram_rank", U, 0.5, {"samples", "fields", "expected"}, "rank of ev seeds (|rank − expected|)",
        check_gram_rank);
    add("orbit_separation", L, 1e-3, {"samples", "fields", "scale"},
        "distinct small exponentials move a frame apart", check_orbit_separation);
    add("parameter_flow", U, 1e-4, {"samples"}, "T_0 (v -> Fl^{η_v}_1(p)) = κ_p⁻¹", check_parameter_flow);
    add("completeness", L, 1e3, {"seeds", "seeds_count", "horizon", "step"}, "time reached by geodesics (min)",
        check_completeness);
    add("incompleteness", U, 2.0, {"seeds", "seeds_count", "horizon"}, "time reached before leaving (max)",
        check_incompleteness);
    add("exp_group_law", U, 1e-7, {"samples", "fields"}, "exp_aut(ξ)∘exp_aut(−ξ) = id", check_exp_group_law);
    return m;
  }();
  return defs;
}

// ---- parsing ------------------------------------------------------------------------------

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) parse_fail(where + "." + k, "unknown key");
}

template <class T>
T get_as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(where, std::string("wrong type (") + j.type_name() + ")");
  }
}

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const auto& [name, def] : registry()) v.push_back(def.info);
    return v;
  }();
  return infos;
}

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.pass; });
}

Scenario parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) parse_fail("scenario", "top level must be an object");
  reject_unknown(j, {"description", "manifold", "connection", "fields", "rng_seed", "integrator", "checks"}, "scenario");

  Scenario sc;
  if (!j.contains("manifold")) parse_fail("scenario.manifold", "missing");
  sc.manifold = get_as<std::string>(j["manifold"], "scenario.manifold");
  AtlasPtr atlas = catalog::manifold(sc.manifold);
  sc.connection = j.contains("connection") ? get_as<std::string>(j["connection"], "scenario.connection")
                                           : catalog::default_connection(sc.manifold);
  catalog::connection(sc.connection, atlas);
  if (j.contains("fields")) sc.fields = get_as<std::vector<std::string>>(j["fields"], "scenario.fields");
  for (const auto& f : sc.fields) catalog::field(f, atlas);
  if (j.contains("rng_seed")) sc.rng_seed = get_as<std::uint64_t>(j["rng_seed"], "scenario.rng_seed");

  if (j.contains("integrator")) {
    const Json& ij = j["integrator"];
    if (!ij.is_object()) parse_fail("scenario.integrator", "must be an object");
    reject_unknown(ij, {"step", "max_hops", "rechart_margin"}, "scenario.integrator");
    if (ij.contains("step")) sc.integrator.step = get_as<double>(ij["step"], "scenario.integrator.step");
    if (ij.contains("max_hops")) sc.integrator.max_hops = get_as<int>(ij["max_hops"], "scenario.integrator.max_hops");
    if (ij.contains("rechart_margin"))
      sc.integrator.rechart_margin = get_as<double>(ij["rechart_margin"], "scenario.integrator.rechart_margin");
    if (!(sc.integrator.step > 0.0)) parse_fail("scenario.integrator.step", "must be positive");
    if (!(sc.integrator.rechart_margin >= 0.0 && sc.integrator.rechart_margin < 1.0))
      parse_fail("scenario.integrator.rechart_margin", "must lie in [0, 1)");
  }

  if (j.contains("checks")) {
    if (!j["checks"].is_array()) parse_fail("scenario.checks", "must be an array");
    for (std::size_t i = 0; i < j["checks"].size(); ++i) {
      const Json& cj = j["checks"][i];
      const std::string where = "scenario.checks[" + std::to_string(i) + "]";
      if (!cj.is_object() || !cj.contains("name")) parse_fail(where, "needs an object with a name");
      CheckSpec spec;
      spec.name = get_as<std::string>(cj["name"], where + ".name");
      auto it = registry().find(spec.name);
      if (it == registry().end()) throw Error(ErrorCode::UnknownCatalogName, where + ": unknown check '" + spec.name + "'");
      spec.tol = it->second.default_tol;
      spec.label = spec.name;
      for (const auto& [k, v] : cj.items()) {
        if (k == "name") continue;
        if (k == "tol") {
          spec.tol = get_as<double>(v, where + ".tol");
          if (!(spec.tol > 0.0)) parse_fail(where + ".tol", "must be positive");
        } else if (k == "label") {
          spec.label = get_as<std::string>(v, where + ".label");
        } else if (it->second.params.count(k)) {
          spec.params[k] = v;
        } else {
          parse_fail(where + "." + k, "unknown key for check " + spec.name);
        }
      }
      if (spec.params.contains("fields")) {
        for (const auto& f : get_as<std::vector<std::string>>(spec.params["fields"], where + ".fields"))
          catalog::field(f, atlas);
      }
      sc.checks.push_back(std::move(spec));
    }
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

Report run_suite(const Scenario& sc, const RunOptions& opts) {
  AtlasPtr atlas = catalog::manifold(sc.manifold);
  Connection conn = catalog::connection(sc.connection, atlas);
  Report report;
  for (std::size_t i = 0; i < sc.checks.size(); ++i) {
    const CheckSpec& spec = sc.checks[i];
    const CheckDef& def = registry().at(spec.name);
    CheckResult r;
    r.name = spec.label;
    r.bound = def.info.bound;
    r.tol = def.info.bound == Bound::Upper ? spec.tol * opts.tol_scale : spec.tol / opts.tol_scale;
    // per-check stream so one check's sample count never shifts another's draws
    Ctx ctx{sc, atlas, conn, sc.integrator, std::mt19937_64(sc.rng_seed + 0x9e3779b97f4a7c15ULL * (i + 1)), spec.params};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome o = def.run(ctx);
      r.worst = o.worst;
      r.samples = o.samples;
      r.pass = def.info.bound == Bound::Upper ? o.worst <= r.tol : o.worst >= r.tol;
    } catch (const std::exception& e) {
      r.pass = false;
      r.worst = std::numeric_limits<double>::quiet_NaN();
      r.error = e.what();
    }
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report.checks.push_back(std::move(r));
  }

  Json& meta = report.meta;
  meta["catalog_version"] = catalog::kVersion;
  meta["manifold"] = sc.manifold;
  meta["connection"] = sc.connection;
  meta["fields"] = sc.fields;
  meta["rng"] = "mt19937_64";
  meta["rng_seed"] = sc.rng_seed;
  meta["integrator"] = {{"method", "rk4"},
                        {"step", sc.integrator.step},
                        {"max_hops", sc.integrator.max_hops},
                        {"rechart_margin", sc.integrator.rechart_margin}};
  meta["tol_scale"] = opts.tol_scale;
  return report;
}

Json to_json(const Report& report, bool with_timing) {
  Json j;
  j["checks"] = Json::array();
  for (const auto& r : report.checks) {
    Json row;
    row["name"] = r.name;
    row["status"] = r.pass ? "pass" : "fail";
    row["worst"] = std::isfinite(r.worst) ? Json(r.worst) : Json(nullptr);
    row["tol"] = r.tol;
    row["bound"] = r.bound == Bound::Upper ? "upper" : "lower";
    row["samples"] = r.samples;
    if (with_timing) row["ms"] = r.ms;
    if (!r.error.empty()) row["error"] = r.error;
    j["checks"].push_back(std::move(row));
  }
  j["meta"] = report.meta;
  return j;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << std::setprecision(17);
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void emit(const Report& report, const std::string& path) {
  std::ofstream out = open_out(path);
  if (ends_with(path, ".csv")) {
    out << "name,status,worst,tol,bound,samples,ms\n";
    for (const auto& r : report.checks)
      out << r.name << ',' << (r.pass ? "pass" : "fail") << ',' << r.worst << ',' << r.tol << ','
          << (r.bound == Bound::Upper ? "upper" : "lower") << ',' << r.samples << ',' << r.ms << '\n';
  } else {
    out << to_json(report).dump(2) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

Trajectory sample_trajectory(const Scenario& sc, const std::string& kind, double t) {
  AtlasPtr atlas = catalog::manifold(sc.manifold);
  Connection conn = catalog::connection(sc.connection, atlas);
  const Json none = Json::object();
  Ctx c{sc, atlas, conn, sc.integrator, std::mt19937_64(sc.rng_seed), none};
  const int n = c.n();
  Trajectory tr;
  tr.dim = n;
  if (kind == "geodesic") {
    Point p = c.random_point();
    Vec v = normalize_metric(c, p, c.random_vec(n, 1.0));
    for (int i = 0; i < n; ++i) tr.extra_names.push_back("v" + std::to_string(i));
    CurveSpec geo = geodesic(conn, {p, v}, {0.0, t}, sc.integrator);
    for (const auto& s : geo.samples()) tr.rows.push_back({s.t, s.point.chart, s.point.coords, s.velocity});
  } else if (kind == "frame") {
    Frame f = c.random_frame();
    Vec lambda = c.random_vec(n, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr.extra_names.push_back("g" + std::to_string(i) + std::to_string(j));
    for (const auto& [tk, fr] : frame_trajectory(standard_horizontal(conn, lambda), f, t, sc.integrator))
      tr.rows.push_back({tk, fr.chart, fr.x, flatten_rowmajor(fr.g)});
  } else if (kind == "flow") {
    if (sc.fields.empty()) throw Error(ErrorCode::InvalidArgument, "flow trajectory needs a scenario field");
    VectorField f = catalog::field(sc.fields.front(), atlas);
    Point p = c.random_point();
    FlowOptions opts;
    opts.observer = [&](double tk, const State& st, const Mat&) { tr.rows.push_back({tk, st.chart, st.s, Vec()}); };
    FlowTrace ft = flow_trace(f, State{p.chart, p.coords}, Mat(), t, sc.integrator, opts);
    if (ft.status != FlowStatus::Ok) throw Error(ErrorCode::LeftAtlas, "flow left the atlas");
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown trajectory kind '" + kind + "'");
  }
  return tr;
}

void emit(const Trajectory& traj, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,chart";
  for (int i = 0; i < traj.dim; ++i) out << ",x" << i;
  for (const auto& e : traj.extra_names) out << ',' << e;
  out << '\n';
  for (const auto& r : traj.rows) {
    out << r.t << ',' << r.chart;
    for (Eigen::Index i = 0; i < r.coords.size(); ++i) out << ',' << r.coords[i];
    for (Eigen::Index i = 0; i < r.extra.size(); ++i) out << ',' << r.extra[i];
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace affgeo::harness
