#pragma once

#include "affgeo/connection.hpp"
#include "affgeo/flows.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace affgeo {

/// Geodesic spray on TM: (x, v) -> (v, B_x(v, v)).
VectorField geodesic_spray(const Connection& conn);

struct CurveSample {
  double t = 0.0;
  Point point;
  Vec velocity;  // in the chart of `point`
};

/// A curve known at strictly increasing sample times, interpolated by
/// piecewise-cubic Hermite segments in whichever chart the caller asks for.
class CurveSpec {
 public:
  CurveSpec() = default;
  explicit CurveSpec(std::vector<CurveSample> samples);

  /// Samples a chart-local closed-form curve t -> (x(t), x'(t)) on [t0, t1].
  static CurveSpec from_function(const ChartId& chart, const std::function<std::pair<Vec, Vec>(double)>& curve,
                                 double t0, double t1, double dt);

  const std::vector<CurveSample>& samples() const { return samples_; }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }

  /// Index i of the interval [t_i, t_{i+1}] containing t (clamped).
  std::size_t interval(double t) const;

  /// Position and velocity at t expressed in `chart`. Throws LeftAtlas when
  /// the interpolating segment cannot be expressed in that chart.
  std::pair<Vec, Vec> evaluate(const Atlas& atlas, double t, const ChartId& chart) const;

  /// Position and velocity at t in the chart of the enclosing segment's left sample.
  Tangent velocity_at(const Atlas& atlas, double t) const;

 private:
  std::vector<CurveSample> samples_;
};

using TimeSpan = std::pair<double, double>;

/// Geodesic α with α'(0) = v0 sampled at every integrator step over t_span (which must contain 0).
CurveSpec geodesic(const Connection& conn, const Tangent& v0, TimeSpan t_span, const IntegratorConfig& cfg);

/// exp(v) = α_v(1).
Point exp_map(const Connection& conn, const Tangent& v, const IntegratorConfig& cfg);
/// α_v(t) = exp(t v).
Point exp_map(const Connection& conn, const Tangent& v, double t, const IntegratorConfig& cfg);

struct ExpInverseResult {
  Tangent v;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton shooting for v with exp_x(v) = y. FD Jacobian, undamped, at most 50 iterations.
ExpInverseResult exp_inverse_solve(const Connection& conn, const Point& x, const Point& y,
                                   const IntegratorConfig& cfg);
Tangent exp_inverse(const Connection& conn, const Point& x, const Point& y, const IntegratorConfig& cfg);

/// P^{t1}_{t0}(α) v, with v in the chart of the curve segment at t0.
Tangent parallel_transport(const Connection& conn, const CurveSpec& curve, double t0, double t1, const Vec& v,
                           const IntegratorConfig& cfg);

struct ProbeSeedResult {
  Tangent seed;
  double reached_forward = 0.0;
  double reached_backward = 0.0;
  FlowStatus forward = FlowStatus::Ok;
  FlowStatus backward = FlowStatus::Ok;

  double reached() const { return std::min(reached_forward, reached_backward); }
};

struct CompletenessReport {
  double horizon = 0.0;
  std::vector<ProbeSeedResult> seeds;
  bool complete_up_to_horizon = true;
};

/// Integrates each seed's geodesic to ±horizon and records how far it got.
/// Failures (leaving the atlas, hop limit, ‖v‖ > 1e8) are reported, not thrown.
CompletenessReport completeness_probe(const Connection& conn, const std::vector<Tangent>& seeds, double horizon,
                                      const IntegratorConfig& cfg);

}  // namespace affgeo
