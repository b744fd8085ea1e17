#pragma once

#include "affgeo/atlas.hpp"
#include "affgeo/vector_field.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace affgeo {

struct IntegratorConfig {
  double step = 1e-3;
  int max_hops = 10000;
  double rechart_margin = 0.1;
};

/// Re-charting of bundle states. Base points move by the transition h; tangent
/// vectors by dh; frames by g -> dh(x) g.
class StateSpace {
 public:
  StateSpace(AtlasPtr atlas, Space kind) : atlas_(std::move(atlas)), kind_(kind) {}

  const Atlas& atlas() const { return *atlas_; }
  Space kind() const { return kind_; }
  int dim() const { return state_dim(kind_, atlas_->dim()); }

  Point base(const State& st) const { return {st.chart, st.s.head(atlas_->dim())}; }

  State transfer(const State& st, const ChartId& target) const;
  std::optional<State> try_transfer(const State& st, const ChartId& target) const;

  /// Derivative of transfer() with respect to the state, for pushing tangent
  /// vectors of the bundle across charts.
  Mat transfer_jacobian(const State& st, const ChartId& target) const;

 private:
  AtlasPtr atlas_;
  Space kind_;
};

enum class FlowStatus { Ok, LeftAtlas, HopLimit, Diverged };

std::string_view to_string(FlowStatus status);

/// Outcome of an integration that does not throw on breakdown: `end` is the
/// last valid state and `reached` the time at which it was attained.
struct FlowTrace {
  State end;
  Mat tangent;
  double reached = 0.0;
  int hops = 0;
  FlowStatus status = FlowStatus::Ok;
};

struct FlowOptions {
  /// Called with (t, state, tangent) at t = 0 and after every step.
  std::function<void(double, const State&, const Mat&)> observer;
  /// Returns true when the state should be treated as diverged.
  std::function<bool(const State&)> diverged;
};

/// Fixed-step RK4 integration of the field together with its linearization
/// W' = dξ(x) W (pass an empty matrix to skip the variational part). The state
/// is re-charted whenever it leaves the margin-shrunk domain of its chart.
FlowTrace flow_trace(const VectorField& field, const State& start, const Mat& tangent, double t,
                     const IntegratorConfig& cfg, const FlowOptions& opts = {});

/// Fl^ξ_t(start). Throws LeftAtlas / HopLimit.
State integrate(const VectorField& field, const State& start, double t, const IntegratorConfig& cfg);
Point integrate(const VectorField& field, const Point& start, double t, const IntegratorConfig& cfg);

/// (Fl^ξ_t(start), T Fl^ξ_t · W), the columns of W pushed forward in end-chart coordinates.
std::pair<State, Mat> variational_flow(const VectorField& field, const State& start, const Mat& w0, double t,
                                       const IntegratorConfig& cfg);
std::pair<Point, Vec> variational_flow(const VectorField& field, const Point& start, const Vec& w0, double t,
                                       const IntegratorConfig& cfg);

/// Distance, in a common chart, between two states of the same space.
double state_distance(const StateSpace& space, const State& a, const State& b);

/// ‖Fl^ξ_s(Fl^η_t(x)) − Fl^η_t(Fl^ξ_s(x))‖ in a common chart.
double commutation_defect(const VectorField& xi, const VectorField& eta, const State& start, double s, double t,
                          const IntegratorConfig& cfg);

/// ‖((Fl^ξ_t)_* Y − Y)(x)‖ / t at small t; approximates ‖[ξ, Y](x)‖.
double lie_derivative_defect(const VectorField& field, const VectorField& other, const State& at,
                             const IntegratorConfig& cfg, double t = 1e-4);

/// A linear family v -> η_v of vector fields on one space.
struct ParametrizedField {
  std::string name;
  int param_dim = 0;
  std::function<VectorField(const Vec&)> member;
};

/// Operator-norm distance between the central-difference Jacobian of
/// v -> Fl^{η_v}_1(p) at v = 0 and the linear map v -> η_v(p).
double parameter_flow_derivative_defect(const ParametrizedField& family, const State& p, const IntegratorConfig& cfg);

}  // namespace affgeo
