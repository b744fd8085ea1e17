#pragma once

#include "affgeo/connection.hpp"
#include "affgeo/flows.hpp"
#include "affgeo/geodesics.hpp"

namespace affgeo {

/// A frame in bundle-chart form (x, g) = (φ(x), dφ(x) ∘ p).
struct Frame {
  ChartId chart;
  Vec x;
  Mat g;
};

/// Chart representation (v, w) ∈ E × gl(E) of a tangent vector to Fr(M).
struct FrameTangent {
  Vec v;
  Mat w;
};

/// Value (θ, ω) ∈ E × gl(E) of the {1}-structure κ.
struct KappaValue {
  Vec theta;
  Mat omega;
};

State to_state(const Frame& f);
Frame to_frame(const State& st);
Vec pack(const FrameTangent& ft);
FrameTangent unpack_tangent(const Eigen::Ref<const Vec>& v, int n);
Vec pack(const KappaValue& kv);
KappaValue unpack_kappa(const Eigen::Ref<const Vec>& v, int n);

/// Bundle projection q.
inline Point project(const Frame& f) { return {f.chart, f.x}; }

/// Right action p.g2 = p ∘ g2.
Frame rho(const Frame& frame, const Mat& g2);

/// θ(v, w) = g⁻¹ v.
Vec soldering(const Frame& frame, const FrameTangent& ft);

/// ω(v, w)(e) = g⁻¹ (w e − B_x(g e, v)).
Mat connection_form(const Connection& conn, const Frame& frame, const FrameTangent& ft);

KappaValue kappa(const Connection& conn, const Frame& frame, const FrameTangent& ft);

/// κ_p⁻¹(λ, A) = (g λ, g A + B_x(g ·, g λ)).
FrameTangent kappa_inverse(const Connection& conn, const Frame& frame, const KappaValue& kv);

/// The (n+n²) x (n+n²) matrix of κ_p in the bundle chart.
Mat kappa_matrix(const Connection& conn, const Frame& frame);

/// η_{(λ,A)}(p) = κ_p⁻¹(λ, A), the κ-constant field on Fr(M).
FrameVectorField kappa_field(const Connection& conn, const KappaValue& kv);

/// Standard horizontal field H_λ = η_{(λ,0)}:
/// H_λ(x, g) = (g λ, e -> B_x(g e, g λ)).
FrameVectorField standard_horizontal(const Connection& conn, const Vec& lambda);

/// The linear family v -> η_v over F = E × gl(E), for parameter-flow checks.
ParametrizedField kappa_family(const Connection& conn);

struct ProjectionDefect {
  /// max_t ‖(q∘γ)'(t) − γ(t) λ‖ with (q∘γ)' by central differences.
  double derivative = 0.0;
  /// max_t distance between q∘γ and the geodesic with initial velocity p λ.
  double geodesic = 0.0;
  double total() const { return derivative + geodesic; }
};

ProjectionDefect horizontal_projection_defect(const Connection& conn, const Vec& lambda, const Frame& frame,
                                              TimeSpan t_span, const IntegratorConfig& cfg);

/// Samples of an integral curve of a frame field, for trajectory dumps.
std::vector<std::pair<double, Frame>> frame_trajectory(const FrameVectorField& field, const Frame& start, double t,
                                                       const IntegratorConfig& cfg);

}  // namespace affgeo
