#pragma once

#include "affgeo/connection.hpp"
#include "affgeo/flows.hpp"
#include "affgeo/frame_bundle.hpp"
#include "affgeo/geodesics.hpp"

#include <variant>
#include <vector>

namespace affgeo {

/// ξ̄(x, g) = (ξ(x), dξ(x) g). Jacobian uses d²ξ (analytic or FD).
FrameVectorField natural_lift(const VectorField& field);

/// R = d²ξ(v,w) + dξ B(v,w) − dB(ξ)(v,w) − B(dξ v, w) − B(v, dξ w).
Vec killing_residual(const Connection& conn, const VectorField& field, const Point& point, const Vec& v,
                     const Vec& w);

/// max over coordinate pairs (e_i, e_j) of ‖R‖.
double killing_residual_norm(const Connection& conn, const VectorField& field, const Point& point);

/// [ξ1, ξ2] = dξ2 ξ1 − dξ1 ξ2 chart by chart (charts both define).
VectorField bracket(const VectorField& f1, const VectorField& f2);

/// Commutation defect between the flows of ξ̄ and H_λ from `frame`.
double lift_commutation_defect(const Connection& conn, const VectorField& field, const Vec& lambda,
                               const Frame& frame, double s, double t, const IntegratorConfig& cfg);

struct KillingSeed {
  Point at;
  Vec value;
  Mat nabla;  // column v -> ∇_v ξ
};

/// ξ -> (ξ(x), v -> dξ v − B(ξ, v)).
KillingSeed ev_embedding(const Connection& conn, const VectorField& field, const Point& at);

KillingSeed operator+(const KillingSeed& a, const KillingSeed& b);
KillingSeed operator*(double s, const KillingSeed& a);

/// Frame-bundle path built from H_λ legs and right moves by g, starting at the
/// frame (start, id).
class HorizontalPath {
 public:
  struct Leg {
    Vec lambda;
    double duration = 1.0;
  };
  struct Move {
    Mat g;
  };
  using Step = std::variant<Leg, Move>;

  HorizontalPath() = default;
  explicit HorizontalPath(Point start) : start_(std::move(start)) {}

  HorizontalPath& leg(Vec lambda, double duration = 1.0);
  HorizontalPath& move(Mat g);
  /// Appends `other`'s steps (its start is ignored).
  HorizontalPath& append(const HorizontalPath& other);

  const Point& start() const { return start_; }
  const std::vector<Step>& steps() const { return steps_; }

 private:
  Point start_;
  std::vector<Step> steps_;
};

/// Single leg reaching y: λ = exp_x⁻¹(y), duration 1. Only inside normal neighbourhoods.
HorizontalPath path_to(const Connection& conn, const Point& x, const Point& y, const IntegratorConfig& cfg);

/// End frame of a path (the base point is where the extended value lives).
Frame path_end(const Connection& conn, const HorizontalPath& path, const IntegratorConfig& cfg);

/// Transports the lifted seed w = (value, nabla + B(value, ·)) along the path
/// by variational flows of H_λ; the E-part at the end is ξ(end).
Tangent extend_killing(const Connection& conn, const KillingSeed& seed, const HorizontalPath& path,
                       const IntegratorConfig& cfg);

/// Numerical rank (σ > 1e-8 σ_max) of the seeds flattened into E × gl(E).
int gram_rank(const std::vector<KillingSeed>& seeds);

}  // namespace affgeo
