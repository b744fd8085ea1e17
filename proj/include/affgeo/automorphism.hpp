#pragma once

#include "affgeo/connection.hpp"
#include "affgeo/flows.hpp"
#include "affgeo/frame_bundle.hpp"
#include "affgeo/geodesics.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace affgeo {

/// Closed-form (local) diffeomorphism. The map picks the chart of its image;
/// jacobian/hessian, when given, are taken from the source chart into that
/// image chart. Missing derivatives fall back to central differences.
struct ClosedMap {
  std::function<Point(const Point&)> map;
  std::function<Mat(const Point&)> jacobian;
  std::function<BilinearMap(const Point&)> hessian;
  std::function<Point(const Point&)> inverse;  // optional
};

/// A segment Fl^ξ_t of a flow word.
struct FlowLetter {
  VectorField field;
  double t;
};

/// Diffeomorphism given either in closed form or as a word of flows applied
/// left to right.
class Diffeo {
 public:
  enum class Kind { ClosedForm, FlowWord };

  static Diffeo closed_form(std::string name, AtlasPtr atlas, ClosedMap map);
  static Diffeo flow_word(std::string name, std::vector<FlowLetter> word, const IntegratorConfig& cfg);
  static Diffeo identity(AtlasPtr atlas);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Atlas& atlas() const { return *atlas_; }
  const AtlasPtr& atlas_ptr() const { return atlas_; }
  const std::vector<FlowLetter>& word() const { return word_; }
  const IntegratorConfig& config() const { return cfg_; }

  Point apply(const Point& p) const;
  /// df at p, source chart of p -> chart of apply(p).
  Mat jacobian(const Point& p) const;
  /// d²f at p in the same charts.
  BilinearMap hessian(const Point& p) const;
  /// (f(p), df v).
  Tangent push(const Tangent& v) const;

  /// Word reversed with negated durations; closed forms need an inverse map.
  Diffeo inverse() const;
  /// this ∘ other.
  Diffeo compose(const Diffeo& other) const;

 private:
  Diffeo(std::string name, AtlasPtr atlas, Kind kind) : name_(std::move(name)), atlas_(std::move(atlas)), kind_(kind) {}

  std::string name_;
  AtlasPtr atlas_;
  Kind kind_;
  std::shared_ptr<const ClosedMap> closed_;
  std::vector<FlowLetter> word_;
  IntegratorConfig cfg_;
};

/// d²f(v,w) + df B1(v,w) − B2_{f(x)}(df v, df w).
Vec affine_residual(const Diffeo& f, const Connection& conn1, const Connection& conn2, const Point& point,
                    const Vec& v, const Vec& w);

/// Fr(f)(x, g) = (f(x), df g); tangents (v, W) -> (df v, d²f(v, g·) + df W).
/// Flow words act through the variational flows of the natural lifts.
class FrameDiffeo {
 public:
  explicit FrameDiffeo(Diffeo base) : base_(std::move(base)) {}

  const Diffeo& base() const { return base_; }
  Frame apply(const Frame& p) const;
  std::pair<Frame, FrameTangent> push(const Frame& p, const FrameTangent& ft) const;

 private:
  Diffeo base_;
};

FrameDiffeo frame_lift(const Diffeo& f);

/// Max coordinate-pair Killing residual over the points.
double max_killing_residual(const Connection& conn, const VectorField& field, const std::vector<Point>& samples);

/// Deterministic sample points inside the charts the field lives on.
std::vector<Point> killing_samples(const VectorField& field, int per_chart = 8, std::uint64_t seed = 0x5eed);

/// Fl^{-ξ}_1 as the flow word [(ξ, −1)]. Throws NotKilling if the residual
/// exceeds tol_kill on the sample set.
Diffeo exp_aut(const Connection& conn, const VectorField& field, const IntegratorConfig& cfg, double tol_kill = 1e-6);
Diffeo exp_aut(const Connection& conn, const VectorField& field, const std::vector<Point>& samples,
               const IntegratorConfig& cfg, double tol_kill = 1e-6);

/// Fr(f)(p).
Frame orbit_point(const FrameDiffeo& fd, const Frame& p);

/// Distance between two frames, in a common chart (x and g parts together).
double frame_distance(const Atlas& atlas, const Frame& a, const Frame& b);

/// ‖θ_{F(p)}(TF ft) − θ_p(ft)‖ + ‖ω_{F(p)}(TF ft) − ω_p(ft)‖.
double kappa_pullback_defect(const Connection& conn, const FrameDiffeo& fd, const Frame& frame,
                             const FrameTangent& ft, const IntegratorConfig& cfg);

/// Distance between f(exp v) and exp(Tf v).
double exp_commutes_defect(const Connection& conn, const Diffeo& f, const Tangent& v, const IntegratorConfig& cfg);

}  // namespace affgeo
