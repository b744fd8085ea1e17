#pragma once

#include "affgeo/errors.hpp"
#include "affgeo/linalg.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace affgeo {

using ChartId = std::string;

/// A manifold point: the chart it is expressed in plus its coordinates.
struct Point {
  ChartId chart;
  Vec coords;
};

/// A tangent vector, components taken in the chart of its base point.
struct Tangent {
  Point base;
  Vec vec;
};

/// A chart φ: U -> V ⊆ E. The domain V is described by a depth function that
/// is positive inside V and reaches 1 deep in the interior; a margin m ∈ [0,1)
/// shrinks V to {depth > m}.
class Chart {
 public:
  using DepthFn = std::function<double(const Vec&)>;

  Chart(ChartId id, int priority, DepthFn depth, Vec sample_lo, Vec sample_hi)
      : id_(std::move(id)),
        priority_(priority),
        depth_(std::move(depth)),
        sample_lo_(std::move(sample_lo)),
        sample_hi_(std::move(sample_hi)) {}

  const ChartId& id() const { return id_; }
  int priority() const { return priority_; }

  double depth(const Vec& x) const { return x.allFinite() ? depth_(x) : -1.0; }
  bool contains(const Vec& x, double margin = 0.0) const { return depth(x) > margin; }

  /// Bounding box used for rejection sampling of interior points.
  const Vec& sample_lo() const { return sample_lo_; }
  const Vec& sample_hi() const { return sample_hi_; }

 private:
  ChartId id_;
  int priority_;
  DepthFn depth_;
  Vec sample_lo_, sample_hi_;
};

/// Transition h = φ_to ∘ φ_from⁻¹ with optional analytic derivatives.
struct Transition {
  std::function<Vec(const Vec&)> map;
  std::function<Mat(const Vec&)> jacobian;
  std::function<BilinearMap(const Vec&)> hessian;
};

/// A finite atlas over an n-dimensional model space. Built once (add_chart /
/// add_transition) and shared immutably afterwards.
class Atlas {
 public:
  Atlas(std::string name, int dim) : name_(std::move(name)), dim_(dim) {}

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  void add_chart(Chart chart);
  void add_transition(const ChartId& from, const ChartId& to, Transition t);

  /// Charts ordered by (priority, id).
  const std::vector<Chart>& charts() const { return charts_; }
  const Chart& chart(const ChartId& id) const;
  bool has_chart(const ChartId& id) const;
  bool has_transition(const ChartId& from, const ChartId& to) const;

  bool contains(const Point& p, double margin = 0.0) const;

  Point transition(const Point& p, const ChartId& target) const;
  Mat d_transition(const Point& p, const ChartId& target) const;
  BilinearMap d2_transition(const Point& p, const ChartId& target) const;
  Tangent recharter_tangent(const Tangent& t, const ChartId& target) const;

  /// Like transition() but returns nullopt instead of throwing NotInOverlap.
  std::optional<Point> try_transition(const Point& p, const ChartId& target, double margin = 0.0) const;

  /// Highest-priority chart whose margin-shrunk domain contains p, optionally
  /// restricted to charts accepted by `allowed`.
  std::optional<ChartId> best_chart(const Point& p, double margin,
                                    const std::function<bool(const ChartId&)>& allowed = {}) const;

 private:
  const Transition& lookup(const ChartId& from, const ChartId& to) const;
  void check_overlap(const Point& p, const ChartId& target, const Vec& image) const;

  std::string name_;
  int dim_;
  std::vector<Chart> charts_;
  std::map<std::pair<ChartId, ChartId>, Transition> transitions_;
};

using AtlasPtr = std::shared_ptr<const Atlas>;

}  // namespace affgeo
