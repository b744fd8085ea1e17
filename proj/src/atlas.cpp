#include "affgeo/atlas.hpp"

#include "affgeo/finite_diff.hpp"

#include <algorithm>

namespace affgeo {

void Atlas::add_chart(Chart chart) {
  if (has_chart(chart.id())) throw Error(ErrorCode::InvalidArgument, "duplicate chart " + chart.id());
  charts_.push_back(std::move(chart));
  std::stable_sort(charts_.begin(), charts_.end(), [](const Chart& a, const Chart& b) {
    return a.priority() != b.priority() ? a.priority() < b.priority() : a.id() < b.id();
  });
}

void Atlas::add_transition(const ChartId& from, const ChartId& to, Transition t) {
  transitions_[{from, to}] = std::move(t);
}

const Chart& Atlas::chart(const ChartId& id) const {
  for (const auto& c : charts_)
    if (c.id() == id) return c;
  throw Error(ErrorCode::ChartMissing, "atlas " + name_ + " has no chart " + id);
}

bool Atlas::has_chart(const ChartId& id) const {
  return std::any_of(charts_.begin(), charts_.end(), [&](const Chart& c) { return c.id() == id; });
}

bool Atlas::has_transition(const ChartId& from, const ChartId& to) const {
  return from == to || transitions_.count({from, to}) > 0;
}

bool Atlas::contains(const Point& p, double margin) const {
  return has_chart(p.chart) && chart(p.chart).contains(p.coords, margin);
}

const Transition& Atlas::lookup(const ChartId& from, const ChartId& to) const {
  auto it = transitions_.find({from, to});
  if (it == transitions_.end()) throw Error(ErrorCode::NotInOverlap, "charts " + from + " and " + to + " do not overlap");
  return it->second;
}

void Atlas::check_overlap(const Point& p, const ChartId& target, const Vec& image) const {
  if (!chart(p.chart).contains(p.coords)) throw Error(ErrorCode::NotInOverlap, "point outside chart " + p.chart);
  if (!chart(target).contains(image)) throw Error(ErrorCode::NotInOverlap, "point outside chart " + target);
}

Point Atlas::transition(const Point& p, const ChartId& target) const {
  if (p.chart == target) {
    if (!chart(target).contains(p.coords)) throw Error(ErrorCode::NotInOverlap, "point outside chart " + target);
    return p;
  }
  Vec image = lookup(p.chart, target).map(p.coords);
  check_overlap(p, target, image);
  return {target, std::move(image)};
}

std::optional<Point> Atlas::try_transition(const Point& p, const ChartId& target, double margin) const {
  if (!has_chart(p.chart) || !has_chart(target) || !chart(p.chart).contains(p.coords)) return std::nullopt;
  if (p.chart == target) return chart(target).contains(p.coords, margin) ? std::optional<Point>(p) : std::nullopt;
  auto it = transitions_.find({p.chart, target});
  if (it == transitions_.end()) return std::nullopt;
  Vec image = it->second.map(p.coords);
  if (!chart(target).contains(image, margin)) return std::nullopt;
  return Point{target, std::move(image)};
}

Mat Atlas::d_transition(const Point& p, const ChartId& target) const {
  if (p.chart == target) {
    transition(p, target);
    return Mat::Identity(dim_, dim_);
  }
  const auto& t = lookup(p.chart, target);
  check_overlap(p, target, t.map(p.coords));
  if (t.jacobian) return t.jacobian(p.coords);
  const Chart& c = chart(p.chart);
  return fd::jacobian(t.map, p.coords, [&c](const Vec& y) { return c.contains(y); });
}

BilinearMap Atlas::d2_transition(const Point& p, const ChartId& target) const {
  if (p.chart == target) {
    transition(p, target);
    return BilinearMap::zero(dim_, dim_);
  }
  const auto& t = lookup(p.chart, target);
  check_overlap(p, target, t.map(p.coords));
  if (t.hessian) return t.hessian(p.coords);
  const Chart& c = chart(p.chart);
  auto inside = [&c](const Vec& y) { return c.contains(y); };
  if (t.jacobian) return fd::hessian_from_jacobian(t.jacobian, p.coords, inside);
  return fd::hessian(t.map, p.coords, inside);
}

Tangent Atlas::recharter_tangent(const Tangent& t, const ChartId& target) const {
  Point base = transition(t.base, target);
  return {std::move(base), d_transition(t.base, target) * t.vec};
}

std::optional<ChartId> Atlas::best_chart(const Point& p, double margin,
                                         const std::function<bool(const ChartId&)>& allowed) const {
  for (const auto& c : charts_) {
    if (allowed && !allowed(c.id())) continue;
    if (try_transition(p, c.id(), margin)) return c.id();
  }
  return std::nullopt;
}

}  // namespace affgeo
