#include "gtp/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace gtp {

void VehicleDims::validate() const {
  if (!(length > 0.0) || !(wheelbase > 0.0) || !(width > 0.0)) {
    throw DomainError("VehicleDims: dimensions must be positive");
  }
  if (!(wheelbase < length)) throw DomainError("VehicleDims: wheelbase must be shorter than length");
}

Obb::Obb(const std::array<Vec2, 4>& v) : vertices_(v) {
  const Vec2 e0 = v[1] - v[0];
  const Vec2 e1 = v[2] - v[1];
  const Vec2 e2 = v[3] - v[2];
  const Vec2 e3 = v[0] - v[3];
  const double n0 = norm(e0);
  const double n1 = norm(e1);
  const double scale = std::max({1.0, n0, n1});
  const double tol = 1e-9 * scale;
  if (!(n0 > 0.0 && n1 > 0.0) || cross(e0, e1) <= 0.0) {
    throw DomainError("Obb: vertices must be counter-clockwise with positive area");
  }
  if (norm(e0 + e2) > tol || norm(e1 + e3) > tol || std::abs(dot(e0, e1)) > tol * scale) {
    throw DomainError("Obb: vertices do not form a rectangle");
  }
  axes_ = {Vec2{e0.y / n0, -e0.x / n0}, Vec2{e1.y / n1, -e1.x / n1}};
}

double Obb::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) twice += cross(vertices_[i], vertices_[(i + 1) % 4]);
  return 0.5 * twice;
}

Obb footprint(const Pose& pose, const VehicleDims& dims) {
  const Vec2 c = pose.position();
  const Vec2 u = pose.heading();
  const Vec2 n{-u.y, u.x};
  const double hl = 0.5 * dims.length;
  const double hw = 0.5 * dims.width;
  return Obb({c + hl * u - hw * n, c + hl * u + hw * n, c - hl * u + hw * n, c - hl * u - hw * n});
}

namespace {

Interval project_unchecked(const Obb& obb, Vec2 axis) {
  const auto& v = obb.vertices();
  Interval r{dot(v[0], axis), dot(v[0], axis)};
  for (std::size_t i = 1; i < 4; ++i) {
    const double d = dot(v[i], axis);
    r.min = std::min(r.min, d);
    r.max = std::max(r.max, d);
  }
  return r;
}

double interval_gap(const Obb& a, const Obb& b, Vec2 axis) {
  const Interval ia = project_unchecked(a, axis);
  const Interval ib = project_unchecked(b, axis);
  return std::max(ia.min, ib.min) - std::min(ia.max, ib.max);
}

double quadratic_margin(const EllipseZone& z, Vec2 p) {
  const double c = std::cos(z.theta);
  const double s = std::sin(z.theta);
  const double dx = p.x - z.center.x;
  const double dy = p.y - z.center.y;
  const double lon = c * dx + s * dy;
  const double lat = s * dx - c * dy;
  return lon * lon / (z.semi_major * z.semi_major) + lat * lat / (z.semi_minor * z.semi_minor);
}

}  // namespace

Interval project(const Obb& obb, Vec2 axis) {
  if (std::abs(dot(axis, axis) - 1.0) > 1e-9) throw DomainError("project: axis must have unit norm");
  return project_unchecked(obb, axis);
}

double gtc(const Obb& a, const Obb& b) {
  double best = 0.0;
  for (const Obb* owner : {&a, &b}) {
    for (Vec2 axis : owner->axes()) best = std::max(best, interval_gap(a, b, axis));
  }
  return best;
}

EllipseZone ellipse_zone(const Pose& pose, double speed, const VehicleDims& dims, double ttc,
                         double d_safe) {
  if (!(speed >= 0.0)) throw DomainError("ellipse_zone: negative speed");
  return {pose.position(), pose.theta, 0.5 * dims.length + ttc * speed, 0.5 * dims.wheelbase + d_safe};
}

Exclusion ellipse_excludes(const EllipseZone& zone, Vec2 p) {
  const double m = quadratic_margin(zone, p);
  return {m > 1.0, m};
}

SharedWindow shared_window(const TimedTrajectory& a, const TimedTrajectory& b) {
  if (a.states.empty() || b.states.empty()) throw EmptyWindowError("shared_window: empty trajectory");
  if (std::abs(a.dt - b.dt) > 1e-12 * a.dt) throw EmptyWindowError("shared_window: different time steps");
  const double shift = (b.t_start - a.t_start) / a.dt;
  const double offset = std::round(shift);
  if (std::abs(shift - offset) > 1e-6) throw EmptyWindowError("shared_window: grids are not aligned");
  const auto off = static_cast<long>(offset);  // index in a of b's first state
  const long na = static_cast<long>(a.states.size());
  const long nb = static_cast<long>(b.states.size());
  const long begin = std::max(0L, off);
  const long end = std::min(na, nb + off);
  if (end <= begin) throw EmptyWindowError("shared_window: time supports are disjoint");
  return {static_cast<std::size_t>(begin), static_cast<std::size_t>(begin - off),
          static_cast<std::size_t>(end - begin)};
}

double ellipse_violation(const EllipseZone& zone, const Obb& box) {
  double worst = 0.0;
  for (Vec2 v : box.vertices()) worst = std::max(worst, 1.0 - quadratic_margin(zone, v));
  return worst;
}

double lane_violation(const EllipseZone& zone, const IntersectionLayout& layout) {
  if (layout.in_conflict_zone(zone.center)) return 0.0;
  double worst = 0.0;
  for (const auto& line : layout.lane_boundaries()) {
    const Vec2 q = closest_point_on_polyline(line, zone.center);
    worst = std::max(worst, 1.0 - quadratic_margin(zone, q));
  }
  return worst;
}

PreparedTrajectory prepare_trajectory(const TimedTrajectory& traj, const VehicleDims& dims,
                                      const IntersectionLayout* layout, const SafetyParams& params) {
  dims.validate();
  PreparedTrajectory p;
  p.traj = &traj;
  p.dims = dims;
  p.boxes.reserve(traj.states.size());
  p.zones.reserve(traj.states.size());
  p.lane_violation.reserve(traj.states.size());
  for (const auto& st : traj.states) {
    p.boxes.push_back(footprint(st.pose, dims));
    p.zones.push_back(ellipse_zone(st.pose, st.speed, dims, params.ttc, params.d_safe));
    p.lane_violation.push_back(layout ? lane_violation(p.zones.back(), *layout) : 0.0);
  }
  return p;
}

Interaction interact(const PreparedTrajectory& a, const PreparedTrajectory& b) {
  const SharedWindow w = shared_window(*a.traj, *b.traj);
  Interaction out;
  out.gtc.samples.reserve(w.count);
  out.violations_a.reserve(w.count);
  out.violations_b.reserve(w.count);
  out.gtc.min_gtc = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.count; ++k) {
    const std::size_t i = w.first_a + k;
    const std::size_t j = w.first_b + k;
    const double g = gtc(a.boxes[i], b.boxes[j]);
    const double t = a.traj->states[i].t;
    out.gtc.samples.push_back({t, g});
    if (g < out.gtc.min_gtc) {
      out.gtc.min_gtc = g;
      out.gtc.t_crit = t;
    }
    out.violations_a.push_back(std::max(a.lane_violation[i], ellipse_violation(a.zones[i], b.boxes[j])));
    out.violations_b.push_back(std::max(b.lane_violation[j], ellipse_violation(b.zones[j], a.boxes[i])));
  }
  return out;
}

InteractionSummary summarize(const PreparedTrajectory& a, const PreparedTrajectory& b) {
  const SharedWindow w = shared_window(*a.traj, *b.traj);
  // gtc >= |c|/sqrt(2) - r_a - r_b, with r the half diagonal, since one of a's
  // two normals carries at least that share of the center offset c.
  const double diag_a = 0.5 * std::hypot(a.dims.length, a.dims.width);
  const double diag_b = 0.5 * std::hypot(b.dims.length, b.dims.width);
  InteractionSummary out;
  out.min_gtc = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.count; ++k) {
    const std::size_t i = w.first_a + k;
    const std::size_t j = w.first_b + k;
    out.max_violation_a = std::max(out.max_violation_a, a.lane_violation[i]);
    out.max_violation_b = std::max(out.max_violation_b, b.lane_violation[j]);
    const EllipseZone& za = a.zones[i];
    const EllipseZone& zb = b.zones[j];
    const double c = norm(za.center - zb.center);
    if (c / std::numbers::sqrt2 - diag_a - diag_b - 1e-9 <= out.min_gtc) {
      const double g = gtc(a.boxes[i], b.boxes[j]);
      if (g < out.min_gtc) {
        out.min_gtc = g;
        out.t_crit = a.traj->states[i].t;
      }
    }
    if (c - diag_b < std::max(za.semi_major, za.semi_minor) + 1e-9) {
      out.max_violation_a = std::max(out.max_violation_a, ellipse_violation(za, b.boxes[j]));
    }
    if (c - diag_a < std::max(zb.semi_major, zb.semi_minor) + 1e-9) {
      out.max_violation_b = std::max(out.max_violation_b, ellipse_violation(zb, a.boxes[i]));
    }
  }
  return out;
}

GtcSeries gtc_series(const TimedTrajectory& tv, const TimedTrajectory& to, const VehicleDims& dims_v,
                     const VehicleDims& dims_o) {
  const SafetyParams unused;
  const PreparedTrajectory a = prepare_trajectory(tv, dims_v, nullptr, unused);
  const PreparedTrajectory b = prepare_trajectory(to, dims_o, nullptr, unused);
  return interact(a, b).gtc;
}

std::vector<double> constraint_values(const TimedTrajectory& tv, const TimedTrajectory& to,
                                      const VehicleDims& dims_v, const VehicleDims& dims_o,
                                      const IntersectionLayout& layout, const SafetyParams& params) {
  const PreparedTrajectory a = prepare_trajectory(tv, dims_v, &layout, params);
  const PreparedTrajectory b = prepare_trajectory(to, dims_o, &layout, params);
  return interact(a, b).violations_a;
}

bool footprint_in_conflict_zone(const Obb& box, const IntersectionLayout& layout) {
  const double l = layout.lane_width();
  const Obb zone({Vec2{-l, -l}, Vec2{l, -l}, Vec2{l, l}, Vec2{-l, l}});
  for (const Obb* owner : {&box, &zone}) {
    for (Vec2 axis : owner->axes()) {
      if (interval_gap(box, zone, axis) > 0.0) return false;
    }
  }
  return true;
}

}  // namespace gtp
