#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gtp/geometry.hpp"

namespace gtp {

PathSpec::PathSpec(std::vector<ClothoidSegment> segments, TurnKind kind)
    : segments_(std::move(segments)), kind_(kind) {
  cumulative_.reserve(segments_.size() + 1);
  cumulative_.push_back(0.0);
  for (const auto& seg : segments_) {
    if (!(seg.length >= 0.0)) throw DomainError("PathSpec: negative segment length");
    cumulative_.push_back(cumulative_.back() + seg.length);
  }
}

std::size_t PathSpec::locate(double s) const {
  // Last segment whose start is <= s.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end() - 1, s);
  const auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, segments_.size() - 1);
}

CurvePoint PathSpec::eval(double s) const {
  if (segments_.empty()) throw RangeError("PathSpec::eval: empty path");
  if (!(s >= 0.0 && s <= total_length())) {
    throw RangeError(fmt::format("PathSpec::eval: s={} outside [0, {}]", s, total_length()));
  }
  const std::size_t i = locate(s);
  const double local = std::clamp(s - cumulative_[i], 0.0, segments_[i].length);
  return eval_segment(segments_[i], local);
}

double PathSpec::max_abs_curvature_at(double s) const {
  const std::size_t i = locate(s);
  const double local = std::clamp(s - cumulative_[i], 0.0, segments_[i].length);
  double k = std::abs(segments_[i].curvature_at(local));
  // Junction: also look at the segments that end exactly here.
  for (std::size_t j = i; j-- > 0;) {
    if (cumulative_[j + 1] != s) break;
    k = std::max(k, std::abs(segments_[j].curvature_at(segments_[j].length)));
  }
  return k;
}

PathSpec PathSpec::transformed(const RigidTransform& t) const {
  std::vector<ClothoidSegment> out;
  out.reserve(segments_.size());
  for (const auto& seg : segments_) out.push_back(seg.transformed(t));
  return PathSpec(std::move(out), kind_);
}

bool within_g1_tolerance(const JunctionResidual& r) {
  return std::abs(r.dx) < G2Tolerance::position && std::abs(r.dy) < G2Tolerance::position &&
         std::abs(r.dtheta) < G2Tolerance::heading;
}

bool within_g2_tolerance(const JunctionResidual& r) {
  return within_g1_tolerance(r) && std::abs(r.dkappa) < G2Tolerance::curvature;
}

std::vector<JunctionResidual> check_g2(const PathSpec& path) {
  const auto& segs = path.segments();
  std::vector<JunctionResidual> out;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const CurvePoint end = eval_segment(segs[i], segs[i].length);
    const ClothoidSegment& next = segs[i + 1];
    out.push_back({next.start.x - end.pose.x, next.start.y - end.pose.y,
                   wrap_angle(next.start.theta - end.pose.theta), next.kappa0 - end.kappa});
  }
  return out;
}

double max_curvature_jump(const PathSpec& path) {
  double worst = 0.0;
  for (const auto& r : check_g2(path)) worst = std::max(worst, std::abs(r.dkappa));
  return worst;
}

PathSpec build_turn_path(const IntersectionLayout& layout, const WaypointSet& w,
                         double exit_heading, TurnKind turn) {
  const Pose p1 = layout.turn_entry_pose();
  const double entry = p1.theta;
  const double sweep = wrap_angle(exit_heading - entry);
  if ((turn == TurnKind::LeftTurn && sweep < 0.0) || (turn == TurnKind::RightTurn && sweep > 0.0)) {
    throw InfeasibleGeometryError("build_turn_path: exit heading turns the wrong way", 0);
  }
  if (!std::isfinite(w.p2.x) || !std::isfinite(w.p2.y) || !std::isfinite(w.p3.x) ||
      !std::isfinite(w.p3.y)) {
    throw InfeasibleGeometryError("build_turn_path: non-finite waypoint", 0);
  }
  const Pose p2(w.p2.x, w.p2.y, entry + 0.5 * sweep);
  const Pose p3(w.p3.x, w.p3.y, exit_heading);

  if (dot(p2.position() - p1.position(), p1.heading()) <= 0.0) {
    throw InfeasibleGeometryError("build_turn_path: p2 is not downstream of p1", 0);
  }
  if (dot(p3.position() - p2.position(), p2.heading()) <= 0.0) {
    throw InfeasibleGeometryError("build_turn_path: p3 is not downstream of p2", 0);
  }

  const Pose start(p1.x, 0.0, entry);
  std::vector<ClothoidSegment> segs;
  segs.push_back(ClothoidSegment::straight(start, layout.approach_distance()));
  const Pose waypoints[] = {p1, p2, p3};
  for (std::size_t i = 0; i < 2; ++i) {
    try {
      segs.push_back(fit_g1(waypoints[i], waypoints[i + 1]));
    } catch (const std::exception& e) {
      throw InfeasibleGeometryError(fmt::format("build_turn_path: curve segment {}: {}", i + 1, e.what()),
                                    i + 1);
    }
  }
  segs.push_back(ClothoidSegment::straight(p3, layout.exit_length()));
  return PathSpec(std::move(segs), turn);
}

Vec2 closest_point_on_polyline(std::span<const Vec2> polyline, Vec2 p) {
  if (polyline.empty()) throw DomainError("closest_point_on_polyline: empty polyline");
  Vec2 best = polyline.front();
  double best_d2 = dot(p - best, p - best);
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Vec2 a = polyline[i];
    const Vec2 ab = polyline[i + 1] - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 q = a + t * ab;
    const double d2 = dot(p - q, p - q);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = q;
    }
  }
  return best;
}

}  // namespace gtp
