#include <algorithm>
#include <cmath>
#include <numbers>

#include "gtp/geometry.hpp"

namespace gtp {

namespace {
constexpr double kPi = std::numbers::pi;
}

IntersectionLayout::IntersectionLayout(double lane_width, double approach_distance, double exit_length)
    : lane_width_(lane_width), approach_distance_(approach_distance), exit_length_(exit_length) {
  if (!(lane_width > 0.0) || !std::isfinite(lane_width)) {
    throw DomainError("IntersectionLayout: lane_width must be positive");
  }
  if (!(approach_distance > 0.0) || !std::isfinite(approach_distance)) {
    throw DomainError("IntersectionLayout: approach_distance must be positive");
  }
  if (!(exit_length > 0.0) || !std::isfinite(exit_length)) {
    throw DomainError("IntersectionLayout: exit_length must be positive");
  }
  const double l = lane_width;
  arm_headings_ = {kPi / 2.0, -kPi / 2.0, kPi, 0.0};
  conflict_zone_ = {{-l, -l}, {l, -l}, {l, l}, {-l, l}};

  const double reach = l + std::max(approach_distance, exit_length);
  for (double heading : arm_headings_) {
    // Arms extend opposite to the arrival heading.
    const Vec2 out{-std::cos(heading), -std::sin(heading)};
    const Vec2 lateral{-out.y, out.x};
    for (double offset : {-l, 0.0, l}) {
      lane_boundaries_.push_back({offset * lateral + l * out, offset * lateral + reach * out});
    }
  }
}

Pose IntersectionLayout::turn_entry_pose() const {
  return {0.5 * lane_width_, approach_distance_, kPi / 2.0};
}

Vec2 IntersectionLayout::local_center() const { return {0.0, approach_distance_ + lane_width_}; }

double IntersectionLayout::exit_heading(TurnKind kind) {
  switch (kind) {
    case TurnKind::LeftTurn:
      return kPi;
    case TurnKind::RightTurn:
      return 0.0;
    case TurnKind::Straight:
      break;
  }
  return kPi / 2.0;
}

Vec2 IntersectionLayout::exit_lane_point(TurnKind kind, double d) const {
  const double l = lane_width_;
  const double r = approach_distance_;
  switch (kind) {
    case TurnKind::LeftTurn:
      return {-l - d, r + 1.5 * l};
    case TurnKind::RightTurn:
      return {l + d, r + 0.5 * l};
    case TurnKind::Straight:
      break;
  }
  return {0.5 * l, r + 2.0 * l + d};
}

RigidTransform IntersectionLayout::arm_to_global(std::size_t arm) const {
  const double rot = arm_headings_.at(arm) - kPi / 2.0;
  const double shift = -(approach_distance_ + lane_width_);
  return {rot, {-std::sin(rot) * shift, std::cos(rot) * shift}};
}

bool IntersectionLayout::in_conflict_zone(Vec2 p) const {
  return std::abs(p.x) <= lane_width_ && std::abs(p.y) <= lane_width_;
}

}  // namespace gtp
