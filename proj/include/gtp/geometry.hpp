#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "gtp/errors.hpp"

namespace gtp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Planar configuration; theta is kept in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose() = default;
  Pose(double x_, double y_, double theta_);

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return {std::cos(theta), std::sin(theta)}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Proper rigid motion (rotation then translation), optionally followed by a
/// reflection about the local y axis applied before the rotation.
class RigidTransform {
 public:
  RigidTransform() = default;
  RigidTransform(double rotation, Vec2 translation, bool mirror_x = false)
      : rotation_(rotation), translation_(translation), mirror_x_(mirror_x) {}

  Vec2 apply(Vec2 p) const;
  Pose apply(const Pose& p) const;
  /// Curvature sign flips under reflection.
  double curvature_sign() const { return mirror_x_ ? -1.0 : 1.0; }
  RigidTransform inverse() const;

 private:
  double rotation_ = 0.0;
  Vec2 translation_{};
  bool mirror_x_ = false;
};

/// Standard Fresnel integrals C(s), S(s) with the pi/2 normalisation.
struct FresnelPair {
  double c = 0.0;
  double s = 0.0;
};
FresnelPair fresnel(double s);

/// Generalised Fresnel moments
///   X_k = int_0^1 t^k cos(a t^2/2 + b t + c) dt,  Y_k likewise with sin,
/// for k = 0, 1, 2.
struct FresnelMoments {
  std::array<double, 3> x{};
  std::array<double, 3> y{};
};
FresnelMoments fresnel_moments(double a, double b, double c);

/// Linear-curvature arc: kappa(s) = kappa0 + sharpness * s on [0, length].
struct ClothoidSegment {
  Pose start;
  double kappa0 = 0.0;
  double sharpness = 0.0;
  double length = 0.0;

  static ClothoidSegment straight(const Pose& start, double length);
  bool is_straight() const { return kappa0 == 0.0 && sharpness == 0.0; }
  double curvature_at(double s) const { return kappa0 + sharpness * s; }
  ClothoidSegment transformed(const RigidTransform& t) const;
};

struct CurvePoint {
  Pose pose;
  double kappa = 0.0;
};

/// Pose and curvature at arc length s of seg. Throws RangeError outside
/// [0, length].
CurvePoint eval_segment(const ClothoidSegment& seg, double s);

/// Canonical G1 Hermite clothoid from a to b.
ClothoidSegment fit_g1(const Pose& a, const Pose& b);

enum class TurnKind { LeftTurn, RightTurn, Straight };

struct JunctionResidual {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
  double dkappa = 0.0;
};

struct G2Tolerance {
  static constexpr double position = 1e-6;
  static constexpr double heading = 1e-8;
  static constexpr double curvature = 1e-6;
};

bool within_g2_tolerance(const JunctionResidual& r);
/// Position and heading only.
bool within_g1_tolerance(const JunctionResidual& r);

class PathSpec {
 public:
  PathSpec() = default;
  PathSpec(std::vector<ClothoidSegment> segments, TurnKind kind);

  const std::vector<ClothoidSegment>& segments() const { return segments_; }
  TurnKind kind() const { return kind_; }
  double total_length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  /// Arc length at which segment i starts.
  double segment_start(std::size_t i) const { return cumulative_[i]; }

  /// Evaluates at global arc length s in [0, total_length()].
  CurvePoint eval(double s) const;
  /// Largest |kappa| over the two sides of s (differs only at junctions).
  double max_abs_curvature_at(double s) const;

  PathSpec transformed(const RigidTransform& t) const;

 private:
  std::size_t locate(double s) const;

  std::vector<ClothoidSegment> segments_;
  std::vector<double> cumulative_;
  TurnKind kind_ = TurnKind::Straight;
};

std::vector<JunctionResidual> check_g2(const PathSpec& path);

/// Largest curvature jump over all junctions of path.
double max_curvature_jump(const PathSpec& path);

struct WaypointSet {
  Vec2 p2;
  Vec2 p3;
};

/// A four-arm crossing of two-lane roads with right-hand traffic.
///
/// Global frame: the intersection center is the origin and the conflict zone
/// is the square [-l, l]^2. Each approach arm also has a local frame in which
/// vehicles drive along +y on the lane centerline x = l/2, start at y = 0 and
/// reach the conflict zone at y = R, so the turn entry pose is (l/2, R, pi/2).
/// Waypoints are expressed in this local frame.
class IntersectionLayout {
 public:
  IntersectionLayout(double lane_width, double approach_distance, double exit_length);

  double lane_width() const { return lane_width_; }
  double approach_distance() const { return approach_distance_; }
  double exit_length() const { return exit_length_; }

  /// Global heading of traffic arriving on each arm: from south, north, east, west.
  const std::vector<double>& arm_headings() const { return arm_headings_; }
  const std::vector<Vec2>& conflict_zone() const { return conflict_zone_; }
  const std::vector<std::vector<Vec2>>& lane_boundaries() const { return lane_boundaries_; }

  Pose turn_entry_pose() const;
  Vec2 local_center() const;
  /// Local-frame heading of the exit lane for a turn kind.
  static double exit_heading(TurnKind kind);
  /// Local-frame point on the exit-lane centerline at distance d past the
  /// conflict-zone edge.
  Vec2 exit_lane_point(TurnKind kind, double d) const;

  /// Local frame of arm i to global frame.
  RigidTransform arm_to_global(std::size_t arm) const;

  bool in_conflict_zone(Vec2 global_point) const;

 private:
  double lane_width_;
  double approach_distance_;
  double exit_length_;
  std::vector<double> arm_headings_;
  std::vector<Vec2> conflict_zone_;
  std::vector<std::vector<Vec2>> lane_boundaries_;
};

/// Approach straight, two clothoids through p2 and p3, exit straight, all in
/// the arm-local frame. The p2 heading is the mean of entry and exit headings.
PathSpec build_turn_path(const IntersectionLayout& layout, const WaypointSet& w,
                         double exit_heading, TurnKind turn);

/// Nearest point on a polyline.
Vec2 closest_point_on_polyline(std::span<const Vec2> polyline, Vec2 p);

}  // namespace gtp
