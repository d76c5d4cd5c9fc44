#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gtp/geometry.hpp"
#include "gtp/motion.hpp"

namespace gtp {

struct VehicleDims {
  double length = 3.9;     // L_v
  double wheelbase = 1.9;  // l_v
  double width = 1.9;

  void validate() const;
};

/// Rectangle given by 4 counter-clockwise corners.
class Obb {
 public:
  explicit Obb(const std::array<Vec2, 4>& ccw_vertices);

  const std::array<Vec2, 4>& vertices() const { return vertices_; }
  /// Unit outward normals of the first two edges; the other two are their
  /// negations.
  const std::array<Vec2, 2>& axes() const { return axes_; }
  double area() const;

 private:
  std::array<Vec2, 4> vertices_;
  std::array<Vec2, 2> axes_;
};

Obb footprint(const Pose& pose, const VehicleDims& dims);

struct Interval {
  double min = 0.0;
  double max = 0.0;
};

/// Extent of obb along a unit axis. Throws DomainError for non-unit axes.
Interval project(const Obb& obb, Vec2 axis);

/// Gap To Collision: the largest separating-axis interval gap over the four
/// edge normals, clamped at zero.
double gtc(const Obb& a, const Obb& b);

struct EllipseZone {
  Vec2 center;
  double theta = 0.0;
  double semi_major = 0.0;  // along theta
  double semi_minor = 0.0;
};

struct SafetyParams {
  double ttc = 2.0;     // s
  double d_safe = 0.2;  // m
};

EllipseZone ellipse_zone(const Pose& pose, double speed, const VehicleDims& dims, double ttc,
                         double d_safe);

struct Exclusion {
  bool ok = false;
  double margin = 0.0;
};

/// Quadratic-form test of p against the zone; ok iff margin > 1.
Exclusion ellipse_excludes(const EllipseZone& zone, Vec2 p);

struct GtcSample {
  double t = 0.0;
  double gtc = 0.0;
};

struct GtcSeries {
  std::vector<GtcSample> samples;
  double min_gtc = 0.0;
  double t_crit = 0.0;  // first instant attaining min_gtc
};

/// Index range shared by two trajectories on one time grid.
struct SharedWindow {
  std::size_t first_a = 0;
  std::size_t first_b = 0;
  std::size_t count = 0;
};

/// Throws EmptyWindowError when the supports are disjoint or the grids differ.
SharedWindow shared_window(const TimedTrajectory& a, const TimedTrajectory& b);

GtcSeries gtc_series(const TimedTrajectory& tv, const TimedTrajectory& to, const VehicleDims& dims_v,
                     const VehicleDims& dims_o);

/// Per shared instant, the largest constraint violation of the ego (tv): the
/// opponent's footprint vertices against the ego safety ellipse, and, while
/// the ego center is outside the conflict zone, the closest point of every
/// lane boundary. All zeros means the constraints hold.
std::vector<double> constraint_values(const TimedTrajectory& tv, const TimedTrajectory& to,
                                      const VehicleDims& dims_v, const VehicleDims& dims_o,
                                      const IntersectionLayout& layout, const SafetyParams& params);

/// Per-state quantities that depend on one vehicle only.
struct PreparedTrajectory {
  const TimedTrajectory* traj = nullptr;
  VehicleDims dims;
  std::vector<Obb> boxes;
  std::vector<EllipseZone> zones;
  std::vector<double> lane_violation;
};

/// layout may be null to skip lane keeping.
PreparedTrajectory prepare_trajectory(const TimedTrajectory& traj, const VehicleDims& dims,
                                      const IntersectionLayout* layout, const SafetyParams& params);

/// Violation of one zone by a box's vertices: max(0, 1 - margin).
double ellipse_violation(const EllipseZone& zone, const Obb& box);

/// Lane-keeping violation of a pose's zone, zero inside the conflict zone.
double lane_violation(const EllipseZone& zone, const IntersectionLayout& layout);

struct Interaction {
  GtcSeries gtc;
  std::vector<double> violations_a;
  std::vector<double> violations_b;
};

/// Everything two vehicles do to each other over their shared window.
Interaction interact(const PreparedTrajectory& a, const PreparedTrajectory& b);

/// The extremes of an Interaction without the per-instant series.
struct InteractionSummary {
  double min_gtc = 0.0;
  double t_crit = 0.0;
  double max_violation_a = 0.0;
  double max_violation_b = 0.0;
};

/// Same numbers as interact(), skipping instants where distance bounds prove
/// that neither the minimum nor the violations can change.
InteractionSummary summarize(const PreparedTrajectory& a, const PreparedTrajectory& b);

/// Exact test: does the footprint overlap the conflict zone polygon.
bool footprint_in_conflict_zone(const Obb& box, const IntersectionLayout& layout);

}  // namespace gtp
