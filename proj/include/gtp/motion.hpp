#pragma once

#include <optional>
#include <vector>

#include "gtp/geometry.hpp"

namespace gtp {

struct SpeedLimits {
  double v_max = 13.0;
  double a_lat_max = 2.0;
  double a_long_max = 2.5;
};

/// Speeds imposed at the two ends of a profile. Negative means v_max.
struct BoundarySpeeds {
  double entry = -1.0;
  double exit = -1.0;
};

struct SpeedSample {
  double s = 0.0;  // arc length along the path
  double speed = 0.0;
};

/// Speed as a function of arc length; between samples speed^2 is linear in s
/// (constant longitudinal acceleration).
struct SpeedProfile {
  std::vector<SpeedSample> samples;
  SpeedLimits limits;
  /// Entry speed that was requested; samples.front().speed is lower when the
  /// vehicle cannot brake in time for the first curve.
  double requested_entry = 0.0;

  double start_s() const { return samples.front().s; }
  double end_s() const { return samples.back().s; }
  bool entry_feasible() const { return samples.front().speed >= requested_entry - 1e-9; }
  /// Kinematic traversal time.
  double traversal_time() const;
  double speed_at(double s) const;
};

/// Curvature-capped speed profile on [s_begin, s_end] of path (defaults to the
/// whole path), smoothed by forward and backward acceleration passes.
SpeedProfile speed_profile(const PathSpec& path, const SpeedLimits& limits,
                           BoundarySpeeds boundary = {}, double s_begin = 0.0, double s_end = -1.0);

struct TrajectoryState {
  double t = 0.0;
  Pose pose;
  double speed = 0.0;
  double s = 0.0;  // path arc length
};

struct StopInterval {
  double t1 = 0.0;
  double t2 = 0.0;
};

struct TimedTrajectory {
  double dt = 0.1;
  double t_start = 0.0;
  std::vector<TrajectoryState> states;
  double wait_time = 0.0;
  /// Exact kinematic duration including the wait; the last grid state is
  /// clamped to the path end.
  double duration = 0.0;
  double distance = 0.0;
  /// Set when the wait happens at a stop point instead of at the start.
  std::optional<StopInterval> stop;

  double t_end() const { return states.empty() ? t_start : states.back().t; }
};

/// Samples on the grid t_start + k dt. The vehicle holds its first pose for
/// wait_time and then follows profile.
TimedTrajectory sample_trajectory(const PathSpec& path, const SpeedProfile& profile, double dt,
                                  double wait_time, double t_start);

/// Drives approach (ending at rest), waits wait_time, then drives departure.
/// approach.end_s() must equal departure.start_s().
TimedTrajectory sample_trajectory_with_stop(const PathSpec& path, const SpeedProfile& approach,
                                            const SpeedProfile& departure, double dt,
                                            double wait_time, double t_start);

/// Time-weighted mean speed over the full duration, wait included.
double average_speed(const TimedTrajectory& traj);

}  // namespace gtp
