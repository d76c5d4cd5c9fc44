#include "gtp/motion.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

namespace gtp {
namespace {

constexpr double kGridStep = 0.5;  // meters between profile samples

void check_limits(const SpeedLimits& l) {
  if (!(l.v_max > 0.0) || !(l.a_lat_max > 0.0) || !(l.a_long_max > 0.0) || !std::isfinite(l.v_max) ||
      !std::isfinite(l.a_lat_max) || !std::isfinite(l.a_long_max)) {
    throw DomainError("speed_profile: limits must be positive and finite");
  }
}

// Constant-acceleration motion through the cells of one profile.
class ProfileMotion {
 public:
  explicit ProfileMotion(const SpeedProfile& p) : profile_(&p) {
    const auto& smp = p.samples;
    times_.resize(smp.size(), 0.0);
    for (std::size_t i = 1; i < smp.size(); ++i) {
      const double ds = smp[i].s - smp[i - 1].s;
      const double vsum = smp[i].speed + smp[i - 1].speed;
      if (!(vsum > 0.0)) throw DomainError("speed profile stalls between two samples");
      times_[i] = times_[i - 1] + 2.0 * ds / vsum;
    }
  }

  double duration() const { return times_.back(); }

  // (arc length, speed) at time tau into the profile.
  std::pair<double, double> at(double tau) const {
    const auto& smp = profile_->samples;
    if (tau <= 0.0) return {smp.front().s, smp.front().speed};
    if (tau >= times_.back()) return {smp.back().s, smp.back().speed};
    const auto it = std::upper_bound(times_.begin(), times_.end(), tau);
    const std::size_t i = static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
    const double ds = smp[i + 1].s - smp[i].s;
    const double v0 = smp[i].speed;
    const double v1 = smp[i + 1].speed;
    const double acc = (v1 * v1 - v0 * v0) / (2.0 * ds);
    const double local = tau - times_[i];
    const double s = std::min(smp[i].s + (v0 + 0.5 * acc * local) * local, smp[i + 1].s);
    return {s, std::max(0.0, v0 + acc * local)};
  }

 private:
  const SpeedProfile* profile_;
  std::vector<double> times_;
};

struct Phase {
  const ProfileMotion* motion = nullptr;  // null for a hold
  double hold = 0.0;
  double hold_s = 0.0;
};

TimedTrajectory sample_phases(const PathSpec& path, const std::vector<Phase>& phases, double dt,
                              double t_start) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("sample_trajectory: dt must be positive");
  if (!std::isfinite(t_start)) throw DomainError("sample_trajectory: non-finite t_start");

  double total = 0.0;
  for (const auto& ph : phases) total += ph.motion ? ph.motion->duration() : ph.hold;
  const auto steps = static_cast<long>(std::ceil(total / dt - 1e-9));

  TimedTrajectory traj;
  traj.dt = dt;
  traj.t_start = t_start;
  traj.duration = total;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  for (long k = 0; k <= steps; ++k) {
    double tau = std::min(static_cast<double>(k) * dt, total);
    double s = 0.0;
    double v = 0.0;
    for (const auto& ph : phases) {
      const double span = ph.motion ? ph.motion->duration() : ph.hold;
      const bool last = &ph == &phases.back();
      if (ph.motion == nullptr) {
        if (tau < span - 1e-9 * dt || last) {
          s = ph.hold_s;
          v = 0.0;
          break;
        }
      } else if (tau <= span || last) {
        std::tie(s, v) = ph.motion->at(tau);
        break;
      }
      tau -= span;
    }
    const CurvePoint cp = path.eval(s);
    traj.states.push_back({t_start + static_cast<double>(k) * dt, cp.pose, v, s});
  }
  traj.distance = traj.states.back().s - traj.states.front().s;
  return traj;
}

}  // namespace

double SpeedProfile::traversal_time() const { return ProfileMotion(*this).duration(); }

double SpeedProfile::speed_at(double s) const {
  if (!(s >= start_s() && s <= end_s())) {
    throw RangeError(fmt::format("SpeedProfile::speed_at: s={} outside profile", s));
  }
  auto it = std::upper_bound(samples.begin(), samples.end(), s,
                             [](double v, const SpeedSample& smp) { return v < smp.s; });
  if (it == samples.end()) return samples.back().speed;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (s - a.s) / (b.s - a.s);
  return std::sqrt((1.0 - w) * a.speed * a.speed + w * b.speed * b.speed);
}

SpeedProfile speed_profile(const PathSpec& path, const SpeedLimits& limits, BoundarySpeeds boundary,
                           double s_begin, double s_end) {
  check_limits(limits);
  const double total = path.total_length();
  if (s_end < 0.0) s_end = total;
  if (!(s_begin >= 0.0 && s_end <= total && s_begin < s_end)) {
    throw RangeError(fmt::format("speed_profile: bad arc range [{}, {}]", s_begin, s_end));
  }
  const double entry = boundary.entry < 0.0 ? limits.v_max : std::min(boundary.entry, limits.v_max);
  const double exit = boundary.exit < 0.0 ? limits.v_max : std::min(boundary.exit, limits.v_max);

  std::vector<double> breaks{s_begin};
  for (std::size_t i = 1; i < path.segments().size(); ++i) {
    const double b = path.segment_start(i);
    if (b > s_begin && b < s_end) breaks.push_back(b);
  }
  breaks.push_back(s_end);

  SpeedProfile prof;
  prof.limits = limits;
  prof.requested_entry = entry;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    if (len <= 0.0) continue;
    const int n = std::max(1, static_cast<int>(std::ceil(len / kGridStep)));
    for (int k = 0; k < n; ++k) prof.samples.push_back({breaks[i] + len * k / n, 0.0});
  }
  prof.samples.push_back({s_end, 0.0});

  auto& smp = prof.samples;
  // |kappa| is linear inside a cell, so its cell maximum sits at an end. Capping
  // each sample by both neighbouring cells keeps the interpolated speed under
  // the cap everywhere, not just at samples.
  std::vector<double> kappa(smp.size());
  for (std::size_t i = 0; i < smp.size(); ++i) kappa[i] = path.max_abs_curvature_at(smp[i].s);
  for (std::size_t i = 0; i < smp.size(); ++i) {
    double k = kappa[i];
    if (i > 0) k = std::max(k, kappa[i - 1]);
    if (i + 1 < smp.size()) k = std::max(k, kappa[i + 1]);
    smp[i].speed = k > 0.0 ? std::min(limits.v_max, std::sqrt(limits.a_lat_max / k)) : limits.v_max;
  }
  const double two_a = 2.0 * limits.a_long_max;
  smp.front().speed = std::min(smp.front().speed, entry);
  for (std::size_t i = 1; i < smp.size(); ++i) {
    const double reach = std::sqrt(smp[i - 1].speed * smp[i - 1].speed + two_a * (smp[i].s - smp[i - 1].s));
    smp[i].speed = std::min(smp[i].speed, reach);
  }
  smp.back().speed = std::min(smp.back().speed, exit);
  for (std::size_t i = smp.size() - 1; i-- > 0;) {
    const double reach = std::sqrt(smp[i + 1].speed * smp[i + 1].speed + two_a * (smp[i + 1].s - smp[i].s));
    smp[i].speed = std::min(smp[i].speed, reach);
  }
  return prof;
}

TimedTrajectory sample_trajectory(const PathSpec& path, const SpeedProfile& profile, double dt,
                                  double wait_time, double t_start) {
  if (!(wait_time >= 0.0) || !std::isfinite(wait_time)) {
    throw DomainError("sample_trajectory: wait_time must be non-negative");
  }
  const ProfileMotion motion(profile);
  std::vector<Phase> phases;
  if (wait_time > 0.0) phases.push_back({nullptr, wait_time, profile.start_s()});
  phases.push_back({&motion, 0.0, 0.0});
  TimedTrajectory traj = sample_phases(path, phases, dt, t_start);
  traj.wait_time = wait_time;
  return traj;
}

TimedTrajectory sample_trajectory_with_stop(const PathSpec& path, const SpeedProfile& approach,
                                            const SpeedProfile& departure, double dt,
                                            double wait_time, double t_start) {
  if (!(wait_time >= 0.0) || !std::isfinite(wait_time)) {
    throw DomainError("sample_trajectory_with_stop: wait_time must be non-negative");
  }
  if (approach.end_s() != departure.start_s()) {
    throw DomainError("sample_trajectory_with_stop: profiles do not meet");
  }
  if (approach.samples.back().speed != 0.0 || departure.samples.front().speed != 0.0) {
    throw DomainError("sample_trajectory_with_stop: vehicle must be at rest at the stop point");
  }
  const ProfileMotion first(approach);
  const ProfileMotion second(departure);
  std::vector<Phase> phases{{&first, 0.0, 0.0}, {nullptr, wait_time, approach.end_s()}, {&second, 0.0, 0.0}};
  TimedTrajectory traj = sample_phases(path, phases, dt, t_start);
  traj.wait_time = wait_time;
  const double t1 = t_start + first.duration();
  traj.stop = StopInterval{t1, t1 + wait_time};
  return traj;
}

double average_speed(const TimedTrajectory& traj) {
  if (traj.states.empty()) throw DomainError("average_speed: empty trajectory");
  if (traj.duration <= 0.0) return traj.states.front().speed;
  return traj.distance / traj.duration;
}

}  // namespace gtp
