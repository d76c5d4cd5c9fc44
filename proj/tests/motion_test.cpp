#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gtp/motion.hpp"
#include "oracles.hpp"

namespace gtp {
namespace {

constexpr double kPi = std::numbers::pi;

PathSpec straight_path(double len) {
  return PathSpec({ClothoidSegment::straight(Pose(0, 0, 0), len)}, TurnKind::Straight);
}

PathSpec left_turn() {
  const IntersectionLayout layout(3.5, 80.0, 80.0);
  const WaypointSet w{layout.local_center(), layout.exit_lane_point(TurnKind::LeftTurn, 0.0)};
  return build_turn_path(layout, w, kPi, TurnKind::LeftTurn);
}

TEST(SpeedProfile, StraightPathIsConstantVmax) {
  const auto prof = speed_profile(straight_path(130.0), SpeedLimits{});
  for (const auto& s : prof.samples) EXPECT_DOUBLE_EQ(s.speed, 13.0);
  EXPECT_DOUBLE_EQ(prof.start_s(), 0.0);
  EXPECT_DOUBLE_EQ(prof.end_s(), 130.0);
}

TEST(SpeedProfile, CircleIsCapped) {
  const PathSpec circle({ClothoidSegment{Pose(0, 0, 0), 0.2, 0.0, 20.0}}, TurnKind::LeftTurn);
  const auto prof = speed_profile(circle, SpeedLimits{13.0, 2.0, 2.5});
  for (const auto& s : prof.samples) EXPECT_NEAR(s.speed, std::sqrt(10.0), 1e-12);
  EXPECT_FALSE(prof.entry_feasible());
}

TEST(SpeedProfile, LeftTurnRespectsEveryCap) {
  const auto path = left_turn();
  const SpeedLimits lim;
  const auto prof = speed_profile(path, lim);
  const auto& smp = prof.samples;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    EXPECT_LE(smp[i].speed, lim.v_max + 1e-12);
    EXPECT_GE(smp[i].speed, 0.0);
    const double k = path.max_abs_curvature_at(smp[i].s);
    if (k > 0) EXPECT_LE(smp[i].speed, std::sqrt(lim.a_lat_max / k) + 1e-9);
    if (i > 0) {
      EXPECT_GT(smp[i].s, smp[i - 1].s);
      const double acc = (smp[i].speed * smp[i].speed - smp[i - 1].speed * smp[i - 1].speed) /
                         (2.0 * (smp[i].s - smp[i - 1].s));
      EXPECT_LE(std::abs(acc), lim.a_long_max + 1e-9);
    }
  }
  // Slows down for the turn.
  const double mid = path.segment_start(2);
  EXPECT_LT(prof.speed_at(mid), 13.0);
  EXPECT_DOUBLE_EQ(smp.front().speed, 13.0);
  EXPECT_DOUBLE_EQ(smp.back().speed, 13.0);
}

TEST(SpeedProfile, RejectsNonPositiveLimits) {
  EXPECT_THROW(speed_profile(straight_path(10.0), SpeedLimits{0.0, 2.0, 2.5}), DomainError);
  EXPECT_THROW(speed_profile(straight_path(10.0), SpeedLimits{13.0, -2.0, 2.5}), DomainError);
  EXPECT_THROW(speed_profile(straight_path(10.0), SpeedLimits{13.0, 2.0, 0.0}), DomainError);
}

TEST(SpeedProfile, BoundarySpeedsAreHonoured) {
  const auto prof = speed_profile(straight_path(100.0), SpeedLimits{}, BoundarySpeeds{0.0, 0.0});
  EXPECT_EQ(prof.samples.front().speed, 0.0);
  EXPECT_EQ(prof.samples.back().speed, 0.0);
  for (const auto& x : prof.samples) EXPECT_LE(x.speed, std::sqrt(2.5 * 100.0) + 1e-9);
}

TEST(SampleTrajectory, StraightConstantSpeed) {
  const auto path = straight_path(130.0);
  const auto traj = sample_trajectory(path, speed_profile(path, SpeedLimits{}), 0.1, 0.0, 0.0);
  EXPECT_EQ(traj.states.size(), 101u);
  EXPECT_NEAR(traj.duration, 10.0, 1e-12);
  EXPECT_NEAR(traj.states.back().pose.x, 130.0, 1e-9);
  EXPECT_NEAR(traj.states.back().t, 10.0, 1e-12);
  EXPECT_NEAR(average_speed(traj), 13.0, 1e-12);
}

TEST(SampleTrajectory, WaitPrefixHoldsPose) {
  const auto path = straight_path(130.0);
  const auto traj = sample_trajectory(path, speed_profile(path, SpeedLimits{}), 0.1, 2.0, 0.0);
  ASSERT_EQ(traj.states.size(), 121u);
  for (int k = 0; k < 20; ++k) {
    EXPECT_EQ(traj.states[k].pose, traj.states[0].pose);
    EXPECT_EQ(traj.states[k].speed, 0.0);
  }
  EXPECT_NEAR(traj.duration, 12.0, 1e-12);
}

TEST(SampleTrajectory, RejectsBadStep) {
  const auto path = straight_path(10.0);
  const auto prof = speed_profile(path, SpeedLimits{});
  EXPECT_THROW(sample_trajectory(path, prof, 0.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(sample_trajectory(path, prof, -0.1, 0.0, 0.0), DomainError);
  EXPECT_THROW(sample_trajectory(path, prof, 0.1, -1.0, 0.0), DomainError);
}

TEST(SampleTrajectory, GridAndMonotoneArcLength) {
  const auto path = left_turn();
  const auto traj = sample_trajectory(path, speed_profile(path, SpeedLimits{}), 0.1, 1.3, 4.0);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    EXPECT_NEAR(traj.states[k].t, 4.0 + 0.1 * static_cast<double>(k), 1e-9);
    if (k > 0) EXPECT_GE(traj.states[k].s, traj.states[k - 1].s);
    if (k > 0 && traj.states[k].t > 4.0 + 1.3 + 0.1) EXPECT_GT(traj.states[k].s, traj.states[k - 1].s);
  }
  EXPECT_NEAR(traj.states.back().s, path.total_length(), 1e-9);
}

TEST(SampleTrajectory, ArcLengthConsistentWithSpeed) {
  // Within a constant-acceleration cell the trapezoid rule is exact; across a
  // cell boundary the error is bounded by the acceleration change.
  const auto path = left_turn();
  const SpeedLimits lim;
  const auto prof = speed_profile(path, lim);
  const double dt = 0.1;
  const auto traj = sample_trajectory(path, prof, dt, 0.0, 0.0);
  const auto cell = [&](double s) {
    return std::upper_bound(prof.samples.begin(), prof.samples.end(), s,
                            [](double v, const SpeedSample& x) { return v < x.s; }) -
           prof.samples.begin();
  };
  int exact_steps = 0;
  for (std::size_t k = 1; k + 1 < traj.states.size(); ++k) {
    const auto& a = traj.states[k - 1];
    const auto& b = traj.states[k];
    const double err = std::abs((b.s - a.s) - 0.5 * (a.speed + b.speed) * dt);
    if (cell(a.s) == cell(b.s)) {
      EXPECT_LT(err, 1e-6 * dt);
      ++exact_steps;
    } else {
      EXPECT_LT(err, lim.a_long_max * dt * dt);
    }
  }
  EXPECT_GT(exact_steps, 0);
}

TEST(SampleTrajectory, SpeedCapsHoldAtSampledStates) {
  const auto path = left_turn();
  const SpeedLimits lim;
  const auto traj = sample_trajectory(path, speed_profile(path, lim), 0.05, 0.0, 0.0);
  for (const auto& st : traj.states) {
    EXPECT_LE(st.speed, lim.v_max + 1e-9);
    const double k = std::abs(path.eval(st.s).kappa);
    if (k > 0) EXPECT_LE(st.speed, std::sqrt(lim.a_lat_max / k) + 1e-9);
  }
}

TEST(SampleTrajectory, WaitAdditivity) {
  const auto path = left_turn();
  const auto prof = speed_profile(path, SpeedLimits{});
  const auto a = sample_trajectory(path, prof, 0.1, 0.0, 0.0);
  const auto b = sample_trajectory(path, prof, 0.1, 0.7, 0.0);
  EXPECT_NEAR(b.duration - a.duration, 0.7, 1e-12);
  // A wait that is a whole number of steps shifts the sequence exactly.
  const auto c = sample_trajectory(path, prof, 0.1, 0.5, 0.0);
  ASSERT_EQ(c.states.size(), a.states.size() + 5);
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    EXPECT_NEAR(c.states[k + 5].s, a.states[k].s, 1e-9);
    EXPECT_NEAR(c.states[k + 5].speed, a.states[k].speed, 1e-9);
    EXPECT_NEAR(c.states[k + 5].t - a.states[k].t, 0.5, 1e-9);
  }
}

TEST(SampleTrajectory, StopAndGo) {
  const auto path = straight_path(100.0);
  const SpeedLimits lim;
  const auto in = speed_profile(path, lim, BoundarySpeeds{-1.0, 0.0}, 0.0, 40.0);
  const auto out = speed_profile(path, lim, BoundarySpeeds{0.0, -1.0}, 40.0, 100.0);
  const auto traj = sample_trajectory_with_stop(path, in, out, 0.1, 3.0, 0.0);
  ASSERT_TRUE(traj.stop.has_value());
  EXPECT_NEAR(traj.stop->t2 - traj.stop->t1, 3.0, 1e-12);
  EXPECT_NEAR(traj.duration, in.traversal_time() + 3.0 + out.traversal_time(), 1e-12);
  for (const auto& st : traj.states) {
    if (st.t > traj.stop->t1 + 1e-9 && st.t < traj.stop->t2 - 1e-9) {
      EXPECT_NEAR(st.s, 40.0, 1e-12);
      EXPECT_EQ(st.speed, 0.0);
    }
  }
  EXPECT_NEAR(traj.states.back().s, 100.0, 1e-9);
}

TEST(AverageSpeed, HalfStoppedHalfMoving) {
  // 10 s at rest then 100 m at 10 m/s.
  const auto path = straight_path(100.0);
  const auto traj = sample_trajectory(path, speed_profile(path, SpeedLimits{10.0, 2.0, 2.5}), 0.1, 10.0, 0.0);
  EXPECT_NEAR(average_speed(traj), 5.0, 1e-12);
}

TEST(AverageSpeed, EmptyThrows) {
  EXPECT_THROW(average_speed(TimedTrajectory{}), DomainError);
}

TEST(AverageSpeed, MatchesQuadratureOfTravelTime) {
  // Independent travel time: integral of ds / v(s) with v^2 linear per cell.
  const auto path = left_turn();
  const auto prof = speed_profile(path, SpeedLimits{});
  double time = 0.0;
  for (std::size_t i = 1; i < prof.samples.size(); ++i) {
    const auto a = prof.samples[i - 1];
    const auto b = prof.samples[i];
    time += oracle::integrate(
        [&](double s) {
          const double w = (s - a.s) / (b.s - a.s);
          return 1.0 / std::sqrt((1 - w) * a.speed * a.speed + w * b.speed * b.speed);
        },
        a.s, b.s);
  }
  const auto traj = sample_trajectory(path, prof, 0.1, 0.0, 0.0);
  EXPECT_NEAR(traj.duration, time, 1e-9);
  EXPECT_NEAR(average_speed(traj), path.total_length() / time, 1e-9);
}

TEST(AverageSpeed, InvariantUnderRefinement) {
  const auto path = left_turn();
  const auto prof = speed_profile(path, SpeedLimits{});
  const double a = average_speed(sample_trajectory(path, prof, 0.1, 0.35, 0.0));
  const double b = average_speed(sample_trajectory(path, prof, 0.05, 0.35, 0.0));
  EXPECT_LT(std::abs(a - b), 1e-3);
}

}  // namespace
}  // namespace gtp
