#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gtp/collision.hpp"
#include "oracles.hpp"

namespace gtp {
namespace {

constexpr double kPi = std::numbers::pi;

Obb square(double cx, double cy, double side = 1.0) {
  const double h = side / 2;
  return Obb({Vec2{cx - h, cy - h}, Vec2{cx + h, cy - h}, Vec2{cx + h, cy + h}, Vec2{cx - h, cy + h}});
}


Obb random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-5.0, 5.0), sz(0.3, 4.0), ang(-kPi, kPi);
  return footprint(Pose(c(rng), c(rng), ang(rng)), VehicleDims{sz(rng), 0.1, sz(rng)});
}

TEST(Footprint, AxisAligned) {
  const auto b = footprint(Pose(0, 0, 0), VehicleDims{});
  for (Vec2 v : b.vertices()) {
    EXPECT_NEAR(std::abs(v.x), 1.95, 1e-15);
    EXPECT_NEAR(std::abs(v.y), 0.95, 1e-15);
  }
  EXPECT_NEAR(b.area(), 3.9 * 1.9, 1e-12);
}

TEST(Footprint, QuarterTurn) {
  const auto b = footprint(Pose(0, 0, kPi / 2), VehicleDims{});
  for (Vec2 v : b.vertices()) {
    EXPECT_NEAR(std::abs(v.x), 0.95, 1e-12);
    EXPECT_NEAR(std::abs(v.y), 1.95, 1e-12);
  }
}

TEST(Footprint, AreaPreservedEverywhere) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 100; ++i) {
    const auto b = footprint(Pose(u(rng), u(rng), u(rng)), VehicleDims{});
    EXPECT_NEAR(b.area(), 3.9 * 1.9, 1e-9);
  }
}

TEST(Obb, RejectsClockwiseOrNonRectangle) {
  EXPECT_THROW(Obb({Vec2{0, 0}, Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}}), DomainError);
  EXPECT_THROW(Obb({Vec2{0, 0}, Vec2{2, 0}, Vec2{1, 1}, Vec2{0, 1}}), DomainError);
}

TEST(VehicleDims, Validation) {
  EXPECT_THROW((VehicleDims{3.9, 4.0, 1.9}.validate()), DomainError);
  EXPECT_THROW((VehicleDims{-1.0, 0.5, 1.9}.validate()), DomainError);
  EXPECT_NO_THROW(VehicleDims{}.validate());
}

TEST(Project, UnitSquare) {
  const auto s = square(0, 0);
  auto i = project(s, {1, 0});
  EXPECT_DOUBLE_EQ(i.min, -0.5);
  EXPECT_DOUBLE_EQ(i.max, 0.5);
  const double r = std::sqrt(0.5);
  i = project(s, {r, r});
  EXPECT_NEAR(i.min, -r, 1e-15);
  EXPECT_NEAR(i.max, r, 1e-15);
  EXPECT_THROW(project(s, {1.0, 1.0}), DomainError);
}

TEST(Project, MatchesEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int n = 0; n < 200; ++n) {
    const auto b = random_box(rng);
    const double a = ang(rng);
    const Vec2 axis{std::cos(a), std::sin(a)};
    double lo = INFINITY, hi = -INFINITY;
    for (Vec2 v : b.vertices()) {
      lo = std::fmin(lo, v.x * axis.x + v.y * axis.y);
      hi = std::fmax(hi, v.x * axis.x + v.y * axis.y);
    }
    const auto i = project(b, axis);
    EXPECT_NEAR(i.min, lo, 1e-12);
    EXPECT_NEAR(i.max, hi, 1e-12);
  }
}

TEST(Gtc, Examples) {
  EXPECT_EQ(gtc(square(0, 0), square(0, 0)), 0.0);
  EXPECT_NEAR(gtc(square(0, 0), square(3, 0)), 2.0, 1e-15);
  EXPECT_EQ(gtc(square(0, 0), square(1, 0)), 0.0);  // touching
}

TEST(Gtc, OracleAgreementOnRandomPairs) {
  std::mt19937_64 rng(42);
  int separated = 0;
  for (int n = 0; n < 1000; ++n) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double g = gtc(a, b);
    const bool hit = oracle::polygons_intersect(a.vertices(), b.vertices());
    EXPECT_EQ(g > 0.0, !hit);
    EXPECT_LE(g, oracle::polygon_distance(a.vertices(), b.vertices()) + 1e-9);
    EXPECT_EQ(g, gtc(b, a));
    separated += g > 0.0;
  }
  EXPECT_GT(separated, 100);
  EXPECT_LT(separated, 900);
}

TEST(Gtc, RigidMotionInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0), ang(-kPi, kPi);
  for (int n = 0; n < 200; ++n) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const RigidTransform t(ang(rng), {u(rng), u(rng)});
    auto move = [&](const Obb& o) {
      std::array<Vec2, 4> v;
      for (int i = 0; i < 4; ++i) v[i] = t.apply(o.vertices()[i]);
      return Obb(v);
    };
    EXPECT_NEAR(gtc(move(a), move(b)), gtc(a, b), 1e-9);
  }
}

TEST(EllipseZone, SemiAxes) {
  const auto z = ellipse_zone(Pose(0, 0, 0), 13.0, VehicleDims{}, 2.0, 0.2);
  EXPECT_NEAR(z.semi_major, 27.95, 1e-12);
  EXPECT_NEAR(z.semi_minor, 1.15, 1e-12);
  EXPECT_NEAR(ellipse_zone(Pose(0, 0, 0), 0.0, VehicleDims{}, 2.0, 0.2).semi_major, 1.95, 1e-15);
  EXPECT_THROW(ellipse_zone(Pose(0, 0, 0), -1.0, VehicleDims{}, 2.0, 0.2), DomainError);
}

TEST(EllipseZone, GrowthSlopeIsTtc) {
  const auto a = ellipse_zone(Pose(0, 0, 0), 3.0, VehicleDims{}, 2.0, 0.2);
  const auto b = ellipse_zone(Pose(0, 0, 0), 4.0, VehicleDims{}, 2.0, 0.2);
  EXPECT_NEAR(b.semi_major - a.semi_major, 2.0, 1e-12);
}

TEST(EllipseExcludes, Examples) {
  const double th = 0.6;
  const auto z = ellipse_zone(Pose(3, -2, th), 5.0, VehicleDims{}, 2.0, 0.2);
  auto e = ellipse_excludes(z, z.center);
  EXPECT_FALSE(e.ok);
  EXPECT_EQ(e.margin, 0.0);
  const double d = z.semi_major;
  e = ellipse_excludes(z, z.center + Vec2{d * std::cos(th), d * std::sin(th)});
  EXPECT_NEAR(e.margin, 1.0, 1e-12);
  e = ellipse_excludes(z, z.center + Vec2{2 * d * std::cos(th), 2 * d * std::sin(th)});
  EXPECT_NEAR(e.margin, 4.0, 1e-12);
  EXPECT_TRUE(e.ok);
}

TEST(EllipseExcludes, MonotoneAlongRays) {
  const auto z = ellipse_zone(Pose(1, 1, -0.3), 7.0, VehicleDims{}, 2.0, 0.2);
  for (double a = 0.0; a < 2 * kPi; a += 0.3) {
    double prev = -1.0;
    for (double r = 0.1; r < 40.0; r += 0.7) {
      const double m = ellipse_excludes(z, z.center + Vec2{r * std::cos(a), r * std::sin(a)}).margin;
      EXPECT_GT(m, prev);
      prev = m;
    }
  }
}

TEST(EllipseExcludes, AgreesWithDirectPointInEllipse) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-30.0, 30.0), ang(-kPi, kPi);
  for (int n = 0; n < 500; ++n) {
    const auto z = ellipse_zone(Pose(u(rng), u(rng), ang(rng)), std::abs(u(rng)) / 3, VehicleDims{}, 2.0, 0.2);
    const Vec2 p{u(rng), u(rng)};
    // Rotate p into the zone frame the other way round: by -theta.
    const double c = std::cos(-z.theta), s = std::sin(-z.theta);
    const double lx = c * (p.x - z.center.x) - s * (p.y - z.center.y);
    const double ly = s * (p.x - z.center.x) + c * (p.y - z.center.y);
    const double m = (lx * lx) / (z.semi_major * z.semi_major) + (ly * ly) / (z.semi_minor * z.semi_minor);
    EXPECT_NEAR(ellipse_excludes(z, p).margin, m, 1e-9 * std::max(1.0, m));
  }
}

TimedTrajectory line_traj(Pose start, double speed, double duration, double t0 = 0.0) {
  const PathSpec p({ClothoidSegment::straight(start, std::max(speed * duration, 1e-3))}, TurnKind::Straight);
  if (speed == 0.0) {
    TimedTrajectory t;
    t.dt = 0.1;
    t.t_start = t0;
    for (int k = 0; k <= static_cast<int>(std::lround(duration / 0.1)); ++k) {
      t.states.push_back({t0 + 0.1 * k, start, 0.0, 0.0});
    }
    t.duration = duration;
    return t;
  }
  return sample_trajectory(p, speed_profile(p, SpeedLimits{speed, 2.0, 2.5}), 0.1, 0.0, t0);
}

TEST(GtcSeries, ParallelLanes) {
  const auto a = line_traj(Pose(0, 0, 0), 10.0, 5.0);
  const auto b = line_traj(Pose(0, 10, 0), 10.0, 5.0);
  const auto s = gtc_series(a, b, VehicleDims{}, VehicleDims{});
  ASSERT_EQ(s.samples.size(), a.states.size());
  for (const auto& x : s.samples) EXPECT_NEAR(x.gtc, 10.0 - 1.9, 1e-9);
  EXPECT_NEAR(s.min_gtc, 8.1, 1e-9);
}

TEST(GtcSeries, HeadOnReachesZero) {
  const auto a = line_traj(Pose(0, 0, 0), 10.0, 6.0);
  const auto b = line_traj(Pose(60, 0, kPi), 10.0, 6.0);
  const auto s = gtc_series(a, b, VehicleDims{}, VehicleDims{});
  EXPECT_EQ(s.min_gtc, 0.0);
  EXPECT_GT(s.t_crit, 2.0);
  EXPECT_LT(s.t_crit, 3.0);
}

TEST(GtcSeries, WindowIsTheOverlap) {
  const auto a = line_traj(Pose(0, 0, 0), 10.0, 5.0, 0.0);
  const auto b = line_traj(Pose(0, 10, 0), 10.0, 5.0, 3.0);
  const auto s = gtc_series(a, b, VehicleDims{}, VehicleDims{});
  ASSERT_FALSE(s.samples.empty());
  EXPECT_NEAR(s.samples.front().t, 3.0, 1e-9);
  EXPECT_NEAR(s.samples.back().t, 5.0, 1e-9);
}

TEST(GtcSeries, DisjointSupportsThrow) {
  const auto a = line_traj(Pose(0, 0, 0), 10.0, 1.0, 0.0);
  const auto b = line_traj(Pose(0, 10, 0), 10.0, 1.0, 5.0);
  EXPECT_THROW(gtc_series(a, b, VehicleDims{}, VehicleDims{}), EmptyWindowError);
}

TEST(ConstraintValues, FarFieldIsClear) {
  const IntersectionLayout layout(3.5, 80.0, 80.0);
  const auto ego = line_traj(Pose(1.75, -60, kPi / 2), 5.0, 4.0);
  const auto opp = line_traj(Pose(-1.75, 60, -kPi / 2), 0.0, 4.0);
  for (double v : constraint_values(ego, opp, VehicleDims{}, VehicleDims{}, layout, SafetyParams{})) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(ConstraintValues, VertexOnCenterIsFullViolation) {
  const IntersectionLayout layout(3.5, 80.0, 80.0);
  // Opponent parked so that its front-right corner sits on the ego COG.
  const Pose ego_pose(0.5, 0.5, kPi / 2);
  const auto ego = line_traj(ego_pose, 0.0, 0.2);
  const Pose opp_pose(0.5 - 1.95, 0.5 + 0.95, 0.0);
  const auto opp = line_traj(opp_pose, 0.0, 0.2);
  const auto v = constraint_values(ego, opp, VehicleDims{}, VehicleDims{}, layout, SafetyParams{});
  ASSERT_FALSE(v.empty());
  EXPECT_NEAR(v.front(), 1.0, 1e-12);
}

TEST(ConstraintValues, LaneKeepingFlagsDriftOntoDivider) {
  const IntersectionLayout layout(3.5, 80.0, 80.0);
  const auto centred = line_traj(Pose(1.75, -40, kPi / 2), 0.0, 0.2);
  const auto drifted = line_traj(Pose(0.3, -40, kPi / 2), 0.0, 0.2);
  const auto far = line_traj(Pose(-60, 60, 0), 0.0, 0.2);
  EXPECT_EQ(constraint_values(centred, far, VehicleDims{}, VehicleDims{}, layout, SafetyParams{}).front(), 0.0);
  EXPECT_GT(constraint_values(drifted, far, VehicleDims{}, VehicleDims{}, layout, SafetyParams{}).front(), 0.0);
}

TEST(ConflictZone, FootprintOverlap) {
  const IntersectionLayout layout(3.5, 80.0, 80.0);
  EXPECT_TRUE(footprint_in_conflict_zone(footprint(Pose(1.75, -4.0, kPi / 2), VehicleDims{}), layout));
  EXPECT_FALSE(footprint_in_conflict_zone(footprint(Pose(1.75, -6.0, kPi / 2), VehicleDims{}), layout));
}

}  // namespace
}  // namespace gtp
