#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gtp/game.hpp"

namespace gtp {

Strategy nominal_strategy(const IntersectionLayout& layout, TurnKind turn) {
  const double l = layout.lane_width();
  const double r = layout.approach_distance();
  const Vec2 p3 = layout.exit_lane_point(turn, 0.0);
  Vec2 p2 = layout.local_center();
  if (turn == TurnKind::RightTurn) p2 = {0.5 * l, r + 0.5 * l};
  if (turn == TurnKind::Straight) p2 = {0.5 * l, r + l};
  return {p2.x, p2.y, p3.x, p3.y};
}

StrategyBounds default_bounds(const IntersectionLayout& layout, TurnKind turn) {
  const double l = layout.lane_width();
  const double r = layout.approach_distance();
  const double q = 0.25 * l;
  StrategyBounds b;
  b.axes[0] = {-l, l};
  b.axes[1] = {r, r + 2.0 * l};
  switch (turn) {
    case TurnKind::LeftTurn:
      b.axes[2] = {-4.0 * l, -l};
      b.axes[3] = {r + 1.5 * l - q, r + 1.5 * l + q};
      break;
    case TurnKind::RightTurn:
      b.axes[2] = {l, 4.0 * l};
      b.axes[3] = {r + 0.5 * l - q, r + 0.5 * l + q};
      break;
    case TurnKind::Straight:
      b.axes[2] = {0.5 * l - q, 0.5 * l + q};
      b.axes[3] = {r + 2.0 * l, r + 5.0 * l};
      break;
  }
  return b;
}

PathSpec vehicle_path(const GameContext& ctx, const VehicleSetup& veh, const Strategy& s) {
  const PathSpec local = build_turn_path(ctx.layout, s.waypoints(), IntersectionLayout::exit_heading(veh.turn),
                                         veh.turn);
  return local.transformed(ctx.layout.arm_to_global(veh.arm));
}

TimedTrajectory free_trajectory(const GameContext& ctx, const VehicleSetup& veh, const PathSpec& path) {
  const SpeedProfile prof = speed_profile(path, ctx.limits, {}, veh.start_offset);
  return sample_trajectory(path, prof, ctx.dt, 0.0, veh.entry_delay);
}

TimedTrajectory yield_trajectory(const GameContext& ctx, const VehicleSetup& veh, const PathSpec& path,
                                 double wait) {
  const double s_stop = ctx.layout.approach_distance() - 0.5 * veh.dims.length - ctx.stop_margin;
  if (!(s_stop > veh.start_offset)) {
    throw InfeasibleScenarioError(fmt::format("vehicle starts past its stop point ({} m)", s_stop));
  }
  const SpeedProfile in = speed_profile(path, ctx.limits, {-1.0, 0.0}, veh.start_offset, s_stop);
  const SpeedProfile out = speed_profile(path, ctx.limits, {0.0, -1.0}, s_stop);
  return sample_trajectory_with_stop(path, in, out, ctx.dt, wait, veh.entry_delay);
}

std::optional<std::pair<double, double>> conflict_zone_occupancy(const TimedTrajectory& traj,
                                                                 const VehicleDims& dims,
                                                                 const IntersectionLayout& layout) {
  std::optional<std::pair<double, double>> span;
  for (const auto& st : traj.states) {
    if (!footprint_in_conflict_zone(footprint(st.pose, dims), layout)) continue;
    if (!span) span = std::pair{st.t, st.t};
    span->second = st.t;
  }
  return span;
}

IntersectionGame::IntersectionGame(GameContext ctx) : ctx_(std::move(ctx)) {
  ctx_.weights.validate();
  ctx_.ego.dims.validate();
  ctx_.opp.dims.validate();
  if (!(ctx_.dt > 0.0)) throw DomainError("IntersectionGame: dt must be positive");
}

void IntersectionGame::clear_cache() {
  cache_v_.clear();
  cache_o_.clear();
}

IntersectionGame::Entry IntersectionGame::make_entry(const VehicleSetup& veh,
                                                     std::unique_ptr<TimedTrajectory> traj) const {
  Entry e;
  e.avg_speed = average_speed(*traj);
  e.prepared = std::make_unique<PreparedTrajectory>(
      prepare_trajectory(*traj, veh.dims, &ctx_.layout, ctx_.safety));
  e.traj = std::move(traj);
  e.prepared->traj = e.traj.get();
  return e;
}

const IntersectionGame::Entry& IntersectionGame::lookup(std::map<Strategy, Entry>& cache, const VehicleSetup& veh,
                                                        const Strategy& s) {
  auto it = cache.find(s);
  if (it != cache.end()) return it->second;
  Entry e;
  try {
    const PathSpec path = vehicle_path(ctx_, veh, s);
    e = make_entry(veh, std::make_unique<TimedTrajectory>(free_trajectory(ctx_, veh, path)));
  } catch (const InfeasibleGeometryError&) {
  } catch (const NoConvergenceError&) {
  }
  return cache.emplace(s, std::move(e)).first->second;
}

const TimedTrajectory* IntersectionGame::trajectory_v(const Strategy& s) {
  return lookup(cache_v_, ctx_.ego, s).traj.get();
}

const TimedTrajectory* IntersectionGame::trajectory_o(const Strategy& s) {
  return lookup(cache_o_, ctx_.opp, s).traj.get();
}

namespace {

PayoffBreakdown infeasible() {
  PayoffBreakdown b;
  b.feasible = false;
  b.q = std::numeric_limits<double>::infinity();
  return b;
}

}  // namespace

std::pair<PayoffBreakdown, PayoffBreakdown> IntersectionGame::evaluate(const Strategy& v, const Strategy& o) {
  const Entry& ev = lookup(cache_v_, ctx_.ego, v);
  const Entry& eo = lookup(cache_o_, ctx_.opp, o);
  // A player without a valid path leaves the other one driving alone, so the
  // gap still sees the infeasible side's incentive to switch.
  if (!ev.traj || !eo.traj) {
    auto solo = [&](const Entry& e) {
      if (!e.traj) return infeasible();
      InteractionSummary sum;
      sum.min_gtc = std::numeric_limits<double>::infinity();
      for (double v : e.prepared->lane_violation) sum.max_violation_a = std::max(sum.max_violation_a, v);
      return payoff_from_summary(sum, true, e.avg_speed, ctx_.weights);
    };
    return {solo(ev), solo(eo)};
  }
  const InteractionSummary sum = summarize(*ev.prepared, *eo.prepared);
  return {payoff_from_summary(sum, true, ev.avg_speed, ctx_.weights),
          payoff_from_summary(sum, false, eo.avg_speed, ctx_.weights)};
}

PayoffBreakdown IntersectionGame::evaluate_opp_against(const Strategy& o, const PreparedTrajectory& ego) {
  const Entry& e = lookup(cache_o_, ctx_.opp, o);
  if (!e.prepared) return infeasible();
  return payoff_from_summary(summarize(ego, *e.prepared), false, e.avg_speed, ctx_.weights);
}

PayoffBreakdown IntersectionGame::evaluate_against(const Strategy& v, double wait, const PreparedTrajectory& opp) {
  try {
    const PathSpec path = vehicle_path(ctx_, ctx_.ego, v);
    auto traj = std::make_unique<TimedTrajectory>(wait < 0.0 ? free_trajectory(ctx_, ctx_.ego, path)
                                                             : yield_trajectory(ctx_, ctx_.ego, path, wait));
    const Entry e = make_entry(ctx_.ego, std::move(traj));
    return payoff_from_summary(summarize(*e.prepared, opp), true, e.avg_speed, ctx_.weights);
  } catch (const InfeasibleGeometryError&) {
  } catch (const NoConvergenceError&) {
  }
  return infeasible();
}

bool IntersectionGame::safe(const PayoffBreakdown& q_v, const PayoffBreakdown& q_o) const {
  return q_v.feasible && q_o.feasible && q_v.penalty == 0.0 && q_o.penalty == 0.0 &&
         q_v.min_gtc >= ctx_.weights.g_crit;
}

namespace {

// The opponent's payoff against a fixed ego trajectory, exposed as player v
// so the single-player search applies.
class FixedEgo : public PayoffModel {
 public:
  FixedEgo(IntersectionGame& game, const PreparedTrajectory& ego) : game_(game), ego_(ego) {}

  std::pair<PayoffBreakdown, PayoffBreakdown> evaluate(const Strategy& o, const Strategy&) override {
    return {evaluate_v(o, {}), PayoffBreakdown{}};
  }
  PayoffBreakdown evaluate_v(const Strategy& o, const Strategy&) override {
    return game_.evaluate_opp_against(o, ego_);
  }

 private:
  IntersectionGame& game_;
  const PreparedTrajectory& ego_;
};

// The ego's payoff against a fixed opponent, for a fixed wait.
class FixedOpponent : public PayoffModel {
 public:
  FixedOpponent(IntersectionGame& game, const PreparedTrajectory& opp, double wait)
      : game_(game), opp_(opp), wait_(wait) {}

  std::pair<PayoffBreakdown, PayoffBreakdown> evaluate(const Strategy& v, const Strategy&) override {
    return {evaluate_v(v, {}), PayoffBreakdown{}};
  }
  PayoffBreakdown evaluate_v(const Strategy& v, const Strategy&) override {
    return game_.evaluate_against(v, wait_, opp_);
  }

 private:
  IntersectionGame& game_;
  const PreparedTrajectory& opp_;
  double wait_;
};

}  // namespace

std::pair<double, Strategy> yield_fallback(IntersectionGame& game, const TimedTrajectory& opp_traj,
                                           const Strategy& start, const SolverConfig& config) {
  config.validate();
  const GameContext& ctx = game.context();
  const PreparedTrajectory opp = prepare_trajectory(opp_traj, ctx.opp.dims, &ctx.layout, ctx.safety);
  const auto opp_zone = conflict_zone_occupancy(opp_traj, ctx.opp.dims, ctx.layout);
  const StrategyBounds bounds = default_bounds(ctx.layout, ctx.ego.turn);

  auto acceptable = [&](const Strategy& s, double wait) {
    const PayoffBreakdown q = game.evaluate_against(s, wait, opp);
    if (!q.feasible || q.penalty != 0.0 || q.min_gtc < ctx.weights.g_crit) return false;
    // The opponent must not be put in violation either.
    const PathSpec path = vehicle_path(ctx, ctx.ego, s);
    const TimedTrajectory ego = yield_trajectory(ctx, ctx.ego, path, wait);
    // Only the ego's intrusion counts; the opponent's own lane keeping is
    // not the ego's to fix.
    const SharedWindow w = shared_window(ego, opp_traj);
    for (std::size_t k = 0; k < w.count; ++k) {
      const Obb box = footprint(ego.states[w.first_a + k].pose, ctx.ego.dims);
      if (ellipse_violation(opp.zones[w.first_b + k], box) > 0.0) return false;
    }
    if (!opp_zone) return true;
    const auto ego_zone = conflict_zone_occupancy(ego, ctx.ego.dims, ctx.layout);
    return !ego_zone || ego_zone->first > opp_zone->second;
  };

  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const Strategy nominal = nominal_strategy(ctx.layout, ctx.ego.turn);
  const auto steps = static_cast<long>(std::floor(config.yield_horizon / ctx.dt + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double wait = static_cast<double>(k) * ctx.dt;
    for (const Strategy& s : {bounds.clamp(start), nominal}) {
      if (acceptable(s, wait)) return {wait, s};
    }
    FixedOpponent model(game, opp, wait);
    const auto [s, q] = best_response_v(model, Strategy{}, bounds, bounds.clamp(start), config.refine_swarm,
                                        config.refine_iterations, rng);
    if (acceptable(s, wait)) return {wait, s};
  }
  throw InfeasibleScenarioError(
      fmt::format("no wait up to {} s lets the ego pass safely behind the opponent", config.yield_horizon));
}

GameOutcome IntersectionGame::solve(const SolverConfig& config) {
  const StrategyBounds bv = default_bounds(ctx_.layout, ctx_.ego.turn);
  const StrategyBounds bo = default_bounds(ctx_.layout, ctx_.opp.turn);
  GameOutcome out = solve_gnep(*this, bv, bo, config);
  if (safe(out.q_v, out.q_o)) {
    out.decision = Decision::Proceed;
    return out;
  }
  // The ego is going to stop, so the opponent answers an ego held at its
  // stop point rather than the unsafe equilibrium partner.
  {
    const Strategy s_v = trajectory_v(out.s_v) ? out.s_v : nominal_strategy(ctx_.layout, ctx_.ego.turn);
    const TimedTrajectory parked =
        yield_trajectory(ctx_, ctx_.ego, vehicle_path(ctx_, ctx_.ego, s_v), config.yield_horizon);
    const PreparedTrajectory pp = prepare_trajectory(parked, ctx_.ego.dims, &ctx_.layout, ctx_.safety);
    FixedEgo model(*this, pp);
    Rng rng(config.seed ^ 0x5851f42d4c957f2dULL);
    const auto a = best_response_v(model, {}, bo, out.s_o, 2 * config.refine_swarm, 4 * config.refine_iterations, rng);
    const auto b = best_response_v(model, {}, bo, nominal_strategy(ctx_.layout, ctx_.opp.turn), 2 * config.refine_swarm,
                                   4 * config.refine_iterations, rng);
    out.s_o = std::tie(a.second, a.first) <= std::tie(b.second, b.first) ? a.first : b.first;
  }
  const TimedTrajectory* opp = trajectory_o(out.s_o);
  if (opp == nullptr) throw InfeasibleScenarioError("opponent strategy has no valid path");
  const auto [wait, s_v] = yield_fallback(*this, *opp, out.s_v, config);
  out.decision = Decision::Yield;
  out.wait_time = wait;
  out.s_v = s_v;

  const PathSpec path = vehicle_path(ctx_, ctx_.ego, s_v);
  const TimedTrajectory ego = yield_trajectory(ctx_, ctx_.ego, path, wait);
  const PreparedTrajectory pe = prepare_trajectory(ego, ctx_.ego.dims, &ctx_.layout, ctx_.safety);
  const PreparedTrajectory po = prepare_trajectory(*opp, ctx_.opp.dims, &ctx_.layout, ctx_.safety);
  const InteractionSummary sum = summarize(pe, po);
  out.q_v = payoff_from_summary(sum, true, average_speed(ego), ctx_.weights);
  out.q_o = payoff_from_summary(sum, false, average_speed(*opp), ctx_.weights);
  return out;
}

}  // namespace gtp
