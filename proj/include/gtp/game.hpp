#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "gtp/collision.hpp"
#include "gtp/geometry.hpp"
#include "gtp/motion.hpp"
#include "gtp/payoff.hpp"

namespace gtp {

/// One player's waypoints (x2, y2, x3, y3) in its own arm-local frame.
struct Strategy {
  double x2 = 0.0;
  double y2 = 0.0;
  double x3 = 0.0;
  double y3 = 0.0;

  std::array<double, 4> as_array() const { return {x2, y2, x3, y3}; }
  static Strategy from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
  WaypointSet waypoints() const { return {{x2, y2}, {x3, y3}}; }
  friend auto operator<=>(const Strategy&, const Strategy&) = default;
};

struct Bound {
  double lo = 0.0;
  double hi = 0.0;
};

struct StrategyBounds {
  std::array<Bound, 4> axes{};

  /// Throws DomainError for an empty or non-finite box.
  void validate() const;
  bool contains(const Strategy& s) const;
  Strategy clamp(const Strategy& s) const;
  /// Maps u in [0,1)^4 into the box.
  Strategy at(const std::array<double, 4>& u) const;
};

/// Deterministic stream of doubles in [0, 1); identical across platforms.
class Rng {
  // mt19937_64 bits mapped to doubles by hand; std distributions differ
  // between standard libraries.
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::array<double, 4> uniform4() { return {uniform(), uniform(), uniform(), uniform()}; }

 private:
  std::mt19937_64 engine_;
};

struct SolverConfig {
  std::size_t swarm_size = 64;
  std::size_t iterations = 200;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  std::uint64_t seed = 1;
  std::size_t deviation_samples = 256;
  /// Iterations of the q_v + q_o warm start; 0 disables it.
  std::size_t warm_start_iterations = 60;
  /// Yield search.
  double yield_horizon = 30.0;
  std::size_t refine_swarm = 8;
  std::size_t refine_iterations = 6;

  void validate() const;
};

enum class Decision { Proceed, Yield };

struct Certificate {
  double v = 0.0;  // largest improvement found for the ego
  double o = 0.0;
};

struct GameOutcome {
  Strategy s_v;
  Strategy s_o;
  double j_value = 0.0;
  PayoffBreakdown q_v;
  PayoffBreakdown q_o;
  Decision decision = Decision::Proceed;
  double wait_time = 0.0;
  Certificate certificate;
  std::size_t evaluations = 0;
};

/// Anything that scores a joint strategy. Implementations must be
/// deterministic.
class PayoffModel {
 public:
  virtual ~PayoffModel() = default;
  virtual std::pair<PayoffBreakdown, PayoffBreakdown> evaluate(const Strategy& v, const Strategy& o) = 0;
  /// Only the ego's payoff; models may make this cheaper than evaluate.
  virtual PayoffBreakdown evaluate_v(const Strategy& v, const Strategy& o) { return evaluate(v, o).first; }
  virtual PayoffBreakdown evaluate_o(const Strategy& v, const Strategy& o) { return evaluate(v, o).second; }
};

/// Infeasible strategies get this payoff: twice the largest feasible payoff
/// seen so far, at least 1e6.
class SentinelTracker {
 public:
  double score(const PayoffBreakdown& b);
  double sentinel() const { return std::max(1e6, 2.0 * max_feasible_); }

 private:
  double max_feasible_ = 0.0;
};

struct GapTerms {
  double v = 0.0;
  double o = 0.0;
  double total() const { return v + o; }
};

/// Sum over both players of the largest payoff improvement available by a
/// unilateral switch to a probe, each clamped at zero.
GapTerms ni_gap_terms(PayoffModel& model, const Strategy& s_v, const Strategy& s_o,
                      std::span<const Strategy> probes_v, std::span<const Strategy> probes_o,
                      SentinelTracker* sentinel = nullptr);
double ni_gap(PayoffModel& model, const Strategy& s_v, const Strategy& s_o, std::span<const Strategy> probes_v,
              std::span<const Strategy> probes_o);

/// PSO over the joint space minimising the gap. decision is left at Proceed;
/// callers that know what an acceptable outcome is decide on yielding.
GameOutcome solve_gnep(PayoffModel& model, const StrategyBounds& bounds_v, const StrategyBounds& bounds_o,
                       const SolverConfig& config);

/// Minimises a single player's payoff with the other player's strategy held
/// fixed. Returns the best strategy and its payoff.
std::pair<Strategy, double> best_response_v(PayoffModel& model, const Strategy& s_o, const StrategyBounds& bounds,
                                            const Strategy& start, std::size_t swarm, std::size_t iterations,
                                            Rng& rng);

// ---------------------------------------------------------------------------
// The intersection game.

struct VehicleSetup {
  std::size_t arm = 0;            // approach arm index into IntersectionLayout::arm_headings
  TurnKind turn = TurnKind::LeftTurn;
  double start_offset = 0.0;      // arc length already driven at t = entry_delay
  double entry_delay = 0.0;       // s; negative starts earlier
  VehicleDims dims;
};

struct GameContext {
  IntersectionLayout layout{3.5, 80.0, 80.0};
  VehicleSetup ego;
  VehicleSetup opp;
  PayoffWeights weights;
  SafetyParams safety;
  SpeedLimits limits;
  double dt = 0.1;
  /// Gap between the ego's front bumper and the conflict zone when stopped.
  double stop_margin = 4.0;
};

/// Waypoints of the unoptimised path: through the arm's local center point to
/// the start of the exit lane.
Strategy nominal_strategy(const IntersectionLayout& layout, TurnKind turn);
/// p2 inside the conflict zone, p3 in a corridor around the exit-lane
/// centerline (lane_width/4 either side, up to 3 lane widths past the zone).
StrategyBounds default_bounds(const IntersectionLayout& layout, TurnKind turn);

/// Global-frame path of a vehicle following a strategy. Throws
/// InfeasibleGeometryError when the waypoints cannot be joined.
PathSpec vehicle_path(const GameContext& ctx, const VehicleSetup& veh, const Strategy& s);

/// Drive the whole path without stopping.
TimedTrajectory free_trajectory(const GameContext& ctx, const VehicleSetup& veh, const PathSpec& path);
/// Brake to rest before the conflict zone, wait, then go.
TimedTrajectory yield_trajectory(const GameContext& ctx, const VehicleSetup& veh, const PathSpec& path,
                                 double wait);

/// Time interval during which a footprint overlaps the conflict zone;
/// nullopt when it never does.
std::optional<std::pair<double, double>> conflict_zone_occupancy(const TimedTrajectory& traj,
                                                                 const VehicleDims& dims,
                                                                 const IntersectionLayout& layout);

/// PayoffModel for two vehicles on an intersection. Caches one prepared
/// trajectory per strategy and player.
class IntersectionGame : public PayoffModel {
 public:
  explicit IntersectionGame(GameContext ctx);

  const GameContext& context() const { return ctx_; }

  std::pair<PayoffBreakdown, PayoffBreakdown> evaluate(const Strategy& v, const Strategy& o) override;

  /// Ego payoff when the opponent drives a fixed trajectory and the ego
  /// yields for `wait` seconds (wait < 0: no stop at all).
  PayoffBreakdown evaluate_against(const Strategy& v, double wait, const PreparedTrajectory& opp);

  /// Opponent payoff against a fixed ego trajectory.
  PayoffBreakdown evaluate_opp_against(const Strategy& o, const PreparedTrajectory& ego);

  /// Trajectory of a player (nullptr when the strategy is infeasible).
  const TimedTrajectory* trajectory_v(const Strategy& s);
  const TimedTrajectory* trajectory_o(const Strategy& s);

  std::size_t cache_size() const { return cache_v_.size() + cache_o_.size(); }
  void clear_cache();

  /// Full solve: equilibrium search, then the yield fallback when the
  /// equilibrium is not safe for both.
  GameOutcome solve(const SolverConfig& config);

  /// Is the outcome acceptable without yielding.
  bool safe(const PayoffBreakdown& q_v, const PayoffBreakdown& q_o) const;

 private:
  struct Entry {
    std::unique_ptr<TimedTrajectory> traj;
    std::unique_ptr<PreparedTrajectory> prepared;
    double avg_speed = 0.0;
  };
  const Entry& lookup(std::map<Strategy, Entry>& cache, const VehicleSetup& veh, const Strategy& s);
  Entry make_entry(const VehicleSetup& veh, std::unique_ptr<TimedTrajectory> traj) const;

  GameContext ctx_;
  std::map<Strategy, Entry> cache_v_;
  std::map<Strategy, Entry> cache_o_;
};

/// Smallest wait on the dt grid for which the ego, best-responding to the
/// fixed opponent trajectory, is collision free, keeps min GTC >= g_crit and
/// enters the conflict zone only after the opponent has left it. Returns the
/// wait and the ego strategy. Throws InfeasibleScenarioError past the horizon.
std::pair<double, Strategy> yield_fallback(IntersectionGame& game, const TimedTrajectory& opp_traj,
                                           const Strategy& start, const SolverConfig& config);

}  // namespace gtp
