#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "gtp/errors.hpp"
#include "gtp/sim.hpp"

namespace gtp {

RunReport run(const Scenario& scenario, Mode mode) {
  validate_scenario(scenario);
  const GameContext& ctx = scenario.ctx;
  IntersectionGame game(ctx);

  RunReport r;
  r.scenario = scenario;
  r.mode = mode;
  if (mode == Mode::Nominal) {
    GameOutcome& o = r.outcome;
    o.s_v = nominal_strategy(ctx.layout, ctx.ego.turn);
    o.s_o = nominal_strategy(ctx.layout, ctx.opp.turn);
    std::tie(o.q_v, o.q_o) = game.evaluate(o.s_v, o.s_o);
    r.ego = free_trajectory(ctx, ctx.ego, vehicle_path(ctx, ctx.ego, o.s_v));
  } else {
    r.outcome = game.solve(scenario.solver);
    const PathSpec path = vehicle_path(ctx, ctx.ego, r.outcome.s_v);
    r.ego = r.outcome.decision == Decision::Yield ? yield_trajectory(ctx, ctx.ego, path, r.outcome.wait_time)
                                                  : free_trajectory(ctx, ctx.ego, path);
  }
  r.opp = free_trajectory(ctx, ctx.opp, vehicle_path(ctx, ctx.opp, r.outcome.s_o));

  const GtcSeries series = gtc_series(r.ego, r.opp, ctx.ego.dims, ctx.opp.dims);
  r.gtc_curve = series.samples;
  r.min_gtc = series.min_gtc;
  r.t_crit = series.t_crit;
  const auto hit = std::find_if(r.gtc_curve.begin(), r.gtc_curve.end(), [](const GtcSample& g) { return g.gtc == 0.0; });
  if (hit != r.gtc_curve.end()) r.t_impact = hit->t;
  if (r.outcome.decision == Decision::Yield) r.stop_interval = r.ego.stop;
  r.ego_zone = conflict_zone_occupancy(r.ego, ctx.ego.dims, ctx.layout);
  r.opp_zone = conflict_zone_occupancy(r.opp, ctx.opp.dims, ctx.layout);

  const auto problems = verify_report(report_to_json(r));
  if (!problems.empty()) {
    throw std::logic_error(fmt::format("report failed its own checks: {}", problems.front()));
  }
  return r;
}

}  // namespace gtp
