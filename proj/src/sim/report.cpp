#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gtp/errors.hpp"
#include "gtp/sim.hpp"

namespace gtp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json strategy_json(const Strategy& s) {
  return {{"x2", s.x2}, {"y2", s.y2}, {"x3", s.x3}, {"y3", s.y3}};
}

ordered_json payoff_json(const PayoffBreakdown& q) {
  return {{"feasible", q.feasible}, {"i_safe", q.i_safe},   {"i_eff", q.i_eff},
          {"f", q.f},               {"penalty", q.penalty}, {"q", q.q},
          {"min_gtc", q.min_gtc},   {"max_violation", q.max_violation}};
}

ordered_json trace_json(const TimedTrajectory& traj) {
  ordered_json rows = ordered_json::array();
  for (const TrajectoryState& st : traj.states) {
    rows.push_back({st.t, st.pose.x, st.pose.y, st.pose.theta, st.speed, st.s});
  }
  return rows;
}

ordered_json interval_json(const std::optional<std::pair<double, double>>& iv) {
  if (!iv) return nullptr;
  return {iv->first, iv->second};
}

TimedTrajectory trace_from_json(const json& rows, double dt) {
  TimedTrajectory traj;
  traj.dt = dt;
  for (const json& r : rows) {
    TrajectoryState st;
    st.t = r.at(0).get<double>();
    st.pose.x = r.at(1).get<double>();
    st.pose.y = r.at(2).get<double>();
    st.pose.theta = r.at(3).get<double>();
    st.speed = r.at(4).get<double>();
    st.s = r.at(5).get<double>();
    traj.states.push_back(st);
  }
  if (!traj.states.empty()) traj.t_start = traj.states.front().t;
  return traj;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::optional<std::pair<double, double>> interval_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return std::pair{j.at(0).get<double>(), j.at(1).get<double>()};
}

void check_payoff(const json& q, const PayoffWeights& w, double min_gtc, const char* who,
                  std::vector<std::string>& out) {
  if (!q.at("feasible").get<bool>()) {
    out.push_back(fmt::format("{} payoff is infeasible", who));
    return;
  }
  const double i_safe = q.at("i_safe").get<double>();
  const double i_eff = q.at("i_eff").get<double>();
  const double f = q.at("f").get<double>();
  const double penalty = q.at("penalty").get<double>();
  const double viol = q.at("max_violation").get<double>();
  if (!close(q.at("q").get<double>(), f + penalty)) out.push_back(fmt::format("{}: q != f + penalty", who));
  if (!close(f, w.w1 * i_safe + w.w2 * i_eff)) out.push_back(fmt::format("{}: f != w1 i_safe + w2 i_eff", who));
  if (!close(penalty, viol > 0.0 ? w.lambda * viol : 0.0)) {
    out.push_back(fmt::format("{}: penalty != lambda * violation", who));
  }
  if (q.at("min_gtc").get<double>() != min_gtc) out.push_back(fmt::format("{}: min_gtc differs from curve", who));
  if (!close(i_safe, std::exp(-min_gtc / w.g_crit))) out.push_back(fmt::format("{}: i_safe != exp(-min_gtc/g_crit)", who));
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

ordered_json report_to_json(const RunReport& r) {
  const bool gtp = r.mode == Mode::Gtp;
  const GameOutcome& o = r.outcome;
  ordered_json out;
  out["format"] = "gtp-report/1";
  out["mode"] = gtp ? "gtp" : "nominal";
  out["seed"] = r.scenario.solver.seed;
  out["scenario"] = scenario_to_json(r.scenario);

  ordered_json oc;
  oc["decision"] = gtp ? ordered_json(o.decision == Decision::Proceed ? "proceed" : "yield") : ordered_json(nullptr);
  oc["wait_time"] = o.wait_time;
  oc["j_value"] = gtp ? ordered_json(o.j_value) : ordered_json(nullptr);
  oc["certificate"] = gtp ? ordered_json{{"ego", o.certificate.v}, {"opp", o.certificate.o}} : ordered_json(nullptr);
  oc["evaluations"] = o.evaluations;
  oc["strategy"] = {{"ego", strategy_json(o.s_v)}, {"opp", strategy_json(o.s_o)}};
  oc["payoff"] = {{"ego", payoff_json(o.q_v)}, {"opp", payoff_json(o.q_o)}};
  out["outcome"] = oc;

  out["min_gtc"] = r.min_gtc;
  out["t_crit"] = r.t_crit;
  out["t_impact"] = r.t_impact ? ordered_json(*r.t_impact) : ordered_json(nullptr);
  out["stop_interval"] =
      r.stop_interval ? ordered_json{{"t1", r.stop_interval->t1}, {"t2", r.stop_interval->t2}} : ordered_json(nullptr);
  out["conflict_zone"] = {{"ego", interval_json(r.ego_zone)}, {"opp", interval_json(r.opp_zone)}};
  out["plots"] = {
      {"scene.svg", "metres, 6 px per m, y up, window of 3 lane widths plus 30 m around the junction centre"},
      {"gtc.svg", "x: time in s over the shared window; y: gtc in m from 0 to 1.1 times max(curve, g_crit)"}};
  out["traces"] = {{"columns", {"t", "x", "y", "theta", "speed", "s"}},
                   {"ego", trace_json(r.ego)},
                   {"opp", trace_json(r.opp)}};
  ordered_json curve = ordered_json::array();
  for (const GtcSample& g : r.gtc_curve) curve.push_back({g.t, g.gtc});
  out["gtc_curve"] = curve;
  return out;
}

std::vector<std::string> verify_report(const json& report) {
  std::vector<std::string> bad;
  try {
    const Scenario sc = parse_scenario(report.at("scenario").dump());
    const GameContext& ctx = sc.ctx;
    const std::string mode = report.at("mode").get<std::string>();
    if (mode != "gtp" && mode != "nominal") bad.push_back("mode must be gtp or nominal");
    if (report.at("seed").get<std::uint64_t>() != sc.solver.seed) bad.push_back("seed differs from scenario echo");

    const TimedTrajectory ego = trace_from_json(report.at("traces").at("ego"), ctx.dt);
    const TimedTrajectory opp = trace_from_json(report.at("traces").at("opp"), ctx.dt);
    const GtcSeries series = gtc_series(ego, opp, ctx.ego.dims, ctx.opp.dims);

    const json& curve = report.at("gtc_curve");
    if (curve.size() != series.samples.size()) {
      bad.push_back("gtc_curve length differs from recomputation");
    } else {
      for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].at(0).get<double>() != series.samples[i].t || curve[i].at(1).get<double>() != series.samples[i].gtc) {
          bad.push_back(fmt::format("gtc_curve row {} differs from recomputation", i));
          break;
        }
      }
    }
    const double min_gtc = report.at("min_gtc").get<double>();
    if (min_gtc != series.min_gtc) bad.push_back("min_gtc differs from recomputation");
    if (report.at("t_crit").get<double>() != series.t_crit) bad.push_back("t_crit differs from recomputation");
    const auto hit = std::find_if(series.samples.begin(), series.samples.end(),
                                  [](const GtcSample& g) { return g.gtc == 0.0; });
    const json& impact = report.at("t_impact");
    if ((hit == series.samples.end()) != impact.is_null() ||
        (!impact.is_null() && impact.get<double>() != hit->t)) {
      bad.push_back("t_impact differs from recomputation");
    }

    const auto ego_zone = conflict_zone_occupancy(ego, ctx.ego.dims, ctx.layout);
    const auto opp_zone = conflict_zone_occupancy(opp, ctx.opp.dims, ctx.layout);
    if (interval_from_json(report.at("conflict_zone").at("ego")) != ego_zone ||
        interval_from_json(report.at("conflict_zone").at("opp")) != opp_zone) {
      bad.push_back("conflict_zone differs from recomputation");
    }

    const json& oc = report.at("outcome");
    check_payoff(oc.at("payoff").at("ego"), ctx.weights, series.min_gtc, "ego", bad);
    check_payoff(oc.at("payoff").at("opp"), ctx.weights, series.min_gtc, "opp", bad);

    const json& decision = oc.at("decision");
    const json& stop = report.at("stop_interval");
    const double wait = oc.at("wait_time").get<double>();
    if (mode == "nominal") {
      if (!decision.is_null()) bad.push_back("nominal run carries a decision");
      if (!stop.is_null()) bad.push_back("nominal run has a stop interval");
    } else {
      const std::string d = decision.get<std::string>();
      const bool yield = d == "yield";
      if (!yield && d != "proceed") bad.push_back("decision must be proceed or yield");
      if (yield == stop.is_null()) bad.push_back("stop_interval must be present exactly for yield");

      const double g_crit = ctx.weights.g_crit;
      if (series.min_gtc < g_crit) bad.push_back("min_gtc below g_crit");
      const auto viol_v = constraint_values(ego, opp, ctx.ego.dims, ctx.opp.dims, ctx.layout, ctx.safety);
      if (max_of(viol_v) > 0.0) bad.push_back("ego constraints violated");
      if (!yield) {
        if (wait != 0.0) bad.push_back("proceed with non-zero wait");
        const auto viol_o = constraint_values(opp, ego, ctx.opp.dims, ctx.ego.dims, ctx.layout, ctx.safety);
        if (max_of(viol_o) > 0.0) bad.push_back("opponent constraints violated");
      } else if (!stop.is_null()) {
        const double t1 = stop.at("t1").get<double>();
        const double t2 = stop.at("t2").get<double>();
        if (!(t1 <= t2) || (wait > 0.0 && !(t1 < t2))) bad.push_back("stop interval not ordered");
        if (std::abs((t2 - t1) - wait) > 1e-9) bad.push_back("stop interval length differs from wait_time");
        const TrajectoryState* rest = nullptr;
        for (const TrajectoryState& st : ego.states) {
          if (st.t < t1 || st.t > t2) continue;
          if (st.speed != 0.0 || (rest && st.pose.position() != rest->pose.position())) {
            bad.push_back("ego moves during the stop interval");
            break;
          }
          rest = &st;
        }
        if (opp_zone && ego_zone && ego_zone->first < opp_zone->second - ctx.dt) {
          bad.push_back("ego enters the conflict zone before the opponent leaves it");
        }
      }
    }
  } catch (const std::exception& e) {
    bad.push_back(fmt::format("malformed report: {}", e.what()));
  }
  return bad;
}

}  // namespace gtp
