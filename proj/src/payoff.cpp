#include "gtp/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace gtp {

void PayoffWeights::validate() const {
  if (!(w1 >= 0.0 && w1 <= 1.0)) throw DomainError("PayoffWeights: w1 outside [0, 1]");
  if (!(w2 >= 0.0 && w2 <= 1.0)) throw DomainError("PayoffWeights: w2 outside [0, 1]");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("PayoffWeights: lambda must be positive");
  if (!(g_crit > 0.0) || !std::isfinite(g_crit)) throw DomainError("PayoffWeights: g_crit must be positive");
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw DomainError("PayoffWeights: v_max must be positive");
}

double efficiency_indicator(double v_bar, double v_max) {
  if (!(v_max > 0.0)) throw DomainError("efficiency_indicator: v_max must be positive");
  if (!(v_bar >= 0.0)) throw DomainError("efficiency_indicator: negative mean speed");
  return std::abs(v_max - v_bar) / v_max;
}

double safety_indicator(std::span<const GtcSample> series, double g_crit) {
  if (series.empty()) throw DomainError("safety_indicator: empty series");
  if (!(g_crit > 0.0)) throw DomainError("safety_indicator: g_crit must be positive");
  double min_gap = series.front().gtc;
  for (const auto& s : series) min_gap = std::min(min_gap, s.gtc);
  return std::exp(-min_gap / g_crit);
}

double objective(double i_safe, double i_eff, const PayoffWeights& w) {
  return w.w1 * i_safe + w.w2 * i_eff;
}

double penalty(std::span<const double> violations, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("penalty: lambda must be positive");
  if (violations.empty()) return 0.0;
  const double c = *std::max_element(violations.begin(), violations.end());
  return c <= 0.0 ? 0.0 : lambda * c;
}

PayoffBreakdown payoff_from_interaction(const Interaction& inter, bool ego_is_a, double ego_avg_speed,
                                        const PayoffWeights& w) {
  const auto& viol = ego_is_a ? inter.violations_a : inter.violations_b;
  PayoffBreakdown b;
  b.i_safe = safety_indicator(inter.gtc.samples, w.g_crit);
  b.i_eff = efficiency_indicator(ego_avg_speed, w.v_max);
  b.f = objective(b.i_safe, b.i_eff, w);
  b.penalty = penalty(viol, w.lambda);
  b.q = b.f + b.penalty;
  b.min_gtc = inter.gtc.min_gtc;
  b.max_violation = viol.empty() ? 0.0 : std::max(0.0, *std::max_element(viol.begin(), viol.end()));
  return b;
}

PayoffBreakdown payoff_from_summary(const InteractionSummary& sum, bool ego_is_a, double ego_avg_speed,
                                   const PayoffWeights& w) {
  const double viol = ego_is_a ? sum.max_violation_a : sum.max_violation_b;
  PayoffBreakdown b;
  b.i_safe = std::exp(-sum.min_gtc / w.g_crit);
  b.i_eff = efficiency_indicator(ego_avg_speed, w.v_max);
  b.f = objective(b.i_safe, b.i_eff, w);
  b.penalty = viol <= 0.0 ? 0.0 : w.lambda * viol;
  b.q = b.f + b.penalty;
  b.min_gtc = sum.min_gtc;
  b.max_violation = viol;
  return b;
}

PayoffBreakdown player_payoff(const TimedTrajectory& tv, const TimedTrajectory& to,
                              const VehicleDims& dims_v, const VehicleDims& dims_o,
                              const IntersectionLayout& layout, const PayoffWeights& w,
                              const SafetyParams& safety) {
  w.validate();
  const PreparedTrajectory a = prepare_trajectory(tv, dims_v, &layout, safety);
  const PreparedTrajectory b = prepare_trajectory(to, dims_o, &layout, safety);
  return payoff_from_interaction(interact(a, b), true, average_speed(tv), w);
}

}  // namespace gtp
