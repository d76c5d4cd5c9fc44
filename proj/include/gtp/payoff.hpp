#pragma once

#include <span>

#include "gtp/collision.hpp"
#include "gtp/motion.hpp"

namespace gtp {

struct PayoffWeights {
  double w1 = 0.5;        // safety
  double w2 = 0.5;        // efficiency
  double lambda = 1e3;    // penalty coefficient
  double g_crit = 2.0;    // m
  double v_max = 13.0;    // m/s

  void validate() const;
};

struct PayoffBreakdown {
  double i_safe = 0.0;
  double i_eff = 0.0;
  double f = 0.0;
  double penalty = 0.0;
  double q = 0.0;
  double min_gtc = 0.0;
  double max_violation = 0.0;
  /// False when the strategy produced no valid trajectory; q then holds a
  /// sentinel and the other fields are meaningless.
  bool feasible = true;
};

double efficiency_indicator(double v_bar, double v_max);
double safety_indicator(std::span<const GtcSample> series, double g_crit);
double objective(double i_safe, double i_eff, const PayoffWeights& w);
double penalty(std::span<const double> violations, double lambda);

/// Payoff of the vehicle driving tv against an opponent driving to.
PayoffBreakdown player_payoff(const TimedTrajectory& tv, const TimedTrajectory& to,
                              const VehicleDims& dims_v, const VehicleDims& dims_o,
                              const IntersectionLayout& layout, const PayoffWeights& w,
                              const SafetyParams& safety);

/// Same as player_payoff from an already computed interaction; `ego_is_a`
/// selects which side of the interaction is scored.
PayoffBreakdown payoff_from_interaction(const Interaction& inter, bool ego_is_a, double ego_avg_speed,
                                        const PayoffWeights& w);

/// Payoff from the extremes of an interaction only.
PayoffBreakdown payoff_from_summary(const InteractionSummary& sum, bool ego_is_a, double ego_avg_speed,
                                   const PayoffWeights& w);

}  // namespace gtp
