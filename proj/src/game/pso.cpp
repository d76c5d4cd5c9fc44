#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "gtp/game.hpp"

namespace gtp {

void StrategyBounds::validate() const {
  for (const Bound& b : axes) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo <= b.hi)) {
      throw DomainError("StrategyBounds: empty or non-finite interval");
    }
  }
}

bool StrategyBounds::contains(const Strategy& s) const {
  const auto a = s.as_array();
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(a[i] >= axes[i].lo && a[i] <= axes[i].hi)) return false;
  }
  return true;
}

Strategy StrategyBounds::clamp(const Strategy& s) const {
  auto a = s.as_array();
  for (std::size_t i = 0; i < 4; ++i) a[i] = std::clamp(a[i], axes[i].lo, axes[i].hi);
  return Strategy::from_array(a);
}

Strategy StrategyBounds::at(const std::array<double, 4>& u) const {
  std::array<double, 4> a{};
  for (std::size_t i = 0; i < 4; ++i) a[i] = axes[i].lo + u[i] * (axes[i].hi - axes[i].lo);
  return Strategy::from_array(a);
}

void SolverConfig::validate() const {
  if (swarm_size < 2) throw DomainError("SolverConfig: swarm_size must be at least 2");
  if (iterations < 1) throw DomainError("SolverConfig: iterations must be at least 1");
  if (deviation_samples < 1) throw DomainError("SolverConfig: deviation_samples must be at least 1");
  if (!std::isfinite(inertia) || !std::isfinite(cognitive) || !std::isfinite(social)) {
    throw DomainError("SolverConfig: non-finite coefficient");
  }
  if (!(yield_horizon > 0.0)) throw DomainError("SolverConfig: yield_horizon must be positive");
  if (refine_swarm < 1 || refine_iterations < 1) throw DomainError("SolverConfig: empty refinement");
}

double SentinelTracker::score(const PayoffBreakdown& b) {
  if (b.feasible && std::isfinite(b.q)) {
    max_feasible_ = std::max(max_feasible_, b.q);
    return b.q;
  }
  return sentinel();
}

GapTerms ni_gap_terms(PayoffModel& model, const Strategy& s_v, const Strategy& s_o,
                      std::span<const Strategy> probes_v, std::span<const Strategy> probes_o,
                      SentinelTracker* sentinel) {
  SentinelTracker local;
  SentinelTracker& st = sentinel ? *sentinel : local;
  const auto [qv, qo] = model.evaluate(s_v, s_o);
  const double base_v = st.score(qv);
  const double base_o = st.score(qo);
  GapTerms g;
  for (const Strategy& p : probes_v) g.v = std::max(g.v, base_v - st.score(model.evaluate_v(p, s_o)));
  for (const Strategy& p : probes_o) g.o = std::max(g.o, base_o - st.score(model.evaluate_o(s_v, p)));
  return g;
}

double ni_gap(PayoffModel& model, const Strategy& s_v, const Strategy& s_o, std::span<const Strategy> probes_v,
              std::span<const Strategy> probes_o) {
  return ni_gap_terms(model, s_v, s_o, probes_v, probes_o).total();
}

namespace {

using Joint = std::array<double, 8>;

Strategy part(const Joint& x, std::size_t offset) { return {x[offset], x[offset + 1], x[offset + 2], x[offset + 3]}; }

struct Scored {
  Joint x{};
  GapTerms gap;
  double q_v = 0.0;
  double q_o = 0.0;
};

// Lower gap wins; ties go to the lower ego payoff, then the lower opponent
// payoff, then the lexicographically smaller point.
bool better(const Scored& a, const Scored& b) {
  if (a.gap.total() != b.gap.total()) return a.gap.total() < b.gap.total();
  return std::tie(a.q_v, a.q_o, a.x) < std::tie(b.q_v, b.q_o, b.x);
}

class Swarm {
 public:
  Swarm(PayoffModel& model, const StrategyBounds& bv, const StrategyBounds& bo, const SolverConfig& cfg)
      : model_(model), cfg_(cfg), rng_(cfg.seed) {
    for (std::size_t i = 0; i < 4; ++i) {
      lo_[i] = bv.axes[i].lo;
      hi_[i] = bv.axes[i].hi;
      lo_[i + 4] = bo.axes[i].lo;
      hi_[i + 4] = bo.axes[i].hi;
    }
    bounds_v_ = bv;
    bounds_o_ = bo;
  }

  GameOutcome run() {
    const std::size_t n = cfg_.swarm_size;
    pos_.resize(n);
    vel_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < 8; ++d) {
        const double w = hi_[d] - lo_[d];
        pos_[i][d] = lo_[d] + rng_.uniform() * w;
        vel_[i][d] = (2.0 * rng_.uniform() - 1.0) * 0.25 * w;
      }
    }
    if (cfg_.warm_start_iterations > 0) warm_start();
    best_.resize(n);
    for (std::size_t it = 0; it < cfg_.iterations; ++it) {
      draw_probes();
      for (std::size_t i = 0; i < n; ++i) {
        Scored cur = score(pos_[i]);
        if (it == 0) {
          best_[i] = cur;
          continue;
        }
        GapTerms g = gap_of(best_[i].x);
        best_[i].gap.v = std::max(best_[i].gap.v, g.v);
        best_[i].gap.o = std::max(best_[i].gap.o, g.o);
        if (better(cur, best_[i])) best_[i] = cur;
      }
      const Scored& g = global_best();
      if (it + 1 == cfg_.iterations) break;
      for (std::size_t i = 0; i < n; ++i) move(i, g.x);
    }

    Scored g = global_best();
    GameOutcome out;
    out.s_v = part(g.x, 0);
    out.s_o = part(g.x, 4);
    // Independent deviation round for the certificate.
    probes_v_.clear();
    probes_o_.clear();
    for (std::size_t k = 0; k < cfg_.deviation_samples; ++k) {
      probes_v_.push_back(bounds_v_.at(rng_.uniform4()));
      probes_o_.push_back(bounds_o_.at(rng_.uniform4()));
    }
    const GapTerms cert = ni_gap_terms(model_, out.s_v, out.s_o, probes_v_, probes_o_, &sentinel_);
    out.certificate = {cert.v, cert.o};
    out.j_value = std::max(g.gap.v, cert.v) + std::max(g.gap.o, cert.o);
    std::tie(out.q_v, out.q_o) = model_.evaluate(out.s_v, out.s_o);
    out.evaluations = evaluations_;
    return out;
  }

 private:
  // Short PSO on q_v + q_o. Its personal bests replace the first half of the
  // swarm, which puts particles into the jointly feasible region that the
  // gap landscape alone rarely reveals.
  void warm_start() {
    const std::size_t n = pos_.size();
    std::vector<Joint> x = pos_;
    std::vector<Joint> v = vel_;
    std::vector<Joint> pb = x;
    std::vector<double> pq(n);
    auto welfare = [&](const Joint& j) {
      ++evaluations_;
      const auto [qv, qo] = model_.evaluate(part(j, 0), part(j, 4));
      return sentinel_.score(qv) + sentinel_.score(qo);
    };
    for (std::size_t i = 0; i < n; ++i) pq[i] = welfare(x[i]);
    for (std::size_t it = 0; it < cfg_.warm_start_iterations; ++it) {
      std::size_t g = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (std::tie(pq[i], pb[i]) < std::tie(pq[g], pb[g])) g = i;
      }
      const Joint gb = pb[g];
      for (std::size_t i = 0; i < n; ++i) {
        step(x[i], v[i], pb[i], gb);
        const double q = welfare(x[i]);
        if (std::tie(q, x[i]) < std::tie(pq[i], pb[i])) {
          pq[i] = q;
          pb[i] = x[i];
        }
      }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::tie(pq[a], pb[a]) < std::tie(pq[b], pb[b]); });
    for (std::size_t i = 0; i < n / 2; ++i) pos_[i] = pb[order[i]];
  }

  void step(Joint& x, Joint& v, const Joint& pbest, const Joint& gbest) {
    for (std::size_t d = 0; d < 8; ++d) {
      const double r1 = rng_.uniform();
      const double r2 = rng_.uniform();
      v[d] = cfg_.inertia * v[d] + cfg_.cognitive * r1 * (pbest[d] - x[d]) + cfg_.social * r2 * (gbest[d] - x[d]);
      x[d] += v[d];
      if (x[d] < lo_[d] || x[d] > hi_[d]) {
        x[d] = std::clamp(x[d], lo_[d], hi_[d]);
        v[d] = 0.0;
      }
    }
  }

  void draw_probes() {
    probes_v_.clear();
    probes_o_.clear();
    for (const Joint& x : pos_) {
      probes_v_.push_back(part(x, 0));
      probes_o_.push_back(part(x, 4));
    }
    for (std::size_t k = 0; k < cfg_.deviation_samples; ++k) {
      probes_v_.push_back(bounds_v_.at(rng_.uniform4()));
      probes_o_.push_back(bounds_o_.at(rng_.uniform4()));
    }
  }

  GapTerms gap_of(const Joint& x) {
    evaluations_ += 1 + probes_v_.size() + probes_o_.size();
    return ni_gap_terms(model_, part(x, 0), part(x, 4), probes_v_, probes_o_, &sentinel_);
  }

  Scored score(const Joint& x) {
    Scored s;
    s.x = x;
    s.gap = gap_of(x);
    const auto [qv, qo] = model_.evaluate(part(x, 0), part(x, 4));
    s.q_v = sentinel_.score(qv);
    s.q_o = sentinel_.score(qo);
    return s;
  }

  const Scored& global_best() const {
    const Scored* g = &best_.front();
    for (const Scored& b : best_) {
      if (better(b, *g)) g = &b;
    }
    return *g;
  }

  void move(std::size_t i, const Joint& gbest) { step(pos_[i], vel_[i], best_[i].x, gbest); }

  PayoffModel& model_;
  SolverConfig cfg_;
  Rng rng_;
  SentinelTracker sentinel_;
  Joint lo_{};
  Joint hi_{};
  StrategyBounds bounds_v_;
  StrategyBounds bounds_o_;
  std::vector<Joint> pos_;
  std::vector<Joint> vel_;
  std::vector<Scored> best_;
  std::vector<Strategy> probes_v_;
  std::vector<Strategy> probes_o_;
  std::size_t evaluations_ = 0;
};

}  // namespace

GameOutcome solve_gnep(PayoffModel& model, const StrategyBounds& bounds_v, const StrategyBounds& bounds_o,
                       const SolverConfig& config) {
  bounds_v.validate();
  bounds_o.validate();
  config.validate();
  return Swarm(model, bounds_v, bounds_o, config).run();
}

std::pair<Strategy, double> best_response_v(PayoffModel& model, const Strategy& s_o, const StrategyBounds& bounds,
                                            const Strategy& start, std::size_t swarm, std::size_t iterations,
                                            Rng& rng) {
  bounds.validate();
  SentinelTracker sentinel;
  struct Particle {
    std::array<double, 4> x, v, best;
    double best_q;
  };
  auto q_of = [&](const std::array<double, 4>& x) {
    return sentinel.score(model.evaluate_v(Strategy::from_array(x), s_o));
  };
  std::vector<Particle> ps(std::max<std::size_t>(swarm, 1));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto& p = ps[i];
    p.x = i == 0 ? bounds.clamp(start).as_array() : bounds.at(rng.uniform4()).as_array();
    for (std::size_t d = 0; d < 4; ++d) {
      p.v[d] = (2.0 * rng.uniform() - 1.0) * 0.25 * (bounds.axes[d].hi - bounds.axes[d].lo);
    }
    p.best = p.x;
    p.best_q = q_of(p.x);
  }
  auto leader = [&] {
    std::size_t g = 0;
    for (std::size_t i = 1; i < ps.size(); ++i) {
      if (std::tie(ps[i].best_q, ps[i].best) < std::tie(ps[g].best_q, ps[g].best)) g = i;
    }
    return g;
  };
  for (std::size_t it = 0; it < iterations; ++it) {
    const auto g = ps[leader()].best;
    for (auto& p : ps) {
      for (std::size_t d = 0; d < 4; ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        p.v[d] = 0.729 * p.v[d] + 1.49445 * r1 * (p.best[d] - p.x[d]) + 1.49445 * r2 * (g[d] - p.x[d]);
        p.x[d] += p.v[d];
        if (p.x[d] < bounds.axes[d].lo || p.x[d] > bounds.axes[d].hi) {
          p.x[d] = std::clamp(p.x[d], bounds.axes[d].lo, bounds.axes[d].hi);
          p.v[d] = 0.0;
        }
      }
      const double q = q_of(p.x);
      if (std::tie(q, p.x) < std::tie(p.best_q, p.best)) {
        p.best_q = q;
        p.best = p.x;
      }
    }
  }
  const auto& b = ps[leader()];
  return {Strategy::from_array(b.best), b.best_q};
}

}  // namespace gtp
