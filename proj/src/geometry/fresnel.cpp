#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gtp/geometry.hpp"

namespace gtp {
namespace {

constexpr int kOrder = 12;
// Upper bound on the phase swept inside one quadrature panel.
constexpr double kMaxPanelPhase = 3.0;

struct GaussLegendre {
  std::array<double, kOrder> nodes{};    // on [0, 1]
  std::array<double, kOrder> weights{};  // sum to 1

  GaussLegendre() {
    constexpr double pi = std::numbers::pi;
    for (int i = 0; i < kOrder; ++i) {
      double z = std::cos(pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (z * p1 - p0) / (z * z - 1.0);
        const double step = p1 / dp;
        z -= step;
        if (std::abs(step) < 1e-16) break;
      }
      nodes[i] = 0.5 * (1.0 - z);
      weights[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& rule() {
  static const GaussLegendre gl;
  return gl;
}

}  // namespace

FresnelMoments fresnel_moments(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw DomainError("fresnel_moments: non-finite argument");
  }
  // phi(t) = a t^2/2 + b t + c; |phi'| <= |a| + |b| on [0, 1].
  const double sweep = std::abs(a) + std::abs(b);
  const int panels = std::max(1, static_cast<int>(std::ceil(sweep / kMaxPanelPhase)));
  const double h = 1.0 / panels;
  const auto& gl = rule();

  FresnelMoments m;
  for (int p = 0; p < panels; ++p) {
    const double t0 = p * h;
    for (int i = 0; i < kOrder; ++i) {
      const double t = t0 + h * gl.nodes[i];
      const double w = h * gl.weights[i];
      const double phase = (0.5 * a * t + b) * t + c;
      const double cw = w * std::cos(phase);
      const double sw = w * std::sin(phase);
      m.x[0] += cw;
      m.y[0] += sw;
      m.x[1] += cw * t;
      m.y[1] += sw * t;
      m.x[2] += cw * t * t;
      m.y[2] += sw * t * t;
    }
  }
  return m;
}

FresnelPair fresnel(double s) {
  if (!std::isfinite(s)) throw DomainError("fresnel: non-finite argument");
  if (s == 0.0) return {};
  const double as = std::abs(s);
  const FresnelMoments m = fresnel_moments(std::numbers::pi * as * as, 0.0, 0.0);
  const double sign = s < 0.0 ? -1.0 : 1.0;
  return {sign * as * m.x[0], sign * as * m.y[0]};
}

}  // namespace gtp
