#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gtp/geometry.hpp"

namespace gtp {

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  if (a > -pi && a <= pi) return a;
  a = std::remainder(a, 2.0 * pi);
  if (a <= -pi) a += 2.0 * pi;
  return a;
}

Pose::Pose(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(theta_)) {
    throw DomainError("Pose: non-finite component");
  }
}

Vec2 RigidTransform::apply(Vec2 p) const {
  if (mirror_x_) p.x = -p.x;
  const double c = std::cos(rotation_);
  const double s = std::sin(rotation_);
  return {c * p.x - s * p.y + translation_.x, s * p.x + c * p.y + translation_.y};
}

Pose RigidTransform::apply(const Pose& p) const {
  const Vec2 q = apply(p.position());
  const double theta = mirror_x_ ? std::numbers::pi - p.theta : p.theta;
  return {q.x, q.y, theta + rotation_};
}

RigidTransform RigidTransform::inverse() const {
  // x -> R M x + t, inverse: x -> M R^T (x - t) = (M R^T M) M x' ...
  // With M a reflection about the y axis, M R(a) M = R(-a).
  const double c = std::cos(rotation_);
  const double s = std::sin(rotation_);
  Vec2 t{-(c * translation_.x + s * translation_.y), -(-s * translation_.x + c * translation_.y)};
  if (mirror_x_) {
    t.x = -t.x;
    return {rotation_, t, true};
  }
  return {-rotation_, t, false};
}

ClothoidSegment ClothoidSegment::straight(const Pose& start, double length) {
  if (!(length >= 0.0)) throw DomainError("ClothoidSegment: negative length");
  return {start, 0.0, 0.0, length};
}

ClothoidSegment ClothoidSegment::transformed(const RigidTransform& t) const {
  const double k = t.curvature_sign();
  return {t.apply(start), k * kappa0, k * sharpness, length};
}

namespace {

double sinc(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

}  // namespace

CurvePoint eval_segment(const ClothoidSegment& seg, double s) {
  if (!(s >= 0.0 && s <= seg.length)) {
    throw RangeError(fmt::format("eval_segment: s={} outside [0, {}]", s, seg.length));
  }
  const Pose& p0 = seg.start;
  const double kappa = seg.curvature_at(s);
  const double theta = p0.theta + (seg.kappa0 + 0.5 * seg.sharpness * s) * s;
  if (seg.sharpness == 0.0) {
    // Chord of a circular arc (or a straight line when kappa0 == 0).
    const double half = 0.5 * seg.kappa0 * s;
    const double chord = s * sinc(half);
    const double dir = p0.theta + half;
    return {{p0.x + chord * std::cos(dir), p0.y + chord * std::sin(dir), theta}, kappa};
  }
  const FresnelMoments m = fresnel_moments(seg.sharpness * s * s, seg.kappa0 * s, p0.theta);
  return {{p0.x + s * m.x[0], p0.y + s * m.y[0], theta}, kappa};
}

namespace {

double guess_sharpness_parameter(double phi0, double phi1) {
  constexpr double cf[] = {2.989696028701907,  0.716228953608281, -0.458969738821509,
                           -0.502821153340377, 0.261062141752652, -0.045854475238709};
  double x = phi0 / std::numbers::pi;
  double y = phi1 / std::numbers::pi;
  const double xy = x * y;
  x *= x;
  y *= y;
  return (phi0 + phi1) *
         (cf[0] + xy * (cf[1] + xy * cf[2]) + (cf[3] + xy * cf[4]) * (x + y) + cf[5] * (x * x + y * y));
}

}  // namespace

ClothoidSegment fit_g1(const Pose& a, const Pose& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double r = std::hypot(dx, dy);
  if (r <= 1e-12) throw DegenerateInputError("fit_g1: coincident endpoints");

  const double phi = std::atan2(dy, dx);
  const double phi0 = wrap_angle(a.theta - phi);
  const double phi1 = wrap_angle(b.theta - phi);
  const double delta = phi1 - phi0;

  // Root of g(A) = Y0(2A, delta - A, phi0); g'(A) = X2 - X1.
  double big_a = guess_sharpness_parameter(phi0, phi1);
  double residual = 0.0;
  constexpr int kMaxIter = 60;
  bool converged = false;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const FresnelMoments m = fresnel_moments(2.0 * big_a, delta - big_a, phi0);
    residual = m.y[0];
    const double slope = m.x[2] - m.x[1];
    if (std::abs(residual) < 1e-15) {
      converged = true;
      break;
    }
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double step = residual / slope;
    big_a -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(big_a))) {
      residual = fresnel_moments(2.0 * big_a, delta - big_a, phi0).y[0];
      converged = true;
      break;
    }
  }
  if (!converged && std::abs(residual) > 1e-12) {
    throw NoConvergenceError(fmt::format("fit_g1: Newton did not converge (residual {:.3e})", residual),
                             residual);
  }
  const FresnelMoments m = fresnel_moments(2.0 * big_a, delta - big_a, phi0);
  if (!(m.x[0] > 0.0)) {
    throw NoConvergenceError("fit_g1: non-positive chord projection", std::abs(m.y[0]));
  }
  const double length = r / m.x[0];
  return {a, (delta - big_a) / length, 2.0 * big_a / (length * length), length};
}

}  // namespace gtp
