#pragma once

#include <memory>

#include "curve.hpp"

namespace knotfield {

// Lower bound on the admissible tube width of a curve: the tube embeds as long
// as eps stays below both the curvature radius and half the gap between
// far-apart arcs.
inline double reach_estimate(const ClosedCurve& c) {
  double k = c.max_curvature();
  double gap = c.min_far_distance();
  return std::min(1.0 / k, 0.5 * gap);
}

struct TubePoint {
  double s = 0;
  double y1 = 0, y2 = 0;
  double r() const { return std::hypot(y1, y2); }
  double theta() const { return std::atan2(y2, y1); }
};

// Tube coordinates around a core curve: (s, y) -> gamma(s) + eps(y1 N + y2 B),
// with (s, y) on (R/lZ) x D^2. Frames along the core are cached on a dense
// grid; asymptotic statements use the working region |y| < 1/10.
class TubeChart {
 public:
  TubeChart() = default;
  TubeChart(std::shared_ptr<const ClosedCurve> core, double eps, int frame_cache_n = 4096)
      : core_(std::move(core)), eps_(eps) {
    double reach = reach_estimate(*core_);
    if (!(eps_ > 0) || eps_ >= reach)
      throw Error(errc::validation_failed, "tube width " + fmt_double(eps_) +
                                               " not below reach estimate " + fmt_double(reach));
    cache_n_ = frame_cache_n;
    frames_.resize(cache_n_);
    us_.resize(cache_n_);
    svals_.resize(cache_n_);
    for (int i = 0; i < cache_n_; ++i) {
      us_[i] = i * two_pi / cache_n_;
      svals_[i] = core_->arclen_at_u(us_[i]);
      frames_[i] = core_->frenet_u(us_[i]);
    }
  }

  TubeChart(const ClosedCurve& core, double eps, int frame_cache_n = 4096)
      : TubeChart(std::make_shared<ClosedCurve>(core), eps, frame_cache_n) {}

  const ClosedCurve& core() const { return *core_; }
  std::shared_ptr<const ClosedCurve> core_ptr() const { return core_; }
  double eps() const { return eps_; }

  Vec3 embed(double s, double y1, double y2) const {
    if (std::hypot(y1, y2) > 1.0 + 1e-12)
      throw Error(errc::out_of_disk, "|y| = " + fmt_double(std::hypot(y1, y2)));
    double u = core_->u_of_s(s);
    FrenetFrame f = core_->frenet_u(u);
    return core_->eval_u(u) + eps_ * y1 * f.N + eps_ * y2 * f.B;
  }
  Vec3 embed(const TubePoint& p) const { return embed(p.s, p.y1, p.y2); }

  // Point at angular position theta on the boundary circle of radius `radius`
  // (radius defaults to eps; larger radii are used by connector routing).
  Vec3 embed_radial(double s, double theta, double radius) const {
    double u = core_->u_of_s(s);
    FrenetFrame f = core_->frenet_u(u);
    return core_->eval_u(u) + radius * (std::cos(theta) * f.N + std::sin(theta) * f.B);
  }

  Vec3 surface_point(double s, double theta) const { return embed_radial(s, theta, eps_); }

  // Inverse of embed for points inside the tube.
  TubePoint project(const Vec3& x) const {
    double d;
    double u = core_->nearest_u(x, &d, 1.05);
    if (d > eps_ * (1.0 + 1e-9))
      throw Error(errc::outside_tube,
                  "distance to core " + fmt_double(d) + " exceeds eps " + fmt_double(eps_));
    FrenetFrame f = core_->frenet_u(u);
    Vec3 rel = x - core_->eval_u(u);
    TubePoint p;
    p.s = core_->arclen_at_u(u);
    p.y1 = dot(rel, f.N) / eps_;
    p.y2 = dot(rel, f.B) / eps_;
    return p;
  }

  // Signed-free distance from x to the tube surface (positive outside and inside).
  double distance_to_surface(const Vec3& x) const {
    double d;
    core_->nearest_u(x, &d);
    return std::fabs(d - eps_);
  }

  // Jacobian factor of the chart: dx = eps^2 (1 - eps kappa(s) y1) ds dy.
  double volume_density(double s, double y1, double y2) const {
    if (std::hypot(y1, y2) > 1.0 + 1e-12)
      throw Error(errc::out_of_disk, "|y| = " + fmt_double(std::hypot(y1, y2)));
    double kappa = core_->frenet(s).kappa;
    return eps_ * eps_ * (1.0 - eps_ * kappa * y1);
  }

  // Surface measure factor A(s,theta) = 1 - eps kappa(s) cos theta; dS = eps A ds dtheta.
  double surface_density(double s, double theta) const {
    double kappa = core_->frenet(s).kappa;
    return 1.0 - eps_ * kappa * std::cos(theta);
  }

  // Coordinate vector field d/ds at (s, y): (1 - eps kappa y1) T + eps tau (y2 N - y1 B).
  Vec3 dxds(double s, double y1, double y2) const {
    FrenetFrame f = core_->frenet(s);
    return (1.0 - eps_ * f.kappa * y1) * f.T + eps_ * f.tau * (y2 * f.N - y1 * f.B);
  }

  // Components of a Cartesian vector in the (d/ds, d/dy1, d/dy2) basis at (s,y).
  // Note d/dy1 = eps N and d/dy2 = eps B.
  Vec3 chart_components(double s, double y1, double y2, const Vec3& v) const {
    FrenetFrame f = core_->frenet(s);
    Vec3 es = (1.0 - eps_ * f.kappa * y1) * f.T + eps_ * f.tau * (y2 * f.N - y1 * f.B);
    Mat3 A;
    A(0, 0) = es.x; A(0, 1) = eps_ * f.N.x; A(0, 2) = eps_ * f.B.x;
    A(1, 0) = es.y; A(1, 1) = eps_ * f.N.y; A(1, 2) = eps_ * f.B.y;
    A(2, 0) = es.z; A(2, 1) = eps_ * f.N.z; A(2, 2) = eps_ * f.B.z;
    return solve3(A, v);
  }

  // Fast cached frame access by free parameter (for quadrature hot loops).
  int frame_cache_size() const { return cache_n_; }
  double cached_u(int i) const { return us_[i]; }
  double cached_s(int i) const { return svals_[i]; }
  const FrenetFrame& cached_frame(int i) const { return frames_[i]; }

 private:
  std::shared_ptr<const ClosedCurve> core_;
  double eps_ = 0;
  int cache_n_ = 0;
  std::vector<double> us_, svals_;
  std::vector<FrenetFrame> frames_;
};

}  // namespace knotfield
