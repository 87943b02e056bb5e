#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "current.hpp"
#include "curve.hpp"
#include "quadrature.hpp"
#include "tube.hpp"

namespace knotfield {

struct QuadSpec {
  double rel_tol = 1e-9;
  double abs_floor = 1e-13;
  int max_depth = 26;
  int theta_min = 32;
  int theta_max = 2048;
  double clearance = 0;  // 0 = per-source default
};

namespace detail {

// Dense periodic geometry table with 4-point Lagrange interpolation; the
// surface quadrature spends nearly all its time here.
struct GeomTable {
  int n = 0;
  double h = 0;
  double L = 0;
  std::vector<Vec3> pos, d1, T, N, B;
  std::vector<double> kappa, tau, s_periodic;  // s(u) - L u / 2pi

  explicit GeomTable(const ClosedCurve& c, int size = 8192) : n(size) {
    h = two_pi / n;
    L = c.length();
    pos.resize(n);
    d1.resize(n);
    T.resize(n);
    N.resize(n);
    B.resize(n);
    kappa.resize(n);
    tau.resize(n);
    s_periodic.resize(n);
    for (int i = 0; i < n; ++i) {
      double u = i * h;
      pos[i] = c.eval_u(u);
      d1[i] = c.deriv_u(u, 1);
      FrenetFrame f = c.frenet_u(u);
      T[i] = f.T;
      N[i] = f.N;
      B[i] = f.B;
      kappa[i] = f.kappa;
      tau[i] = f.tau;
      s_periodic[i] = c.arclen_at_u(u) - L * u / two_pi;
    }
  }

  struct Sample {
    Vec3 pos, d1, T, N, B;
    double kappa, tau, s;
  };

  Sample at(double u) const {
    double x = wrap(u, two_pi) / h;
    int i = static_cast<int>(x);
    double t = x - i;
    // cubic Lagrange weights on nodes i-1 .. i+2
    double wm1 = -t * (t - 1) * (t - 2) / 6.0;
    double w0 = (t * t - 1) * (t - 2) / 2.0;
    double w1 = -t * (t + 1) * (t - 2) / 2.0;
    double w2 = t * (t * t - 1) / 6.0;
    int im1 = (i + n - 1) % n, i1 = (i + 1) % n, i2 = (i + 2) % n;
    auto mixv = [&](const std::vector<Vec3>& v) {
      return wm1 * v[im1] + w0 * v[i] + w1 * v[i1] + w2 * v[i2];
    };
    auto mixd = [&](const std::vector<double>& v) {
      return wm1 * v[im1] + w0 * v[i] + w1 * v[i1] + w2 * v[i2];
    };
    Sample s;
    s.pos = mixv(pos);
    s.d1 = mixv(d1);
    s.T = mixv(T);
    s.N = mixv(N);
    s.B = mixv(B);
    s.kappa = mixd(kappa);
    s.tau = mixd(tau);
    s.s = mixd(s_periodic) + L * wrap(u, two_pi) / two_pi;
    return s;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Wire fields.
// ---------------------------------------------------------------------------

// Biot-Savart field of a smooth closed unit-current wire, by adaptive Gauss
// panels in the curve parameter recentered on the nearest point.
inline Vec3 wire_field(const ClosedCurve& c, const Vec3& x, const QuadSpec& q = {}) {
  double dmin;
  double ustar = c.nearest_u(x, &dmin);
  double clearance = q.clearance > 0 ? q.clearance : 1e-7 * c.length();
  if (dmin <= clearance)
    throw Error(errc::too_close_to_wire, "distance " + fmt_double(dmin) + " to the wire");
  auto f = [&](double u) {
    Vec3 g = c.eval_u(u);
    Vec3 d = c.deriv_u(u, 1);
    Vec3 r = x - g;
    double r2 = norm2(r);
    return cross(d, r) / (4 * pi * r2 * std::sqrt(r2));
  };
  // scale estimate for the absolute budget: field of a loop at this distance
  double scale = 1.0 / std::max(dmin, 1e-6 * c.length());
  double abs_tol = q.rel_tol * scale + q.abs_floor;
  return adaptive_gauss(f, ustar - pi, ustar + pi, abs_tol, q.max_depth);
}

// Exact per-segment Biot-Savart sum for a closed polyline (stable two-point
// form; no quadrature error).
inline Vec3 wire_field(const Polyline& p, const Vec3& x, double clearance = 0) {
  Vec3 acc{};
  size_t n = p.segment_count();
  for (size_t i = 0; i < n; ++i) {
    Vec3 r1 = p.segment_a(i) - x;
    Vec3 r2 = p.segment_b(i) - x;
    double n1 = norm(r1), n2 = norm(r2);
    double denom = n1 * n2 * (n1 * n2 + dot(r1, r2));
    if (!(denom > 1e-14 * std::max(n1 * n2 * n1 * n2, 1e-300)) || n1 <= clearance ||
        n2 <= clearance)
      throw Error(errc::too_close_to_wire, "evaluation point on a wire segment");
    acc += (n1 + n2) / denom * cross(r1, r2);
  }
  return acc / (4 * pi);
}

// ---------------------------------------------------------------------------
// Surface-current field.
// ---------------------------------------------------------------------------

namespace detail {

struct SurfaceEvaluator {
  const SurfaceCurrent* sc;
  std::shared_ptr<GeomTable> geom;
  double scale;  // magnitude proxy for tolerance budgets

  explicit SurfaceEvaluator(const SurfaceCurrent& current)
      : sc(&current), geom(std::make_shared<GeomTable>(current.chart().core())) {
    double s = 0;
    for (double v : current.F().cos_coeffs()) s += std::fabs(v);
    for (double v : current.F().sin_coeffs()) s += std::fabs(v);
    for (double v : current.G().cos_coeffs()) s += std::fabs(v);
    for (double v : current.G().sin_coeffs()) s += std::fabs(v);
    scale = std::max(s, 1e-6);
  }

  // Current measure integrated around one meridian ring at parameter u:
  //   ring(u) = int_0^{2pi} J dS x (x - x') / (4pi |x-x'|^3) dtheta  (du measure)
  Vec3 ring(const Vec3& x, double u, const std::vector<double>& cth,
            const std::vector<double>& sth, const std::vector<double>& Fth) const {
    GeomTable::Sample g = geom->at(u);
    double eps = sc->eps();
    double Gs = sc->G().eval(g.s);
    double speed = norm(g.d1);
    int nth = static_cast<int>(cth.size());
    Vec3 acc{};
    for (int j = 0; j < nth; ++j) {
      double c = cth[j], s = sth[j];
      Vec3 xp = g.pos + eps * (c * g.N + s * g.B);
      // J dS = eps { F [(1 - eps k c) T + eps tau (s N - c B)] + G (-s N + c B) } du dtheta
      Vec3 M = Fth[j] * ((1 - eps * g.kappa * c) * g.T + (eps * g.tau) * (s * g.N - c * g.B)) +
               Gs * (c * g.B - s * g.N);
      Vec3 r = x - xp;
      double r2 = norm2(r);
      acc += cross(M, r) / (r2 * std::sqrt(r2));
    }
    return (eps * speed * two_pi / (4 * pi * nth)) * acc;
  }

  Vec3 eval(const Vec3& x, const QuadSpec& q) const {
    const ClosedCurve& core = sc->chart().core();
    double eps = sc->eps();
    double dmin;
    double ustar = core.nearest_u(x, &dmin);
    double clear_out = q.clearance > 0 ? q.clearance : eps / 4;
    if (dmin >= eps) {
      if (dmin - eps < clear_out)
        throw Error(errc::too_close_to_surface, "outside clearance " + fmt_double(dmin - eps));
    } else {
      if (dmin / eps > 0.75)
        throw Error(errc::too_close_to_surface,
                    "inside evaluation needs |y| <= 3/4, got " + fmt_double(dmin / eps));
    }
    // pick the meridian resolution on the nearest ring by doubling
    int nth = q.theta_min;
    std::vector<double> cth, sth, Fth;
    auto fill = [&](int m) {
      cth.resize(m);
      sth.resize(m);
      Fth.resize(m);
      for (int j = 0; j < m; ++j) {
        double th = two_pi * j / m;
        cth[j] = std::cos(th);
        sth[j] = std::sin(th);
        Fth[j] = sc->F().eval(th);
      }
    };
    fill(nth);
    Vec3 prev = ring(x, ustar, cth, sth, Fth);
    while (nth < q.theta_max) {
      fill(2 * nth);
      Vec3 cur = ring(x, ustar, cth, sth, Fth);
      double diff = norm(cur - prev);
      prev = cur;
      nth *= 2;
      if (diff <= 0.1 * q.rel_tol * (norm(cur) + scale)) break;
    }
    double abs_tol = q.rel_tol * scale + q.abs_floor;
    auto f = [&](double u) { return ring(x, u, cth, sth, Fth); };
    return adaptive_gauss(f, ustar - pi, ustar + pi, abs_tol, q.max_depth);
  }
};

}  // namespace detail

inline Vec3 surface_field(const SurfaceCurrent& sc, const Vec3& x, const QuadSpec& q = {}) {
  return detail::SurfaceEvaluator(sc).eval(x, q);
}

// ---------------------------------------------------------------------------
// Leading-order model of the surface-current field near the core.
// ---------------------------------------------------------------------------

// Chart components (B^s, B^y1, B^y2) of the thin-tube limit:
//   B^s = G(s),  B^y1 = (b1 + b2 y1 - a2 y2)/(2 eps),
//   B^y2 = -(a1 + a2 y1 + b2 y2)/(2 eps).
inline Vec3 asymptotic_model(const SurfaceCurrent& sc, double s, double y1, double y2) {
  double eps = sc.eps();
  double a1 = sc.fourier_a(1), b1 = sc.fourier_b(1);
  double a2 = sc.fourier_a(2), b2 = sc.fourier_b(2);
  return {sc.G().eval(s), (b1 + b2 * y1 - a2 * y2) / (2 * eps),
          -(a1 + a2 * y1 + b2 * y2) / (2 * eps)};
}

inline Vec3 asymptotic_model_cartesian(const SurfaceCurrent& sc, const Vec3& x) {
  TubePoint p = sc.chart().project(x);
  if (p.r() >= 0.1 * (1 + 1e-9))
    throw Error(errc::left_domain, "model valid for |y| < 1/10, got " + fmt_double(p.r()));
  Vec3 comp = asymptotic_model(sc, p.s, p.y1, p.y2);
  FrenetFrame f = sc.chart().core().frenet(p.s);
  double eps = sc.eps();
  Vec3 es = sc.chart().dxds(p.s, p.y1, p.y2);
  return comp.x * es + comp.y * (eps * f.N) + comp.z * (eps * f.B);
}

// ---------------------------------------------------------------------------
// FieldHandle: a pure evaluator x -> B(x) over any supported source.
// ---------------------------------------------------------------------------

class FieldHandle {
 public:
  FieldHandle() = default;

  static FieldHandle wire(std::shared_ptr<const ClosedCurve> c, QuadSpec q = {}) {
    FieldHandle h;
    h.src_ = WireCurve{std::move(c), q};
    return h;
  }
  static FieldHandle wire(const ClosedCurve& c, QuadSpec q = {}) {
    return wire(std::make_shared<ClosedCurve>(c), q);
  }
  static FieldHandle wire(std::shared_ptr<const Polyline> p, double clearance = 0) {
    FieldHandle h;
    h.src_ = WirePoly{std::move(p), clearance};
    return h;
  }
  static FieldHandle wire(const Polyline& p, double clearance = 0) {
    return wire(std::make_shared<Polyline>(p), clearance);
  }
  static FieldHandle surface(std::shared_ptr<const SurfaceCurrent> sc, QuadSpec q = {}) {
    FieldHandle h;
    h.src_ = Surface{std::make_shared<detail::SurfaceEvaluator>(*sc), std::move(sc), q};
    return h;
  }
  static FieldHandle surface(const SurfaceCurrent& sc, QuadSpec q = {}) {
    return surface(std::make_shared<SurfaceCurrent>(sc), q);
  }
  static FieldHandle model(std::shared_ptr<const SurfaceCurrent> sc) {
    FieldHandle h;
    h.src_ = Model{std::move(sc)};
    return h;
  }
  static FieldHandle model(const SurfaceCurrent& sc) {
    return model(std::make_shared<SurfaceCurrent>(sc));
  }
  static FieldHandle sum(std::vector<std::pair<double, FieldHandle>> parts) {
    FieldHandle h;
    h.src_ = Sum{std::move(parts)};
    return h;
  }

  // Non-null when this handle is the thin-tube model of a surface current;
  // chart-based consumers can then bypass the Cartesian projection round trip.
  const SurfaceCurrent* model_source() const {
    auto* m = std::get_if<Model>(&src_);
    return m ? m->sc.get() : nullptr;
  }

  Vec3 operator()(const Vec3& x) const {
    if (std::holds_alternative<std::monostate>(src_))
      throw Error(errc::usage, "empty field handle");
    if (auto* w = std::get_if<WireCurve>(&src_)) return wire_field(*w->curve, x, w->q);
    if (auto* p = std::get_if<WirePoly>(&src_)) return wire_field(*p->poly, x, p->clearance);
    if (auto* s = std::get_if<Surface>(&src_)) return s->eval->eval(x, s->q);
    if (auto* m = std::get_if<Model>(&src_)) return asymptotic_model_cartesian(*m->sc, x);
    const Sum& sm = std::get<Sum>(src_);
    Vec3 acc{};
    for (const auto& [c, h] : sm.parts) acc += c * h(x);
    return acc;
  }

 private:
  struct WireCurve {
    std::shared_ptr<const ClosedCurve> curve;
    QuadSpec q;
  };
  struct WirePoly {
    std::shared_ptr<const Polyline> poly;
    double clearance;
  };
  struct Surface {
    std::shared_ptr<detail::SurfaceEvaluator> eval;
    std::shared_ptr<const SurfaceCurrent> sc;
    QuadSpec q;
  };
  struct Model {
    std::shared_ptr<const SurfaceCurrent> sc;
  };
  struct Sum {
    std::vector<std::pair<double, FieldHandle>> parts;
  };
  std::variant<std::monostate, WireCurve, WirePoly, Surface, Model, Sum> src_;
};

// ---------------------------------------------------------------------------
// Differential probes and comparison norms.
// ---------------------------------------------------------------------------

inline Mat3 field_jacobian(const FieldHandle& f, const Vec3& x, double step) {
  Mat3 J;
  const Vec3 e[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int j = 0; j < 3; ++j) {
    Vec3 bp = f(x + step * e[j]);
    Vec3 bm = f(x - step * e[j]);
    Vec3 d = (bp - bm) / (2 * step);
    J(0, j) = d.x;
    J(1, j) = d.y;
    J(2, j) = d.z;
  }
  return J;
}

inline double divergence_fd(const FieldHandle& f, const Vec3& x, double step) {
  return field_jacobian(f, x, step).trace();
}

inline Vec3 curl_fd(const FieldHandle& f, const Vec3& x, double step) {
  Mat3 J = field_jacobian(f, x, step);
  return {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)};
}

// Compact evaluation set disjoint from all sources.
struct EvaluationRegion {
  std::vector<Vec3> points;
  double clearance = 0;

  double diameter() const {
    double d = 0;
    for (size_t i = 0; i < points.size(); ++i)
      for (size_t j = i + 1; j < points.size(); ++j) d = std::max(d, dist(points[i], points[j]));
    return d;
  }
};

// Grid on the annulus rmin <= |y| <= rmax inside the tube around the core.
inline EvaluationRegion annulus_region(const TubeChart& chart, double rmin, double rmax, int ns,
                                       int ntheta, int nr) {
  EvaluationRegion K;
  double L = chart.core().length();
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ntheta; ++j)
      for (int k = 0; k < nr; ++k) {
        double r = nr == 1 ? 0.5 * (rmin + rmax)
                           : rmin + (rmax - rmin) * k / static_cast<double>(nr - 1);
        double th = two_pi * (j + 0.5 * (i % 2)) / ntheta;
        K.points.push_back(chart.embed(i * L / ns, r * std::cos(th), r * std::sin(th)));
      }
  K.clearance = chart.eps() * (1.0 - rmax);
  return K;
}

// C^m surrogate distance: max over the region of the componentwise difference
// of values and of central-difference derivatives up to order m.
inline double field_distance(const FieldHandle& f1, const FieldHandle& f2,
                             const EvaluationRegion& K, int m) {
  double step = 1e-4 * std::max(K.diameter(), 1e-6);
  double worst = 0;
  auto absmax = [](const Vec3& v) {
    return std::max({std::fabs(v.x), std::fabs(v.y), std::fabs(v.z)});
  };
  for (const Vec3& x : K.points) {
    worst = std::max(worst, absmax(f1(x) - f2(x)));
    if (m >= 1) {
      const Vec3 e[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      for (int j = 0; j < 3; ++j) {
        Vec3 d1 = (f1(x + step * e[j]) - f1(x - step * e[j])) / (2 * step);
        Vec3 d2 = (f2(x + step * e[j]) - f2(x - step * e[j])) / (2 * step);
        worst = std::max(worst, absmax(d1 - d2));
        if (m >= 2) {
          for (int k = j; k < 3; ++k) {
            Vec3 s1 = (f1(x + step * (e[j] + e[k])) - f1(x + step * (e[j] - e[k])) -
                       f1(x - step * (e[j] - e[k])) + f1(x - step * (e[j] + e[k]))) /
                      (4 * step * step);
            Vec3 s2 = (f2(x + step * (e[j] + e[k])) - f2(x + step * (e[j] - e[k])) -
                       f2(x - step * (e[j] - e[k])) + f2(x - step * (e[j] + e[k]))) /
                      (4 * step * step);
            worst = std::max(worst, absmax(s1 - s2));
          }
        }
      }
    }
  }
  return worst;
}

}  // namespace knotfield
