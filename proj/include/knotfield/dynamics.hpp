#pragma once

#include "field.hpp"
#include "linalg.hpp"
#include "ode.hpp"

namespace knotfield {

// ---------------------------------------------------------------------------
// Field-line tracing in Cartesian space.
// ---------------------------------------------------------------------------

// Arc-length parametrized integral curve of B/|B| from x0 over the given
// length, adaptive embedded Runge-Kutta with local error <= tol. An optional
// domain predicate aborts the trace with LeftDomain.
inline Polyline trace_field_line(const FieldHandle& field, Vec3 x0, double length, double tol,
                                 const std::function<bool(const Vec3&)>& inside = nullptr,
                                 double max_step = 0) {
  std::vector<Vec3> pts;
  Dopri5<3> ode;
  ode.rtol = tol;
  ode.atol = tol * 1e-2;
  ode.max_h = max_step;
  auto rhs = [&](double, const std::array<double, 3>& y) {
    Vec3 x{y[0], y[1], y[2]};
    if (inside && !inside(x)) throw Error(errc::left_domain, "field line left the domain");
    Vec3 B = field(x);
    double n = norm(B);
    if (n < 1e-13) throw Error(errc::step_underflow, "vanishing field along the trace");
    return std::array<double, 3>{B.x / n, B.y / n, B.z / n};
  };
  ode.integrate(rhs, {x0.x, x0.y, x0.z}, 0.0, length, [&](double, const std::array<double, 3>& y) {
    pts.push_back({y[0], y[1], y[2]});
  });
  return Polyline(std::move(pts), false);
}

// ---------------------------------------------------------------------------
// The field seen in tube coordinates as a graph over s.
// ---------------------------------------------------------------------------

class ChartField {
 public:
  ChartField(const FieldHandle& f, const TubeChart& chart) : f_(&f), chart_(&chart) {
    const SurfaceCurrent* m = f.model_source();
    if (m && m->chart().core_ptr() == chart.core_ptr() &&
        std::fabs(m->eps() - chart.eps()) < 1e-15)
      model_ = m;
  }

  // (B^s, B^y1, B^y2) at (s, y)
  Vec3 comps(double s, double y1, double y2) const {
    if (model_) return asymptotic_model(*model_, s, y1, y2);
    Vec3 x = chart_->embed(s, y1, y2);
    return chart_->chart_components(s, y1, y2, (*f_)(x));
  }

  // dy/ds = B^y / B^s; throws when the s-component loses its sign
  std::array<double, 2> rhs(double s, double y1, double y2) const {
    Vec3 c = comps(s, y1, y2);
    if (c.x <= 0)
      throw Error(errc::transversality_lost,
                  "B^s = " + fmt_double(c.x) + " at s=" + fmt_double(s));
    return {c.y / c.x, c.z / c.x};
  }

  const TubeChart& chart() const { return *chart_; }

 private:
  const FieldHandle* f_;
  const TubeChart* chart_;
  const SurfaceCurrent* model_ = nullptr;
};

// First return to the disk section {s = s0}; escapes (expected generically for
// a hyperbolic line) raise NoReturn.
inline std::pair<double, double> poincare_map(const FieldHandle& field, const TubeChart& chart,
                                              double s0, double y1, double y2,
                                              double rtol = 1e-10) {
  ChartField cf(field, chart);
  Dopri5<2> ode;
  ode.rtol = rtol;
  ode.atol = rtol * 1e-2;
  auto rhs = [&](double s, const std::array<double, 2>& y) {
    if (std::hypot(y[0], y[1]) >= 0.1)
      throw Error(errc::no_return, "orbit escaped |y| < 1/10 before returning");
    return cf.rhs(s, y[0], y[1]);
  };
  auto y = ode.integrate(rhs, {y1, y2}, s0, s0 + chart.core().length());
  return {y[0], y[1]};
}

// ---------------------------------------------------------------------------
// Invariant circle as a periodic graph y*(s), by trigonometric collocation.
// ---------------------------------------------------------------------------

struct PeriodicOrbit {
  std::shared_ptr<const TubeChart> chart;
  TrigSeries y1, y2;        // period = core length
  double residual = 0;      // sup-norm of the collocation defect at the nodes
  double defect = 0;        // sup |y' - f(s,y)| on a 4x oversampled grid; this
                            // measures spectral truncation, which plateaus at
                            // the near-field harmonics of the source surface
  double sup_y = 0;         // sup_s |y*(s)|
  double lambda_plus = 0;   // Floquet exponents per period
  double lambda_minus = 0;
  std::vector<double> nodes_s;
  std::vector<Mat2> node_jacobians;  // d(f)/dy at the collocation nodes
  std::vector<double> node_bs;       // B^s along the orbit

  Vec3 point(double s) const {
    return chart->embed(s, y1.eval(s), y2.eval(s));
  }
};

struct OrbitOptions {
  double newton_tol = 3e-10;  // sup-norm of the collocation residual
  int max_newton = 30;
  double fd_step_factor = 1e-6;  // Jacobian step = factor * eps
  double domain_limit = 0.1;
};

namespace detail {

// Spectral differentiation matrix for an odd number of periodic nodes.
inline std::vector<double> fourier_diff_matrix(int n, double period) {
  std::vector<double> D(n * n, 0.0);
  double w = two_pi / period;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int k = i - j;
      double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      D[i * n + j] = w * 0.5 * sgn / std::sin(pi * k / n);
    }
  return D;
}

}  // namespace detail

// Solve the periodic graph equation dy/ds = B^y(s,y)/B^s(s,y) by collocation
// with Newton iteration. Shooting is useless here: the transverse dynamics
// expands by e^{L/eps} per period, while the boundary-value formulation stays
// well conditioned.
inline PeriodicOrbit find_periodic_orbit(const FieldHandle& field, const TubeChart& chart,
                                         int n_modes, OrbitOptions opts = {}) {
  ChartField cf(field, chart);
  double L = chart.core().length();
  double eps = chart.eps();
  int N = 2 * n_modes + 1;
  std::vector<double> D = detail::fourier_diff_matrix(N, L);
  std::vector<double> svals(N);
  for (int i = 0; i < N; ++i) svals[i] = i * L / N;

  std::vector<double> U(2 * N, 0.0);  // interleaved (y1_i, y2_i), start on the core
  std::vector<double> fvals(2 * N), R(2 * N);
  std::vector<Mat2> jac(N);
  std::vector<double> bs(N);

  auto eval_f = [&](const std::vector<double>& u, std::vector<double>& out) {
    for (int i = 0; i < N; ++i) {
      if (std::hypot(u[2 * i], u[2 * i + 1]) > opts.domain_limit)
        throw Error(errc::newton_diverged, "iterate left |y| < 1/10");
      auto v = cf.rhs(svals[i], u[2 * i], u[2 * i + 1]);
      out[2 * i] = v[0];
      out[2 * i + 1] = v[1];
    }
  };
  auto residual = [&](const std::vector<double>& u, const std::vector<double>& f,
                      std::vector<double>& out) {
    for (int i = 0; i < N; ++i) {
      double d1 = 0, d2 = 0;
      for (int j = 0; j < N; ++j) {
        d1 += D[i * N + j] * u[2 * j];
        d2 += D[i * N + j] * u[2 * j + 1];
      }
      out[2 * i] = d1 - f[2 * i];
      out[2 * i + 1] = d2 - f[2 * i + 1];
    }
  };
  auto supnorm = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  };

  eval_f(U, fvals);
  residual(U, fvals, R);
  double rn = supnorm(R);
  double h = opts.fd_step_factor * eps;
  int iter = 0;
  while (rn > opts.newton_tol) {
    if (++iter > opts.max_newton)
      throw Error(errc::newton_diverged,
                  "no convergence after " + std::to_string(opts.max_newton) +
                      " iterations, residual " + fmt_double(rn));
    // pointwise transverse Jacobians by central differences
    for (int i = 0; i < N; ++i) {
      double s = svals[i], a = U[2 * i], b = U[2 * i + 1];
      auto fp1 = cf.rhs(s, a + h, b), fm1 = cf.rhs(s, a - h, b);
      auto fp2 = cf.rhs(s, a, b + h), fm2 = cf.rhs(s, a, b - h);
      jac[i] = {(fp1[0] - fm1[0]) / (2 * h), (fp2[0] - fm2[0]) / (2 * h),
                (fp1[1] - fm1[1]) / (2 * h), (fp2[1] - fm2[1]) / (2 * h)};
    }
    // assemble J = D (x) I - blockdiag(jac)
    int n2 = 2 * N;
    std::vector<double> A(n2 * n2, 0.0);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        A[(2 * i) * n2 + 2 * j] = D[i * N + j];
        A[(2 * i + 1) * n2 + 2 * j + 1] = D[i * N + j];
      }
      A[(2 * i) * n2 + 2 * i] -= jac[i].a;
      A[(2 * i) * n2 + 2 * i + 1] -= jac[i].b;
      A[(2 * i + 1) * n2 + 2 * i] -= jac[i].c;
      A[(2 * i + 1) * n2 + 2 * i + 1] -= jac[i].d;
    }
    std::vector<double> step = lu_solve(std::move(A), R);
    // backtracking line search on the residual
    double t = 1.0;
    std::vector<double> Unew(2 * N), fnew(2 * N), Rnew(2 * N);
    bool accepted = false;
    for (int ls = 0; ls < 8; ++ls, t *= 0.5) {
      for (int i = 0; i < 2 * N; ++i) Unew[i] = U[i] - t * step[i];
      try {
        eval_f(Unew, fnew);
      } catch (const Error&) {
        continue;
      }
      residual(Unew, fnew, Rnew);
      double rnew = supnorm(Rnew);
      if (rnew < rn || (t == 1.0 && rnew < opts.newton_tol)) {
        U = Unew;
        fvals = fnew;
        R = Rnew;
        rn = rnew;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw Error(errc::newton_diverged, "line search stalled at residual " + fmt_double(rn));
  }

  // final transverse Jacobians and B^s along the orbit (reused by the Floquet
  // integration)
  for (int i = 0; i < N; ++i) {
    double s = svals[i], a = U[2 * i], b = U[2 * i + 1];
    auto fp1 = cf.rhs(s, a + h, b), fm1 = cf.rhs(s, a - h, b);
    auto fp2 = cf.rhs(s, a, b + h), fm2 = cf.rhs(s, a, b - h);
    jac[i] = {(fp1[0] - fm1[0]) / (2 * h), (fp2[0] - fm2[0]) / (2 * h),
              (fp1[1] - fm1[1]) / (2 * h), (fp2[1] - fm2[1]) / (2 * h)};
    bs[i] = cf.comps(svals[i], a, b).x;
  }

  PeriodicOrbit orbit;
  orbit.chart = std::make_shared<TubeChart>(chart);
  std::vector<double> v1(N), v2(N);
  for (int i = 0; i < N; ++i) {
    v1[i] = U[2 * i];
    v2[i] = U[2 * i + 1];
  }
  orbit.y1 = TrigSeries::fit(v1, n_modes, L);
  orbit.y2 = TrigSeries::fit(v2, n_modes, L);
  orbit.nodes_s = svals;
  orbit.node_jacobians = jac;
  orbit.node_bs = bs;
  orbit.residual = rn;
  // oversampled defect of the differential equation (truncation diagnostic)
  double worst = 0, sy = 0;
  int M = 4 * N;
  for (int i = 0; i < M; ++i) {
    double s = i * L / M;
    double a = orbit.y1.eval(s), b = orbit.y2.eval(s);
    sy = std::max(sy, std::hypot(a, b));
    auto v = cf.rhs(s, a, b);
    worst = std::max({worst, std::fabs(orbit.y1.eval_deriv(s, 1) - v[0]),
                      std::fabs(orbit.y2.eval_deriv(s, 1) - v[1])});
  }
  orbit.defect = worst;
  orbit.sup_y = sy;
  return orbit;
}

// ---------------------------------------------------------------------------
// Floquet exponents of the transverse variational equation, by continuous
// QR accumulation of log-norms (the per-period factors e^{L/eps} are never
// formed).
// ---------------------------------------------------------------------------

inline std::pair<double, double> floquet_exponents(const PeriodicOrbit& orbit) {
  if (orbit.node_jacobians.empty())
    throw Error(errc::usage, "orbit carries no variational data");
  int N = static_cast<int>(orbit.node_jacobians.size());
  double L = orbit.chart->core().length();
  // interpolate A(s) entrywise
  std::vector<double> ea(N), eb(N), ec(N), ed(N);
  for (int i = 0; i < N; ++i) {
    ea[i] = orbit.node_jacobians[i].a;
    eb[i] = orbit.node_jacobians[i].b;
    ec[i] = orbit.node_jacobians[i].c;
    ed[i] = orbit.node_jacobians[i].d;
  }
  TrigSeries Sa = interpolate_periodic(ea, L), Sb = interpolate_periodic(eb, L);
  TrigSeries Sc = interpolate_periodic(ec, L), Sd = interpolate_periodic(ed, L);
  auto A = [&](double s) { return Mat2{Sa.eval(s), Sb.eval(s), Sc.eval(s), Sd.eval(s)}; };
  double amax = 0;
  for (int i = 0; i < N; ++i)
    amax = std::max({amax, std::fabs(ea[i]), std::fabs(eb[i]), std::fabs(ec[i]),
                     std::fabs(ed[i])});
  int nf = std::max(4096, static_cast<int>(100.0 * L * amax));
  double hstep = L / nf;
  Mat2 Q{1, 0, 0, 1};
  // two periods: the first aligns the frame with the invariant splitting (the
  // initial frame costs a constant log-offset), the second is reported
  double acc0 = 0, acc1 = 0;
  for (int k = 0; k < 2 * nf; ++k) {
    if (k == nf) acc0 = acc1 = 0;
    double s = wrap(k * hstep, L);
    // RK4 on V' = A(s) V applied to the orthonormal frame
    Mat2 k1 = mul(A(s), Q);
    Mat2 k2 = mul(A(s + 0.5 * hstep), add(Q, scale(0.5 * hstep, k1)));
    Mat2 k3 = mul(A(s + 0.5 * hstep), add(Q, scale(0.5 * hstep, k2)));
    Mat2 k4 = mul(A(s + hstep), add(Q, scale(hstep, k3)));
    Mat2 Z = add(Q, scale(hstep / 6.0, add(add(k1, scale(2, k2)), add(scale(2, k3), k4))));
    // QR by a Givens rotation; accumulate log |diag R|
    double r0 = std::hypot(Z.a, Z.c);
    double cth = Z.a / r0, sth = Z.c / r0;
    double r1 = -sth * Z.b + cth * Z.d;
    acc0 += std::log(r0);
    acc1 += std::log(std::fabs(r1));
    Q = Mat2{cth, -sth * (r1 < 0 ? -1.0 : 1.0), sth, cth * (r1 < 0 ? -1.0 : 1.0)};
  }
  double lp = std::max(acc0, acc1), lm = std::min(acc0, acc1);
  return {lp, lm};
}

// ---------------------------------------------------------------------------
// Confinement / isotopy certificate.
// ---------------------------------------------------------------------------

struct OrbitCertificate {
  bool confined = false;
  double sup_y = 0;
  double C_measured = 0;  // sup|y*| / (eps log(1/eps))
  double lambda_plus = 0;
  double lambda_minus = 0;
  double residual = 0;
  int s_winding = 1;
};

// The orbit is a graph over s winding once around the tube and stays inside
// |y| < 1/10; together these make it a section of the solid torus and hence
// isotopic to the core curve.
inline OrbitCertificate isotopy_certificate(const PeriodicOrbit& orbit) {
  for (double b : orbit.node_bs)
    if (!(b > 0)) throw Error(errc::not_a_graph, "transversality failed along the orbit");
  OrbitCertificate cert;
  cert.sup_y = orbit.sup_y;
  cert.confined = orbit.sup_y < 0.1;
  double eps = orbit.chart->eps();
  cert.C_measured = orbit.sup_y / (eps * std::log(1.0 / eps));
  cert.lambda_plus = orbit.lambda_plus;
  cert.lambda_minus = orbit.lambda_minus;
  cert.residual = orbit.residual;
  cert.s_winding = 1;
  return cert;
}

}  // namespace knotfield
