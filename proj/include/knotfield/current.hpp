#pragma once

#include <memory>

#include "ode.hpp"
#include "tube.hpp"

namespace knotfield {

// Divergence-free tangent current on the tube surface:
//   J = [F(theta) d/ds + (G(s)/eps) d/dtheta] / (1 - eps kappa(s) cos theta),
// for 2pi-periodic F and length-periodic positive G.
class SurfaceCurrent {
 public:
  SurfaceCurrent() = default;
  SurfaceCurrent(TubeChart chart, TrigSeries F, TrigSeries G)
      : chart_(std::move(chart)), F_(std::move(F)), G_(std::move(G)) {
    double L = chart_.core().length();
    if (std::fabs(G_.period() - L) > 1e-9 * L)
      throw Error(errc::validation_failed, "G period must equal the core length");
    for (int i = 0; i < 512; ++i)
      if (G_.eval(i * L / 512) <= 0)
        throw Error(errc::validation_failed, "G vanishes: current family requires G > 0");
    // kappa as a function of arc length, fitted once for the orbit ODEs
    int n = 1024;
    std::vector<double> ks(n);
    for (int i = 0; i < n; ++i) ks[i] = chart_.core().frenet(i * L / n).kappa;
    kappa_s_ = TrigSeries::fit(ks, 64, L);
  }

  const TubeChart& chart() const { return chart_; }
  const TrigSeries& F() const { return F_; }
  const TrigSeries& G() const { return G_; }
  double eps() const { return chart_.eps(); }
  double core_length() const { return chart_.core().length(); }
  double kappa_of_s(double s) const { return kappa_s_.eval(s); }

  double fourier_a(int n) const {
    return n < static_cast<int>(F_.cos_coeffs().size()) ? F_.cos_coeffs()[n] : 0.0;
  }
  double fourier_b(int n) const {
    return n < static_cast<int>(F_.sin_coeffs().size()) ? F_.sin_coeffs()[n] : 0.0;
  }

  // The construction produces a hyperbolic magnetic line iff the first
  // Fourier mode of F vanishes and the second does not.
  bool hyperbolic_candidate() const {
    return fourier_a(1) == 0.0 && fourier_b(1) == 0.0 &&
           (fourier_a(2) != 0.0 || fourier_b(2) != 0.0);
  }

  // Components of J in the coordinate basis (d/ds, d/dtheta). Uses the exact
  // curvature so that the metric factor cancels against the surface measure.
  std::pair<double, double> j_eval(double s, double theta) const {
    double A = chart_.surface_density(s, theta);
    return {F_.eval(theta) / A, G_.eval(s) / (eps() * A)};
  }

 private:
  TubeChart chart_;
  TrigSeries F_, G_;
  TrigSeries kappa_s_;
};

// F = 2 cos 2theta, G = 1: the concrete current used throughout the synthesis
// pipeline (first Fourier mode absent, second mode present).
inline SurfaceCurrent make_cos2_current(TubeChart chart) {
  double L = chart.core().length();
  TrigSeries F({0, 0, 2.0}, {0, 0, 0});
  TrigSeries G = TrigSeries::constant(1.0, L);
  return SurfaceCurrent(std::move(chart), std::move(F), std::move(G));
}

// Surface divergence (1/A)[d_s(A Js) + d_theta(A Jth)] of arbitrary tangent
// components, evaluated by central differences. Exposed generically so that
// non-divergence-free controls can be probed with the same formula.
template <class Fs, class Fth>
double surface_divergence_fd(const TubeChart& chart, Fs&& Js, Fth&& Jth, double s, double theta,
                             double h = 1e-5) {
  auto A = [&](double ss, double th) { return chart.surface_density(ss, th); };
  double ds = (A(s + h, theta) * Js(s + h, theta) - A(s - h, theta) * Js(s - h, theta)) / (2 * h);
  double dth =
      (A(s, theta + h) * Jth(s, theta + h) - A(s, theta - h) * Jth(s, theta - h)) / (2 * h);
  return (ds + dth) / A(s, theta);
}

inline double surface_divergence(const SurfaceCurrent& sc, double s, double theta) {
  return surface_divergence_fd(
      sc.chart(), [&](double ss, double th) { return sc.j_eval(ss, th).first; },
      [&](double ss, double th) { return sc.j_eval(ss, th).second; }, s, theta, 1e-4);
}

// Parametrization choice for integral curves: the current J itself, or the
// un-divided field A*J whose (s, theta) flow has the simple closed form.
enum class CurveParam { by_j, by_j0 };

// Position along the integral curve through (s0, theta0) after time t.
inline std::pair<double, double> integral_curve(const SurfaceCurrent& sc, double s0, double theta0,
                                                double t, CurveParam param = CurveParam::by_j) {
  double eps = sc.eps();
  Dopri5<2> ode;
  ode.rtol = 1e-11;
  ode.atol = 1e-13;
  auto rhs = [&](double, const std::array<double, 2>& y) {
    double s = y[0], th = y[1];
    double denom = 1.0;
    if (param == CurveParam::by_j) denom = 1.0 - eps * sc.kappa_of_s(s) * std::cos(th);
    return std::array<double, 2>{sc.F().eval(th) / denom, sc.G().eval(s) / (eps * denom)};
  };
  if (t == 0) return {s0, theta0};
  if (t < 0) {
    auto neg = [&](double tt, const std::array<double, 2>& y) {
      auto v = rhs(tt, y);
      return std::array<double, 2>{-v[0], -v[1]};
    };
    auto y = ode.integrate(neg, {s0, theta0}, 0.0, -t);
    return {y[0], y[1]};
  }
  auto y = ode.integrate(rhs, {s0, theta0}, 0.0, t);
  return {y[0], y[1]};
}

namespace detail {
// One full meridian loop of the orbit through (s0, theta=0), marched in theta
// (dtheta/dt > 0 throughout). Returns the landing s and the elapsed J-time.
inline std::pair<double, double> orbit_loop(const SurfaceCurrent& sc, double s0,
                                            double theta_end = two_pi) {
  double eps = sc.eps();
  Dopri5<2> ode;
  ode.rtol = 1e-12;
  ode.atol = 1e-14;
  auto rhs = [&](double th, const std::array<double, 2>& y) {
    double g = sc.G().eval(y[0]);
    double A = 1.0 - eps * sc.kappa_of_s(y[0]) * std::cos(th);
    return std::array<double, 2>{eps * sc.F().eval(th) / g, eps * A / g};
  };
  auto y = ode.integrate(rhs, {s0, 0.0}, 0.0, theta_end);
  return {y[0], y[1]};
}
}  // namespace detail

// Section coordinates built on C = {theta = 0}. alpha = s/L labels orbits; the
// isochronized flow moves every orbit once around in unit sigma-time. T, B and
// the sampling density are tabulated on a uniform alpha grid.
class IsoChart {
 public:
  IsoChart() = default;

  IsoChart(SurfaceCurrent sc, int grid_n = 256, double fd_step = 1e-5,
           double closure_tol = 1e-7)
      : sc_(std::move(sc)), grid_n_(grid_n) {
    double L = sc_.core_length();
    T_tab_.resize(grid_n_);
    B_tab_.resize(grid_n_);
    closure_defect_ = 0;
    for (int i = 0; i < grid_n_; ++i) {
      double a = static_cast<double>(i) / grid_n_;
      auto [s_end, T] = detail::orbit_loop(sc_, a * L);
      double defect = circ_dist(s_end, a * L, L);
      closure_defect_ = std::max(closure_defect_, defect);
      if (defect > closure_tol * std::max(1.0, L))
        throw Error(errc::not_periodic, "orbit through alpha=" + fmt_double(a) +
                                            " fails to close: gap " + fmt_double(defect));
      T_tab_[i] = T;
    }
    T_interp_ = interpolate_periodic(T_tab_, 1.0);
    // Area density of the pushed-forward surface measure, by finite
    // differences of the inverse chart at a generic sigma.
    double sigma0 = 0.4;
    for (int i = 0; i < grid_n_; ++i) {
      double a = static_cast<double>(i) / grid_n_;
      auto pp = psi_inverse_raw(a + fd_step, sigma0);
      auto pm = psi_inverse_raw(a - fd_step, sigma0);
      auto qp = psi_inverse_raw(a, sigma0 + fd_step);
      auto qm = psi_inverse_raw(a, sigma0 - fd_step);
      double ds_da = circ_signed(pp.first - pm.first, L) / (2 * fd_step);
      double dth_da = circ_signed(pp.second - pm.second, two_pi) / (2 * fd_step);
      double ds_dsig = circ_signed(qp.first - qm.first, L) / (2 * fd_step);
      double dth_dsig = circ_signed(qp.second - qm.second, two_pi) / (2 * fd_step);
      double det = ds_da * dth_dsig - ds_dsig * dth_da;
      auto p0 = psi_inverse_raw(a, sigma0);
      double A = sc_.chart().surface_density(p0.first, p0.second);
      B_tab_[i] = sc_.eps() * A * std::fabs(det);
      if (B_tab_[i] <= 0)
        throw Error(errc::validation_failed, "non-positive area density at alpha=" + fmt_double(a));
    }
    B_interp_ = interpolate_periodic(B_tab_, 1.0);
    // c0 normalizes rho = B/(c0 T) to a probability density.
    double acc = 0;
    for (int i = 0; i < grid_n_; ++i) acc += B_tab_[i] / T_tab_[i];
    c0_ = acc / grid_n_;
    // cumulative distribution of rho on a fine grid
    int fine = 8192;
    cdf_.assign(fine + 1, 0.0);
    double prev = rho(0.0);
    for (int j = 1; j <= fine; ++j) {
      double cur = rho(static_cast<double>(j) / fine);
      cdf_[j] = cdf_[j - 1] + 0.5 * (prev + cur) / fine;
      prev = cur;
    }
    double total = cdf_[fine];
    for (double& v : cdf_) v /= total;
  }

  const SurfaceCurrent& current() const { return sc_; }
  int grid_size() const { return grid_n_; }
  double c0() const { return c0_; }
  double closure_defect() const { return closure_defect_; }

  double T(double alpha) const { return T_interp_.eval(alpha); }
  double Ttilde(double alpha) const { return T_interp_.eval(alpha); }
  double Bdens(double alpha) const { return B_interp_.eval(alpha); }
  double rho(double alpha) const { return Bdens(alpha) / (c0_ * T(alpha)); }

  double cdf_rho(double alpha) const {
    double aw = std::clamp(alpha, 0.0, 1.0);
    double x = aw * (cdf_.size() - 1);
    int i = std::min<int>(static_cast<int>(x), cdf_.size() - 2);
    double f = x - i;
    return cdf_[i] * (1 - f) + cdf_[i + 1] * f;
  }

  double inv_cdf(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    int lo = 0, hi = static_cast<int>(cdf_.size()) - 1;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (cdf_[mid] <= u ? lo : hi) = mid;
    }
    double span = cdf_[hi] - cdf_[lo];
    double f = span > 0 ? (u - cdf_[lo]) / span : 0.0;
    return (lo + f) / (cdf_.size() - 1);
  }

  // Chart map Psi^{-1}(alpha, sigma): flow the isochronized field from the
  // section point of orbit alpha for sigma in [0,1).
  std::pair<double, double> psi_inverse(double alpha, double sigma) const {
    return psi_inverse_raw(alpha, sigma);
  }

  // Forward chart map: orbit label and normalized flow time of (s, theta).
  std::pair<double, double> psi_forward(double s, double theta) const {
    double L = sc_.core_length();
    double thw = wrap(theta, two_pi);
    if (thw < 1e-14) return {wrap(s, L) / L, 0.0};
    // march theta backwards to the section, tracking elapsed J-time
    double eps = sc_.eps();
    Dopri5<2> ode;
    ode.rtol = 1e-12;
    ode.atol = 1e-14;
    auto rhs = [&](double th, const std::array<double, 2>& y) {
      double g = sc_.G().eval(y[0]);
      double A = 1.0 - eps * sc_.kappa_of_s(y[0]) * std::cos(thw - th);
      return std::array<double, 2>{-eps * sc_.F().eval(thw - th) / g, eps * A / g};
    };
    auto y = ode.integrate(rhs, {wrap(s, L), 0.0}, 0.0, thw);
    double alpha = wrap(y[0], L) / L;
    double sigma = y[1] / T_interp_.eval(alpha);
    return {alpha, sigma};
  }

 private:
  static double circ_signed(double d, double p) {
    double r = std::remainder(d, p);
    return r;
  }

  std::pair<double, double> psi_inverse_raw(double alpha, double sigma) const {
    double L = sc_.core_length();
    double s0 = wrap(alpha, 1.0) * L;
    double Ta = period_of(alpha);
    double t_target = wrap(sigma, 1.0) * Ta;
    if (t_target <= 0) return {s0, 0.0};
    auto [s, th] = integral_curve(sc_, s0, 0.0, t_target, CurveParam::by_j);
    return {wrap(s, L), wrap(th, two_pi)};
  }

  double period_of(double alpha) const {
    if (!T_tab_.empty() && static_cast<int>(T_tab_.size()) == grid_n_ && T_interp_.order() > 0)
      return T_interp_.eval(alpha);
    // during construction: integrate directly
    return detail::orbit_loop(sc_, wrap(alpha, 1.0) * sc_.core_length()).second;
  }

  SurfaceCurrent sc_;
  int grid_n_ = 0;
  std::vector<double> T_tab_, B_tab_;
  TrigSeries T_interp_, B_interp_;
  double c0_ = 0;
  double closure_defect_ = 0;
  std::vector<double> cdf_;
};

// Van der Corput radical-inverse sequence in base 2 (k = 1, 2, ...).
inline double van_der_corput(unsigned k) {
  double v = 0, f = 0.5;
  while (k) {
    if (k & 1u) v += f;
    f *= 0.5;
    k >>= 1;
  }
  return v;
}

// n distinct orbit labels equidistributed for the sampling measure, produced
// by pushing the low-discrepancy sequence through the inverse CDF.
inline std::vector<double> sample_alphas(const IsoChart& ic, int n) {
  if (n < 1) throw Error(errc::usage, "need n >= 1 sample points");
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = ic.inv_cdf(van_der_corput(k + 1));
  return out;
}

}  // namespace knotfield
