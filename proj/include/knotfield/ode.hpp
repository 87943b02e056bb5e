#pragma once

#include <array>
#include <functional>

#include "common.hpp"

namespace knotfield {

// Dormand-Prince 5(4) with step-doubling control. State is a fixed-size array;
// the per-step observer (if any) sees accepted steps only.
template <int N>
struct Dopri5 {
  using State = std::array<double, N>;
  using Rhs = std::function<State(double, const State&)>;

  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;
  double max_h = 0.0;  // 0 = unbounded
  long max_steps = 2000000;

  static State axpy(double a, const State& x, const State& y) {
    State r;
    for (int i = 0; i < N; ++i) r[i] = a * x[i] + y[i];
    return r;
  }

  // Integrate from t0 to t1 (t1 > t0). Throws StepUnderflow / OdeTolerance.
  State integrate(const Rhs& f, State y, double t0, double t1,
                  const std::function<void(double, const State&)>& observer = nullptr) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double span = t1 - t0;
    if (span <= 0) {
      if (observer) observer(t0, y);
      return y;
    }
    double t = t0;
    double h = h_init > 0 ? h_init : span / 100;
    h = std::min(h, span);
    State k1 = f(t, y);
    if (observer) observer(t, y);
    for (long step = 0; step < max_steps; ++step) {
      if (t >= t1 - 1e-14 * span) return y;
      h = std::min(h, t1 - t);
      if (max_h > 0) h = std::min(h, max_h);
      if (h < 1e-14 * span)
        throw Error(errc::step_underflow, "ODE step underflow at t=" + fmt_double(t));
      State y2, y3, y4, y5, y6, y7;
      for (int i = 0; i < N; ++i) y2[i] = y[i] + h * a21 * k1[i];
      State k2 = f(t + c2 * h, y2);
      for (int i = 0; i < N; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      State k3 = f(t + c3 * h, y3);
      for (int i = 0; i < N; ++i) y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      State k4 = f(t + c4 * h, y4);
      for (int i = 0; i < N; ++i)
        y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      State k5 = f(t + c5 * h, y5);
      for (int i = 0; i < N; ++i)
        y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      State k6 = f(t + h, y6);
      for (int i = 0; i < N; ++i)
        y7[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      State k7 = f(t + h, y7);
      double errn = 0;
      for (int i = 0; i < N; ++i) {
        double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * k7[i]);
        double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(y7[i]));
        errn += (e / sc) * (e / sc);
      }
      errn = std::sqrt(errn / N);
      if (errn <= 1.0) {
        t += h;
        y = y7;
        k1 = k7;  // FSAL
        if (observer) observer(t, y);
      }
      double fac = 0.9 * std::pow(std::max(errn, 1e-10), -0.2);
      h *= std::clamp(fac, 0.2, 5.0);
    }
    throw Error(errc::ode_tolerance, "ODE step budget exhausted");
  }
};

}  // namespace knotfield
