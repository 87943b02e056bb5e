#pragma once

#include <vector>

#include "common.hpp"

namespace knotfield {

// Real trigonometric polynomial of one periodic variable,
//   f(x) = a[0] + sum_{k=1..M} a[k] cos(k w x) + b[k] sin(k w x),  w = 2*pi/period.
// Closed and C-infinity by construction; derivatives are exact.
class TrigSeries {
 public:
  TrigSeries() : period_(two_pi) {}
  TrigSeries(std::vector<double> a, std::vector<double> b, double period = two_pi)
      : a_(std::move(a)), b_(std::move(b)), period_(period) {
    if (b_.size() < a_.size()) b_.resize(a_.size(), 0.0);
    if (a_.size() < b_.size()) a_.resize(b_.size(), 0.0);
    if (a_.empty()) a_ = b_ = {0.0};
  }

  static TrigSeries constant(double c, double period = two_pi) {
    return TrigSeries({c}, {0.0}, period);
  }

  // Least-squares/DFT fit through N uniform samples over one period.
  // Exact when the sampled function is a trig polynomial of order < N/2.
  static TrigSeries fit(const std::vector<double>& samples, int order, double period = two_pi) {
    int n = static_cast<int>(samples.size());
    std::vector<double> a(order + 1, 0.0), b(order + 1, 0.0);
    for (int j = 0; j < n; ++j) a[0] += samples[j];
    a[0] /= n;
    for (int k = 1; k <= order; ++k) {
      double ca = 0, cb = 0;
      for (int j = 0; j < n; ++j) {
        double ph = two_pi * k * j / n;
        ca += samples[j] * std::cos(ph);
        cb += samples[j] * std::sin(ph);
      }
      a[k] = 2.0 * ca / n;
      b[k] = 2.0 * cb / n;
    }
    return TrigSeries(std::move(a), std::move(b), period);
  }

  int order() const { return static_cast<int>(a_.size()) - 1; }
  double period() const { return period_; }
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }

  double eval(double x) const { return eval_deriv(x, 0); }

  // d-th derivative (d in 0..3 used throughout).
  double eval_deriv(double x, int d) const {
    double w = two_pi / period_;
    double ph0 = w * x;
    double c0 = std::cos(ph0), s0 = std::sin(ph0);
    // incremental rotation through harmonics
    double ck = 1.0, sk = 0.0;
    double acc = (d == 0) ? a_[0] : 0.0;
    for (int k = 1; k < static_cast<int>(a_.size()); ++k) {
      double cn = ck * c0 - sk * s0;
      double sn = sk * c0 + ck * s0;
      ck = cn;
      sk = sn;
      double kw = k * w, f = 1.0;
      for (int j = 0; j < d; ++j) f *= kw;
      // repeated derivative cycles cos->-sin->-cos->sin
      double ca, sa;
      switch (d & 3) {
        case 0: ca = ck; sa = sk; break;
        case 1: ca = -sk; sa = ck; break;
        case 2: ca = -ck; sa = -sk; break;
        default: ca = sk; sa = -ck; break;
      }
      acc += f * (a_[k] * ca + b_[k] * sa);
    }
    return acc;
  }

  // Mean value over the period.
  double mean() const { return a_[0]; }

  // Series for f(-x) (parameter reversal).
  TrigSeries reversed() const {
    TrigSeries r = *this;
    for (double& v : r.b_) v = -v;
    return r;
  }

  TrigSeries scaled(double factor) const {
    TrigSeries r = *this;
    for (double& v : r.a_) v *= factor;
    for (double& v : r.b_) v *= factor;
    return r;
  }

 private:
  std::vector<double> a_, b_;
  double period_;
};

// Periodic interpolation of uniformly tabulated data: a thin wrapper that fits
// a full-order series once and evaluates it anywhere.
inline TrigSeries interpolate_periodic(const std::vector<double>& values, double period) {
  int n = static_cast<int>(values.size());
  int order = (n - 1) / 2;
  return TrigSeries::fit(values, order, period);
}

}  // namespace knotfield
