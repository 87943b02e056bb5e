#pragma once

#include <functional>
#include <vector>

#include "common.hpp"

namespace knotfield {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on the Legendre recurrence.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussRule(int n) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
      // Chebyshev-like initial guess
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussRule& order8() {
    static const GaussRule g(8);
    return g;
  }
  static const GaussRule& order16() {
    static const GaussRule g(16);
    return g;
  }
};

namespace detail {
inline double quad_norm(double v) { return std::fabs(v); }
inline double quad_norm(const Vec3& v) { return std::fabs(v.x) + std::fabs(v.y) + std::fabs(v.z); }
}  // namespace detail

// Fixed-order Gauss panel.
template <class F, class T = decltype(std::declval<F&>()(0.0))>
T gauss_panel(F&& f, double a, double b, const GaussRule& rule = GaussRule::order8()) {
  T acc{};
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

// Adaptive composite Gauss quadrature with dyadic panel splitting. Each panel
// is accepted when one panel and its two halves agree within the local error
// budget; otherwise it is split. The budget is distributed proportionally to
// panel width so refinement near an integrand peak does not starve the rest.
template <class F, class T = decltype(std::declval<F&>()(0.0))>
T adaptive_gauss(F&& f, double a, double b, double abs_tol, int max_depth = 28,
                 double* err_out = nullptr) {
  const GaussRule& rule = GaussRule::order8();
  struct Item {
    double a, b, tol;
    T whole;
    int depth;
  };
  std::vector<Item> stack;
  stack.push_back({a, b, abs_tol, gauss_panel(f, a, b, rule), 0});
  T total{};
  double err = 0.0;
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    double m = 0.5 * (it.a + it.b);
    T left = gauss_panel(f, it.a, m, rule);
    T right = gauss_panel(f, m, it.b, rule);
    double diff = detail::quad_norm(left + right - it.whole);
    // the roundoff floor keeps deep panels from demanding sub-machine accuracy
    double floor = 1e-14 * (detail::quad_norm(left) + detail::quad_norm(right));
    if (diff <= std::max(it.tol, floor) || it.depth >= max_depth) {
      total += left + right;
      err += diff;
    } else {
      stack.push_back({it.a, m, 0.5 * it.tol, left, it.depth + 1});
      stack.push_back({m, it.b, 0.5 * it.tol, right, it.depth + 1});
    }
  }
  if (err_out) *err_out = err;
  // global verdict: the summed panel defects must stay within the budget
  if (err > 2.0 * abs_tol)
    throw Error(errc::quadrature_not_converged,
                "accumulated defect " + fmt_double(err) + " over budget " + fmt_double(abs_tol));
  return total;
}

// Composite fixed-panel Gauss rule (m panels, order-g points each).
template <class F, class T = decltype(std::declval<F&>()(0.0))>
T composite_gauss(F&& f, double a, double b, int panels, const GaussRule& rule) {
  T acc{};
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) acc += gauss_panel(f, a + p * h, a + (p + 1) * h, rule);
  return acc;
}

}  // namespace knotfield
