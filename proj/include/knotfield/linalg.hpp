#pragma once

#include <vector>

#include "common.hpp"

namespace knotfield {

// Dense LU solve with partial pivoting (collocation systems are a few hundred
// unknowns at most).
inline std::vector<double> lu_solve(std::vector<double> A, std::vector<double> b) {
  int n = static_cast<int>(b.size());
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int p = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[piv[r] * n + col]) > std::fabs(A[piv[p] * n + col])) p = r;
    std::swap(piv[col], piv[p]);
    double d = A[piv[col] * n + col];
    if (std::fabs(d) < 1e-300) throw Error(errc::newton_diverged, "singular collocation system");
    for (int r = col + 1; r < n; ++r) {
      double f = A[piv[r] * n + col] / d;
      if (f == 0.0) continue;
      A[piv[r] * n + col] = f;
      for (int c = col + 1; c < n; ++c) A[piv[r] * n + c] -= f * A[piv[col] * n + c];
      b[piv[r]] -= f * b[piv[col]];
    }
  }
  std::vector<double> x(n);
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[piv[row]];
    for (int c = row + 1; c < n; ++c) acc -= A[piv[row] * n + c] * x[c];
    x[row] = acc / A[piv[row] * n + row];
  }
  return x;
}

struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;  // [[a,b],[c,d]]
  double trace() const { return a + d; }
};

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

inline Mat2 add(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
inline Mat2 scale(double f, const Mat2& x) { return {f * x.a, f * x.b, f * x.c, f * x.d}; }

}  // namespace knotfield
