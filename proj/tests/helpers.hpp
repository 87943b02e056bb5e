#pragma once

// Shared test utilities: finite-difference stencils used as independent
// oracles, a fixed-seed RNG, and random rigid motions.

#include <random>

#include "knotfield/curve.hpp"

namespace kftest {

using knotfield::ClosedCurve;
using knotfield::Vec3;

inline std::mt19937& rng() {
  static std::mt19937 gen(20240817);
  return gen;
}

inline double urand(double a, double b) {
  std::uniform_real_distribution<double> d(a, b);
  return d(rng());
}

// 4th-order central differences of gamma(s) by arc length.
inline Vec3 fd_d1(const ClosedCurve& c, double s, double h) {
  return (1.0 / (12 * h)) *
         (-c.eval(s + 2 * h) + 8.0 * c.eval(s + h) - 8.0 * c.eval(s - h) + c.eval(s - 2 * h));
}

inline Vec3 fd_d2(const ClosedCurve& c, double s, double h) {
  return (1.0 / (12 * h * h)) *
         (-c.eval(s + 2 * h) + 16.0 * c.eval(s + h) - 30.0 * c.eval(s) + 16.0 * c.eval(s - h) -
          c.eval(s - 2 * h));
}

inline Vec3 fd_d3(const ClosedCurve& c, double s, double h) {
  return (1.0 / (8 * h * h * h)) *
         (c.eval(s - 3 * h) - 8.0 * c.eval(s - 2 * h) + 13.0 * c.eval(s - h) -
          13.0 * c.eval(s + h) + 8.0 * c.eval(s + 2 * h) - c.eval(s + 3 * h));
}

inline knotfield::Mat3 random_rotation() {
  // rotation from three random Euler-style angles
  double a = urand(0, knotfield::two_pi), b = urand(0, knotfield::two_pi),
         g = urand(0, knotfield::two_pi);
  double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b),
         cg = std::cos(g), sg = std::sin(g);
  knotfield::Mat3 R;
  R(0, 0) = ca * cb;
  R(0, 1) = ca * sb * sg - sa * cg;
  R(0, 2) = ca * sb * cg + sa * sg;
  R(1, 0) = sa * cb;
  R(1, 1) = sa * sb * sg + ca * cg;
  R(1, 2) = sa * sb * cg - ca * sg;
  R(2, 0) = -sb;
  R(2, 1) = cb * sg;
  R(2, 2) = cb * cg;
  return R;
}

// Wobbly planar convex-ish curve (inflection-free unknot that is not a circle).
inline ClosedCurve wobbly_planar(double amp = 0.05, int lobes = 3) {
  std::vector<Vec3> pts(512);
  for (int i = 0; i < 512; ++i) {
    double u = i * knotfield::two_pi / 512;
    double r = 1.0 + amp * std::cos(lobes * u);
    pts[i] = {r * std::cos(u), r * std::sin(u), 0.0};
  }
  return ClosedCurve::fit_from_samples(pts, lobes + 2);
}

// Non-planar unknot used where a generic curve with torsion is needed.
inline ClosedCurve wavy_unknot() {
  std::vector<Vec3> pts(512);
  for (int i = 0; i < 512; ++i) {
    double u = i * knotfield::two_pi / 512;
    pts[i] = {std::cos(u), std::sin(u), 0.15 * std::sin(2 * u)};
  }
  return ClosedCurve::fit_from_samples(pts, 4);
}

}  // namespace kftest
