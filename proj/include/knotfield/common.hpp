#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace knotfield {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// ---------------------------------------------------------------------------
// Error reporting. Every failure mode carries a code so callers (and the CLI
// exit-code mapping) can tell validation problems from numerical ones.
// ---------------------------------------------------------------------------

enum class errc {
  validation_failed,
  inflection_point,
  quadrature_not_converged,
  not_near_integer,
  curves_too_close,
  out_of_disk,
  outside_tube,
  ambiguous_projection,
  ode_tolerance,
  not_periodic,
  too_close_to_wire,
  too_close_to_surface,
  newton_diverged,
  transversality_lost,
  not_a_graph,
  no_return,
  left_domain,
  step_underflow,
  connector_collision,
  orientation_conflict,
  radius_too_large,
  self_intersection,
  no_generic_direction,
  degenerate_diagram,
  usage,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::validation_failed: return "ValidationFailed";
    case errc::inflection_point: return "InflectionPoint";
    case errc::quadrature_not_converged: return "QuadratureNotConverged";
    case errc::not_near_integer: return "NotNearInteger";
    case errc::curves_too_close: return "CurvesTooClose";
    case errc::out_of_disk: return "OutOfDisk";
    case errc::outside_tube: return "OutsideTube";
    case errc::ambiguous_projection: return "AmbiguousProjection";
    case errc::ode_tolerance: return "OdeTolerance";
    case errc::not_periodic: return "NotPeriodic";
    case errc::too_close_to_wire: return "TooCloseToWire";
    case errc::too_close_to_surface: return "TooCloseToSurface";
    case errc::newton_diverged: return "NewtonDiverged";
    case errc::transversality_lost: return "TransversalityLost";
    case errc::not_a_graph: return "NotAGraph";
    case errc::no_return: return "NoReturn";
    case errc::left_domain: return "LeftDomain";
    case errc::step_underflow: return "StepUnderflow";
    case errc::connector_collision: return "ConnectorCollision";
    case errc::orientation_conflict: return "OrientationConflict";
    case errc::radius_too_large: return "RadiusTooLarge";
    case errc::self_intersection: return "SelfIntersection";
    case errc::no_generic_direction: return "NoGenericDirection";
    case errc::degenerate_diagram: return "DegenerateDiagram";
    case errc::usage: return "Usage";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

// ---------------------------------------------------------------------------
// Small fixed-size vector type. Field kernels are the hot path, so this stays
// a plain aggregate with inline arithmetic.
// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double a, Vec3 v) { return v *= a; }
inline Vec3 operator*(Vec3 v, double a) { return v *= a; }
inline Vec3 operator/(Vec3 v, double a) { return v *= (1.0 / a); }
inline Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return n > 0 ? v / n : Vec3{};
}
inline double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }

struct Mat3 {
  // row-major
  std::array<double, 9> m{};
  double& operator()(int i, int j) { return m[3 * i + j]; }
  double operator()(int i, int j) const { return m[3 * i + j]; }
  double trace() const { return m[0] + m[4] + m[8]; }
};

inline Vec3 mul(const Mat3& A, const Vec3& v) {
  return {A(0, 0) * v.x + A(0, 1) * v.y + A(0, 2) * v.z,
          A(1, 0) * v.x + A(1, 1) * v.y + A(1, 2) * v.z,
          A(2, 0) * v.x + A(2, 1) * v.y + A(2, 2) * v.z};
}

// Solve A x = b for a 3x3 system by partial-pivot elimination.
inline Vec3 solve3(Mat3 A, Vec3 b) {
  double* M = A.m.data();
  double rhs[3] = {b.x, b.y, b.z};
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(M[3 * perm[r] + col]) > std::fabs(M[3 * perm[piv] + col])) piv = r;
    std::swap(perm[col], perm[piv]);
    double d = M[3 * perm[col] + col];
    if (d == 0.0) throw Error(errc::validation_failed, "singular 3x3 system");
    for (int r = col + 1; r < 3; ++r) {
      double f = M[3 * perm[r] + col] / d;
      for (int c = col; c < 3; ++c) M[3 * perm[r] + c] -= f * M[3 * perm[col] + c];
      rhs[perm[r]] -= f * rhs[perm[col]];
    }
  }
  double sol[3];
  for (int row = 2; row >= 0; --row) {
    double acc = rhs[perm[row]];
    for (int c = row + 1; c < 3; ++c) acc -= M[3 * perm[row] + c] * sol[c];
    sol[row] = acc / M[3 * perm[row] + row];
  }
  return {sol[0], sol[1], sol[2]};
}

// Wrap x into [0, p).
inline double wrap(double x, double p) {
  double r = std::fmod(x, p);
  return r < 0 ? r + p : r;
}

// Circular distance on R/pZ.
inline double circ_dist(double a, double b, double p) {
  double d = std::fabs(wrap(a - b, p));
  return std::min(d, p - d);
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace knotfield
