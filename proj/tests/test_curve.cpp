#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "knotfield/curve.hpp"

using namespace knotfield;
using kftest::fd_d1;
using kftest::fd_d2;
using kftest::fd_d3;

namespace {

// Independent brute-force Gauss self-integral (midpoint rule, dense grid).
double writhe_bruteforce(const ClosedCurve& c, int m) {
  double h = two_pi / m;
  double acc = 0;
  std::vector<Vec3> p(m), d(m);
  for (int i = 0; i < m; ++i) {
    p[i] = c.eval_u((i + 0.5) * h);
    d[i] = c.deriv_u((i + 0.5) * h, 1);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      Vec3 r = p[i] - p[j];
      double r2 = norm2(r);
      acc += dot(cross(d[i], d[j]), r) / (r2 * std::sqrt(r2));
    }
  return acc * h * h / (4 * pi);
}

// Independent signed-crossing count between two closed polylines projected
// along direction dir; the linking number is half the signed crossing total,
// where each crossing carries sign(det[t_over, t_under]).
long long linking_by_crossings(const Polyline& A, const Polyline& B, Vec3 dir) {
  dir = normalized(dir);
  Vec3 e1 = normalized(cross(dir, std::fabs(dir.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
  Vec3 e2 = cross(dir, e1);
  auto proj = [&](const Vec3& v) { return std::pair<double, double>(dot(v, e1), dot(v, e2)); };
  double total = 0;
  for (size_t i = 0; i < A.segment_count(); ++i) {
    auto [ax1, ay1] = proj(A.segment_a(i));
    auto [ax2, ay2] = proj(A.segment_b(i));
    for (size_t j = 0; j < B.segment_count(); ++j) {
      auto [bx1, by1] = proj(B.segment_a(j));
      auto [bx2, by2] = proj(B.segment_b(j));
      double rx = ax2 - ax1, ry = ay2 - ay1, sx = bx2 - bx1, sy = by2 - by1;
      double den = rx * sy - ry * sx;
      if (std::fabs(den) < 1e-15) continue;
      double t = ((bx1 - ax1) * sy - (by1 - ay1) * sx) / den;
      double u = ((bx1 - ax1) * ry - (by1 - ay1) * rx) / den;
      if (t <= 0 || t > 1 || u <= 0 || u > 1) continue;
      double za = dot(A.segment_a(i) + t * (A.segment_b(i) - A.segment_a(i)), dir);
      double zb = dot(B.segment_a(j) + u * (B.segment_b(j) - B.segment_a(j)), dir);
      // det[t_over, t_under]; swapping the roles flips the determinant sign
      double cr = rx * sy - ry * sx;
      total += (za > zb) ? (cr > 0 ? 1.0 : -1.0) : (cr > 0 ? -1.0 : 1.0);
    }
  }
  return std::llround(total / 2.0);
}

}  // namespace

TEST_CASE("circle evaluation at arc length", "[curve]") {
  ClosedCurve c = make_circle(1.0);
  Vec3 p0 = c.eval(0.0);
  CHECK(dist(p0, {1, 0, 0}) < 1e-12);
  Vec3 ppi = c.eval(pi);
  CHECK(dist(ppi, {-1, 0, 0}) < 1e-10);
  CHECK(c.length() == Catch::Approx(two_pi).epsilon(1e-10));
}

TEST_CASE("torus knot is unit-speed in arc length", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  double h = 1e-4;
  for (double s : {0.0, 1.3, 5.7, c.length() * 0.93}) {
    Vec3 d1 = fd_d1(c, s, h);
    CHECK(std::fabs(norm(d1) - 1.0) < 1e-8);
  }
}

TEST_CASE("unit speed property at many samples", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    double s = kftest::urand(0, c.length());
    Vec3 t = c.tangent(s);
    Vec3 d1 = fd_d1(c, s, 1e-4);
    worst = std::max(worst, norm(d1 - t));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("frenet frame of a circle", "[curve]") {
  ClosedCurve c = make_circle(2.0);
  FrenetFrame f = c.frenet(1.0);
  CHECK(f.kappa == Catch::Approx(0.5).margin(1e-10));
  CHECK(std::fabs(f.tau) < 1e-10);
  // N points to the center
  Vec3 p = c.eval(1.0);
  CHECK(dist(f.N, normalized(-1.0 * p)) < 1e-9);
}

TEST_CASE("planar ellipse has zero torsion", "[curve]") {
  ClosedCurve c = make_ellipse(2.0, 1.0);
  for (double s = 0; s < c.length(); s += c.length() / 17)
    CHECK(std::fabs(c.frenet(s).tau) < 1e-10);
}

TEST_CASE("frenet curvature and torsion match finite differences", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  double h = 0.02;
  for (double s : {0.0, 2.0, 7.9}) {
    Vec3 d1 = fd_d1(c, s, h), d2 = fd_d2(c, s, h), d3 = fd_d3(c, s, h);
    Vec3 cr = cross(d1, d2);
    double kappa_fd = norm(cr);
    double tau_fd = dot(cr, d3) / norm2(cr);
    FrenetFrame f = c.frenet(s);
    CHECK(std::fabs(f.kappa - kappa_fd) < 1e-6);
    CHECK(std::fabs(f.tau - tau_fd) < 1e-6);
  }
}

TEST_CASE("frame orthonormality and frenet equations", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  double h = 1e-4;
  double worst_ode = 0;
  for (int i = 0; i < 200; ++i) {
    double s = kftest::urand(0, c.length());
    FrenetFrame f = c.frenet(s);
    CHECK(std::fabs(norm(f.T) - 1) < 1e-10);
    CHECK(std::fabs(norm(f.N) - 1) < 1e-10);
    CHECK(std::fabs(norm(f.B) - 1) < 1e-10);
    CHECK(std::fabs(dot(f.T, f.N)) < 1e-10);
    CHECK(std::fabs(dot(f.T, f.B)) < 1e-10);
    CHECK(std::fabs(dot(f.N, f.B)) < 1e-10);
    CHECK(dot(cross(f.T, f.N), f.B) == Catch::Approx(1.0).margin(1e-10));
    FrenetFrame fp = c.frenet(s + h), fm = c.frenet(s - h);
    Vec3 dT = (fp.T - fm.T) / (2 * h);
    Vec3 dN = (fp.N - fm.N) / (2 * h);
    Vec3 dB = (fp.B - fm.B) / (2 * h);
    worst_ode = std::max({worst_ode, norm(dT - f.kappa * f.N),
                          norm(dN - (-f.kappa * f.T + f.tau * f.B)), norm(dB + f.tau * f.N)});
  }
  CHECK(worst_ode < 1e-5);
}

TEST_CASE("writhe of planar circle vanishes", "[curve]") {
  CHECK(std::fabs(writhe(make_circle(1.0), 8)) < 1e-8);
}

TEST_CASE("writhe is odd under reflection", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  double w = writhe(c, 16);
  double wm = writhe(c.mirrored(), 16);
  CHECK(std::fabs(w + wm) < 1e-8);
}

TEST_CASE("writhe of trefoil matches brute-force integral", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  double w = writhe(c, 24);
  double oracle = writhe_bruteforce(c, 1536);
  CHECK(std::fabs(w - oracle) < 1e-5);
}

TEST_CASE("total torsion of planar circle is zero", "[curve]") {
  CHECK(std::fabs(total_torsion(make_circle(1.0))) < 1e-12);
}

TEST_CASE("total torsion flips sign under reflection", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  CHECK(total_torsion(c) + total_torsion(c.mirrored()) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("total torsion matches refined quadrature oracle", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  auto integrand = [&](double u) {
    Vec3 d1 = c.deriv_u(u, 1), d2 = c.deriv_u(u, 2), d3 = c.deriv_u(u, 3);
    Vec3 cr = cross(d1, d2);
    return dot(cr, d3) / norm2(cr) * norm(d1);
  };
  // composite Simpson with doubling until stable
  auto simpson = [&](int n) {
    double h = two_pi / n, acc = integrand(0.0) + integrand(two_pi);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
    return acc * h / 3.0;
  };
  double prev = simpson(256), cur = simpson(512);
  while (std::fabs(cur - prev) > 1e-11) {
    prev = cur;
    cur = simpson(1024);
    break;
  }
  CHECK(std::fabs(total_torsion(c) - cur) < 1e-7);
}

TEST_CASE("framing twist of planar curves is zero", "[curve]") {
  auto r1 = framing_twist_n0(make_circle(1.0), 8);
  CHECK(r1.value == 0);
  CHECK(r1.defect < 1e-8);
  auto r2 = framing_twist_n0(kftest::wobbly_planar(), 16);
  CHECK(r2.value == 0);
}

TEST_CASE("framing twist of trefoil is an integer", "[curve]") {
  auto r = framing_twist_n0(make_torus_knot(2, 3, 2.0, 0.5), 32);
  CHECK(r.defect < 1e-4);
}

TEST_CASE("twist plus writhe is an integer on a family of curves", "[curve]") {
  std::vector<ClosedCurve> curves;
  curves.push_back(make_circle(1.0));
  curves.push_back(kftest::wobbly_planar());
  curves.push_back(kftest::wavy_unknot());
  curves.push_back(make_torus_knot(2, 3, 2.0, 0.5));
  curves.push_back(make_torus_knot(3, 2, 2.0, 0.5));
  curves.push_back(make_torus_knot(2, 5, 2.0, 0.4));
  for (const auto& c : curves) {
    double v = total_torsion(c) / two_pi + writhe(c, 32);
    CHECK(std::fabs(v - std::llround(v)) < 1e-3);
  }
}

TEST_CASE("linking number of distant circles is zero", "[curve]") {
  ClosedCurve a = make_circle(1.0);
  ClosedCurve b = make_circle(1.0, {10, 0, 0});
  CHECK(linking_number(a, b).value == 0);
}

TEST_CASE("hopf link has linking number +-1", "[curve]") {
  ClosedCurve a = make_circle(1.0);
  std::vector<Vec3> pts(256);
  for (int i = 0; i < 256; ++i) {
    double u = i * two_pi / 256;
    pts[i] = {1.0 + std::cos(u), 0.0, std::sin(u)};
  }
  ClosedCurve b = ClosedCurve::fit_from_samples(pts, 1);
  auto lk = linking_number(a, b);
  CHECK(std::abs(lk.value) == 1);
  CHECK(lk.defect < 1e-6);
  // independent oracle: signed crossing count on a generic projection
  long long oracle = linking_by_crossings(to_polyline(a, 800), to_polyline(b, 800),
                                          {0.23, 0.41, 0.88});
  CHECK(lk.value == oracle);
}

TEST_CASE("linking with a far translate vanishes", "[curve]") {
  ClosedCurve a = make_torus_knot(2, 3, 2.0, 0.5);
  ClosedCurve b = a.translated({30, 4, 7});
  CHECK(linking_number(a, b, 512).value == 0);
}

TEST_CASE("linking requires disjoint curves", "[curve]") {
  ClosedCurve a = make_circle(1.0);
  CHECK_THROWS_AS(linking_number(a, a, 128), Error);
}

TEST_CASE("standard curve factories", "[curve]") {
  CHECK(make_circle(1.0).length() == Catch::Approx(two_pi).epsilon(1e-10));
  CHECK_NOTHROW(make_torus_knot(2, 3, 2.0, 0.5));
  CHECK_THROWS_AS(make_torus_knot(2, 4, 2.0, 0.5), Error);
  CHECK_THROWS_AS(make_torus_knot(2, 3, 0.5, 2.0), Error);
}

TEST_CASE("writhe and linking invariant under rigid motion", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  auto R = kftest::random_rotation();
  Vec3 t{0.7, -1.3, 2.2};
  ClosedCurve cm = c.transformed(R, t);
  CHECK(std::fabs(writhe(c, 16) - writhe(cm, 16)) < 1e-8);

  ClosedCurve a = make_circle(1.0);
  std::vector<Vec3> pts(256);
  for (int i = 0; i < 256; ++i) {
    double u = i * two_pi / 256;
    pts[i] = {1.0 + std::cos(u), 0.0, std::sin(u)};
  }
  ClosedCurve b = ClosedCurve::fit_from_samples(pts, 1);
  auto lk0 = linking_number(a, b);
  auto lk1 = linking_number(a.transformed(R, t), b.transformed(R, t));
  CHECK(lk0.value == lk1.value);
}

TEST_CASE("writhe invariant under reparametrization", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  // resample through an orientation-preserving circle diffeomorphism
  std::vector<Vec3> pts(1024);
  for (int i = 0; i < 1024; ++i) {
    double u = i * two_pi / 1024;
    pts[i] = c.eval_u(u + 0.3 * std::sin(u));
  }
  ClosedCurve cr = ClosedCurve::fit_from_samples(pts, 48);
  CHECK(std::fabs(writhe(c, 24) - writhe(cr, 24)) < 1e-6);
}

TEST_CASE("reversed orientation flips curve traversal", "[curve]") {
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.5);
  ClosedCurve r = c.reversed();
  CHECK(dist(c.eval_u(0.3), r.eval_u(-0.3)) < 1e-12);
  // geometric invariants are unchanged by traversal direction
  CHECK(std::fabs(writhe(c, 16) - writhe(r, 16)) < 1e-8);
}

TEST_CASE("polyline self distance scan", "[curve]") {
  Polyline good = to_polyline(make_torus_knot(2, 3, 2.0, 0.5), 512);
  CHECK(good.min_self_distance() > 0.1);
  // figure-eight-shaped planar polyline crosses itself
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) {
    double u = i * two_pi / 200;
    pts.push_back({std::sin(2 * u), std::sin(u), 0.0});
  }
  Polyline bad(pts, true);
  CHECK(bad.min_self_distance() < 1e-2);
}
