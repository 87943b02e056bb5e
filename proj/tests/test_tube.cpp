#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "knotfield/tube.hpp"

using namespace knotfield;

TEST_CASE("embed at y=0 returns the core", "[tube]") {
  TubeChart ch(make_trefoil(), 0.05);
  for (double s : {0.0, 3.1, 9.4}) CHECK(dist(ch.embed(s, 0, 0), ch.core().eval(s)) < 1e-10);
}

TEST_CASE("embed at y=(1,0) lands on the surface along N", "[tube]") {
  TubeChart ch(make_trefoil(), 0.05);
  double s = 2.0;
  FrenetFrame f = ch.core().frenet(s);
  CHECK(dist(ch.embed(s, 1, 0), ch.core().eval(s) + 0.05 * f.N) < 1e-12);
}

TEST_CASE("surface points sit at distance eps from the core", "[tube]") {
  double eps = 0.02;
  TubeChart ch(make_trefoil(), eps);
  const ClosedCurve& core = ch.core();
  for (double theta = 0; theta < two_pi; theta += two_pi / 7) {
    Vec3 x = ch.surface_point(4.0, theta);
    // brute nearest-point scan over the core, golden-section refined
    double best = 1e300;
    int ibest = 0;
    for (int i = 0; i < 4096; ++i) {
      double d = dist(x, core.eval_u(i * two_pi / 4096));
      if (d < best) {
        best = d;
        ibest = i;
      }
    }
    double a = (ibest - 1) * two_pi / 4096, b = (ibest + 1) * two_pi / 4096;
    const double gr = 0.61803398874989484;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = dist(x, core.eval_u(c1)), f2 = dist(x, core.eval_u(c2));
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = c2; c2 = c1; f2 = f1; c1 = b - gr * (b - a); f1 = dist(x, core.eval_u(c1));
      } else {
        a = c1; c1 = c2; f1 = f2; c2 = a + gr * (b - a); f2 = dist(x, core.eval_u(c2));
      }
    }
    best = std::min(f1, f2);
    CHECK(std::fabs(best - eps) < 1e-6);
  }
}

TEST_CASE("project inverts embed", "[tube]") {
  TubeChart ch(make_trefoil(), 0.05);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    double s = kftest::urand(0, ch.core().length());
    double r = std::sqrt(kftest::urand(0, 1.0)) * 0.999;
    double th = kftest::urand(0, two_pi);
    double y1 = r * std::cos(th), y2 = r * std::sin(th);
    Vec3 x = ch.embed(s, y1, y2);
    TubePoint p = ch.project(x);
    worst = std::max(worst, dist(ch.embed(p), x));
    CHECK(circ_dist(p.s, s, ch.core().length()) < 1e-7);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("projecting a core point gives y=0", "[tube]") {
  TubeChart ch(make_trefoil(), 0.05);
  TubePoint p = ch.project(ch.core().eval(5.0));
  CHECK(std::fabs(p.y1) < 1e-9);
  CHECK(std::fabs(p.y2) < 1e-9);
}

TEST_CASE("points outside the tube are rejected", "[tube]") {
  TubeChart ch(make_trefoil(), 0.05);
  FrenetFrame f = ch.core().frenet(1.0);
  Vec3 x = ch.core().eval(1.0) + 0.1 * f.N;  // 2 eps away
  CHECK_THROWS_AS(ch.project(x), Error);
}

TEST_CASE("volume density formula", "[tube]") {
  double eps = 0.05, R = 2.0;
  TubeChart ch(make_circle(R), eps);
  CHECK(ch.volume_density(1.0, 0, 0) == Catch::Approx(eps * eps).margin(1e-14));
  CHECK(ch.volume_density(1.0, 1, 0) ==
        Catch::Approx(eps * eps * (1 - eps / R)).margin(1e-12));
}

TEST_CASE("volume density matches numerical jacobian of embed", "[tube]") {
  TubeChart ch(make_trefoil(), 0.04);
  double s = 3.7, y1 = 0.31, y2 = -0.44, h = 1e-5;
  auto col = [&](int k) {
    double ds = k == 0 ? h : 0, d1 = k == 1 ? h : 0, d2 = k == 2 ? h : 0;
    return (ch.embed(s + ds, y1 + d1, y2 + d2) - ch.embed(s - ds, y1 - d1, y2 - d2)) / (2 * h);
  };
  Vec3 c0 = col(0), c1 = col(1), c2 = col(2);
  double det = dot(c0, cross(c1, c2));
  CHECK(std::fabs(det - ch.volume_density(s, y1, y2)) < 1e-8);
}

TEST_CASE("surface density formula", "[tube]") {
  double eps = 0.05, R = 2.0;
  TubeChart ch(make_circle(R), eps);
  CHECK(ch.surface_density(0.3, pi / 2) == Catch::Approx(1.0).margin(1e-12));
  for (double th : {0.0, 1.0, 2.5})
    CHECK(ch.surface_density(0.3, th) ==
          Catch::Approx(1 - (eps / R) * std::cos(th)).margin(1e-12));
}

TEST_CASE("surface area matches triangulated mesh", "[tube]") {
  double eps = 0.05;
  TubeChart ch(make_trefoil(), eps);
  double L = ch.core().length();
  // quadrature of eps * A ds dtheta
  int ns = 256, nt = 64;
  double area_quad = 0;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j)
      area_quad += eps * ch.surface_density((i + 0.5) * L / ns, (j + 0.5) * two_pi / nt);
  area_quad *= (L / ns) * (two_pi / nt);
  // triangulated mesh oracle, Richardson-extrapolated over two resolutions
  auto mesh_area = [&](int ms, int mt) {
    std::vector<std::vector<Vec3>> grid(ms + 1, std::vector<Vec3>(mt + 1));
    for (int i = 0; i <= ms; ++i)
      for (int j = 0; j <= mt; ++j)
        grid[i][j] = ch.surface_point(i * L / ms, j * two_pi / mt);
    double area = 0;
    for (int i = 0; i < ms; ++i)
      for (int j = 0; j < mt; ++j) {
        Vec3 a = grid[i][j], b = grid[i + 1][j], c = grid[i + 1][j + 1], d = grid[i][j + 1];
        area += 0.5 * norm(cross(b - a, c - a)) + 0.5 * norm(cross(c - a, d - a));
      }
    return area;
  };
  double a1 = mesh_area(256, 64), a2 = mesh_area(512, 128);
  double area_mesh = (4.0 * a2 - a1) / 3.0;
  CHECK(std::fabs(area_quad - area_mesh) / area_mesh < 1e-4);
}

TEST_CASE("reach of a circle is its radius", "[tube]") {
  CHECK(reach_estimate(make_circle(2.0)) == Catch::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("reach limited by the gap between near strands", "[tube]") {
  // the two strands of this knot stay exactly 2r apart, so reach = gap/2 = r
  ClosedCurve c = make_torus_knot(2, 3, 2.0, 0.1);
  double r = reach_estimate(c);
  CHECK(r == Catch::Approx(0.1).epsilon(0.05));
}

TEST_CASE("tube below the reach has an embedded surface", "[tube]") {
  ClosedCurve c = make_trefoil();
  double eps = 0.9 * reach_estimate(c);
  TubeChart ch(c, eps);
  double L = c.length();
  // mesh collision scan: non-adjacent s-bands must stay apart
  int ms = 192, mt = 24;
  std::vector<Vec3> pts;
  std::vector<double> svals;
  for (int i = 0; i < ms; ++i)
    for (int j = 0; j < mt; ++j) {
      pts.push_back(ch.surface_point(i * L / ms, j * two_pi / mt));
      svals.push_back(i * L / ms);
    }
  double minsep = 1e300;
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b) {
      if (circ_dist(svals[a], svals[b], L) < 8 * eps) continue;
      minsep = std::min(minsep, dist(pts[a], pts[b]));
    }
  CHECK(minsep > 0.05 * eps);
}

TEST_CASE("tube width above the reach is rejected", "[tube]") {
  ClosedCurve c = make_trefoil();
  CHECK_THROWS_AS(TubeChart(c, 1.5 * reach_estimate(c)), Error);
}

TEST_CASE("chart components invert the coordinate basis", "[tube]") {
  TubeChart ch(make_trefoil(), 0.05);
  double s = 2.2, y1 = 0.03, y2 = -0.02;
  FrenetFrame f = ch.core().frenet(s);
  Vec3 v = 0.7 * ch.dxds(s, y1, y2) + 0.2 * (0.05 * f.N) + (-0.4) * (0.05 * f.B);
  Vec3 comp = ch.chart_components(s, y1, y2, v);
  CHECK(comp.x == Catch::Approx(0.7).margin(1e-10));
  CHECK(comp.y == Catch::Approx(0.2).margin(1e-10));
  CHECK(comp.z == Catch::Approx(-0.4).margin(1e-10));
}
