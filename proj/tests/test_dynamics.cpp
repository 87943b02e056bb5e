#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "knotfield/dynamics.hpp"

using namespace knotfield;

namespace {

struct ModelSetup {
  std::shared_ptr<const ClosedCurve> core;
  TubeChart chart;
  FieldHandle field;
};

ModelSetup circle_model(double R, double eps) {
  auto core = std::make_shared<ClosedCurve>(make_circle(R));
  TubeChart chart(core, eps);
  auto sc = std::make_shared<SurfaceCurrent>(make_cos2_current(chart));
  return {core, chart, FieldHandle::model(sc)};
}

ModelSetup trefoil_model(double eps) {
  auto core = std::make_shared<ClosedCurve>(make_trefoil());
  TubeChart chart(core, eps);
  auto sc = std::make_shared<SurfaceCurrent>(make_cos2_current(chart));
  return {core, chart, FieldHandle::model(sc)};
}

}  // namespace

TEST_CASE("model field orbit is the core itself", "[dynamics]") {
  ModelSetup m = trefoil_model(0.05);
  PeriodicOrbit orbit = find_periodic_orbit(m.field, m.chart, 8);
  CHECK(orbit.sup_y < 1e-13);
  CHECK(orbit.residual < 1e-13);
  CHECK(orbit.defect < 1e-13);
}

TEST_CASE("floquet exponents of the model are +-L/eps", "[dynamics]") {
  double eps = 0.05;
  ModelSetup m = trefoil_model(eps);
  PeriodicOrbit orbit = find_periodic_orbit(m.field, m.chart, 8);
  auto [lp, lm] = floquet_exponents(orbit);
  double L = m.core->length();
  CHECK(lp == Catch::Approx(L / eps).epsilon(1e-6));
  CHECK(lm == Catch::Approx(-L / eps).epsilon(1e-6));
}

TEST_CASE("trace along the model field stays on the core", "[dynamics]") {
  ModelSetup m = circle_model(1.0, 0.1);
  Vec3 x0 = m.core->eval(0.0);
  // the transverse dynamics amplifies numerical noise by e^{len/eps}, so the
  // invariance of the core is checked over a couple of e-folding lengths
  double len = 2.0 * m.chart.eps();
  Polyline tr = trace_field_line(m.field, x0, len, 1e-12);
  double worst = 0;
  for (const Vec3& p : tr.points()) worst = std::max(worst, m.chart.project(p).r());
  CHECK(worst < 1e-9);
}

TEST_CASE("linearized transverse flow conserves y1^2 - y2^2", "[dynamics]") {
  // unit-rate hyperbolic rotation dy/dt = (-y2, -y1) over one meridian period
  Dopri5<2> ode;
  ode.rtol = 1e-11;
  ode.atol = 1e-14;
  auto rhs = [](double, const std::array<double, 2>& y) {
    return std::array<double, 2>{-y[1], -y[0]};
  };
  std::array<double, 2> y0{1e-3, 2e-3};
  double inv0 = y0[0] * y0[0] - y0[1] * y0[1];
  auto y = ode.integrate(rhs, y0, 0.0, two_pi);
  double inv1 = y[0] * y[0] - y[1] * y[1];
  CHECK(std::fabs(inv1 - inv0) < 1e-8);
}

TEST_CASE("field line of a circular loop closes on itself", "[dynamics]") {
  FieldHandle f = FieldHandle::wire(std::make_shared<ClosedCurve>(make_circle(1.0)));
  Vec3 x0{1.3, 0, 0};
  Polyline tr = trace_field_line(f, x0, 3.0, 1e-10, nullptr, 1e-3);
  double best = 1e300;
  double walked = 0;
  const auto& pts = tr.points();
  for (size_t i = 1; i + 1 < pts.size(); ++i) {
    walked += dist(pts[i - 1], pts[i]);
    if (walked > 0.5)
      best = std::min(best, Polyline::seg_point_dist(pts[i], pts[i + 1], x0));
  }
  CHECK(best < 1e-5);
}

TEST_CASE("poincare map contracts along the stable direction", "[dynamics]") {
  double R = 1.0, eps = 0.1;
  ModelSetup m = circle_model(R, eps);
  double L = m.core->length();
  // the stable direction of dy/ds = (-y2,-y1)/eps is y1 = y2
  double c = 0.01;
  ChartField cf(m.field, m.chart);
  Dopri5<2> ode;
  ode.rtol = 1e-11;
  ode.atol = 1e-15;
  auto rhs = [&](double s, const std::array<double, 2>& y) { return cf.rhs(s, y[0], y[1]); };
  auto y = ode.integrate(rhs, {c, c}, 0.0, L / 4);
  double ratio = std::log(std::hypot(y[0], y[1]) / (c * std::sqrt(2.0)));
  CHECK(ratio == Catch::Approx(-L / (4 * eps)).epsilon(0.02));
}

TEST_CASE("poincare map fixes the periodic orbit", "[dynamics]") {
  ModelSetup m = circle_model(1.0, 0.1);
  auto [y1, y2] = poincare_map(m.field, m.chart, 0.0, 0.0, 0.0);
  CHECK(std::hypot(y1, y2) < 1e-10);
}

TEST_CASE("generic seeds escape before returning", "[dynamics]") {
  ModelSetup m = circle_model(1.0, 0.05);
  CHECK_THROWS_AS(poincare_map(m.field, m.chart, 0.0, 1e-6, -1e-6), Error);
}

TEST_CASE("orbit of the full surface-current field", "[dynamics][slow]") {
  double eps = 0.05;
  auto core = std::make_shared<ClosedCurve>(make_trefoil());
  TubeChart chart(core, eps);
  QuadSpec q;
  q.rel_tol = 1e-11;
  auto sc = std::make_shared<SurfaceCurrent>(make_cos2_current(chart));
  FieldHandle f = FieldHandle::surface(sc, q);
  PeriodicOrbit orbit = find_periodic_orbit(f, chart, 24);
  INFO("sup_y=" << orbit.sup_y << " residual=" << orbit.residual
                << " defect=" << orbit.defect);
  CHECK(orbit.residual < 1e-9);
  CHECK(orbit.defect < 1e-2);
  CHECK(orbit.sup_y < 0.1);
  CHECK(orbit.sup_y > 1e-6);  // the true line is displaced off the core
  auto [lp, lm] = floquet_exponents(orbit);
  double L = core->length();
  CHECK(lp == Catch::Approx(L / eps).epsilon(0.1));
  CHECK(lm == Catch::Approx(-L / eps).epsilon(0.1));
  CHECK(std::fabs(lp + lm) < 0.05 * lp);

  // structural stability: a small smooth perturbation moves the orbit a little
  FieldHandle pert = FieldHandle::sum(
      {{1.0, f},
       {1e-3, FieldHandle::wire(std::make_shared<ClosedCurve>(make_circle(6.0, {0, 0, 4})))}});
  PeriodicOrbit orbit2 = find_periodic_orbit(pert, chart, 24);
  double moved = 0;
  for (int i = 0; i < 64; ++i) {
    double s = i * L / 64;
    moved = std::max(moved, std::hypot(orbit2.y1.eval(s) - orbit.y1.eval(s),
                                       orbit2.y2.eval(s) - orbit.y2.eval(s)));
  }
  CHECK(moved < 0.05);
  CHECK(moved > 1e-8);
}

TEST_CASE("collocation residual decays spectrally", "[dynamics][slow]") {
  double eps = 0.05;
  auto core = std::make_shared<ClosedCurve>(make_trefoil());
  TubeChart chart(core, eps);
  QuadSpec q;
  q.rel_tol = 1e-11;
  auto sc = std::make_shared<SurfaceCurrent>(make_cos2_current(chart));
  FieldHandle f = FieldHandle::surface(sc, q);
  double r8 = find_periodic_orbit(f, chart, 8).defect;
  double r16 = find_periodic_orbit(f, chart, 16).defect;
  double r32 = find_periodic_orbit(f, chart, 32).defect;
  INFO("r8=" << r8 << " r16=" << r16 << " r32=" << r32);
  // spectral until the defect hits the plateau set by the near-field
  // harmonics of the source surface, then it stays there
  CHECK(r16 < 0.25 * r8);
  CHECK(r32 < 0.5 * r8);
}

TEST_CASE("certificate for the model orbit", "[dynamics]") {
  ModelSetup m = trefoil_model(0.05);
  PeriodicOrbit orbit = find_periodic_orbit(m.field, m.chart, 8);
  auto [lp, lm] = floquet_exponents(orbit);
  orbit.lambda_plus = lp;
  orbit.lambda_minus = lm;
  OrbitCertificate cert = isotopy_certificate(orbit);
  CHECK(cert.confined);
  CHECK(cert.C_measured < 1e-10);
  CHECK(cert.s_winding == 1);
}

TEST_CASE("orbit invariance: a trace seeded on the orbit follows it", "[dynamics][slow]") {
  double eps = 0.05;
  auto core = std::make_shared<ClosedCurve>(make_trefoil());
  TubeChart chart(core, eps);
  QuadSpec q;
  q.rel_tol = 1e-10;
  auto sc = std::make_shared<SurfaceCurrent>(make_cos2_current(chart));
  FieldHandle f = FieldHandle::surface(sc, q);
  PeriodicOrbit orbit = find_periodic_orbit(f, chart, 24);
  // integrate the graph equation from the orbit point over the window where
  // the e^{(s-s0)/eps} hyperbolic amplification stays below 1e6; tracking a
  // full (or even quarter) period is precluded by the exponential blow-up
  ChartField cf(f, chart);
  Dopri5<2> ode;
  ode.rtol = 1e-11;
  ode.atol = 1e-14;
  auto rhs = [&](double s, const std::array<double, 2>& y) { return cf.rhs(s, y[0], y[1]); };
  double L = core->length();
  double window = std::min(L / 4, eps * std::log(1e6));
  double drift = 0;
  ode.integrate(rhs, {orbit.y1.eval(0.0), orbit.y2.eval(0.0)}, 0.0, window,
                [&](double s, const std::array<double, 2>& yy) {
                  drift = std::max(drift, std::hypot(yy[0] - orbit.y1.eval(s),
                                                     yy[1] - orbit.y2.eval(s)));
                });
  CHECK(drift < 10 * std::max(orbit.defect, 1e-10) * 1e6);
}
