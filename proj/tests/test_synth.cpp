#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "knotfield/knots.hpp"
#include "knotfield/synth.hpp"

using namespace knotfield;

namespace {

// shared fixtures: built once, reused across test cases
std::shared_ptr<const IsoChart> circle_iso() {
  static auto ic = std::make_shared<IsoChart>(
      make_cos2_current(TubeChart(make_circle(1.0), 0.05)), 128);
  return ic;
}

std::shared_ptr<const IsoChart> trefoil_iso() {
  static auto ic = std::make_shared<IsoChart>(
      make_cos2_current(TubeChart(make_trefoil(), 0.05)), 128);
  return ic;
}

EvaluationRegion small_region(const TubeChart& chart) {
  return annulus_region(chart, 0.02, 0.05, 6, 4, 1);
}

FieldHandle ref_field(std::shared_ptr<const IsoChart> ic) {
  QuadSpec q;
  q.rel_tol = 1e-8;
  return FieldHandle::surface(
      std::make_shared<SurfaceCurrent>(ic->current()), q);
}

}  // namespace

TEST_CASE("integral wires close and are unknotted", "[synth]") {
  auto ic = trefoil_iso();
  WireCollection wc = integral_wire_collection(ic, 6);
  CHECK(wc.closure_defect < 1e-7);
  for (const auto& w : wc.wires) {
    CHECK(dist(w.points().front(), w.points().back()) < 4e-3);  // one sample step
    CHECK(w.min_self_distance() > 1e-4);
  }
  CHECK(alexander_polynomial(wc.wires[0]) == AlexanderPoly{{1}, 0});
  CHECK(alexander_polynomial(wc.wires[3]) == AlexanderPoly{{1}, 0});
}

TEST_CASE("wire collection field converges to the surface field", "[synth][slow]") {
  auto ic = trefoil_iso();
  EvaluationRegion K = small_region(ic->current().chart());
  FieldHandle bj = ref_field(ic);
  auto En = [&](int n) {
    WireCollection wc = integral_wire_collection(ic, n);
    FieldHandle sum = wc.summed_field();
    return field_distance(FieldHandle::sum({{wc.weight, sum}}), bj, K, 0);
  };
  double e4 = En(4), e16 = En(16);
  INFO("E4=" << e4 << " E16=" << e16);
  CHECK(e16 < e4);
}

TEST_CASE("chain is a single embedded closed wire", "[synth]") {
  auto ic = circle_iso();
  WireCollection wc = integral_wire_collection(ic, 6);
  Polyline chain = connect_sum_chain(wc, 0.01);
  CHECK(chain.closed());
  CHECK(chain.min_self_distance() > 1e-4);
  // orientation audit: retained arcs run along the current
  CHECK(chain_orientation_alignment(chain, wc) > 0.9);
}

TEST_CASE("chain field approaches the collection field as the cuts shrink", "[synth][slow]") {
  auto ic = circle_iso();
  WireCollection wc = integral_wire_collection(ic, 6);
  EvaluationRegion K = small_region(ic->current().chart());
  FieldHandle sum = wc.summed_field();
  double d_big = field_distance(FieldHandle::wire(connect_sum_chain(wc, 0.1)), sum, K, 0);
  double d_small = field_distance(FieldHandle::wire(connect_sum_chain(wc, 0.01)), sum, K, 0);
  INFO("delta=0.1: " << d_big << "  delta=0.01: " << d_small);
  CHECK(d_small < d_big);
}

TEST_CASE("chain of unknots is an unknot", "[synth]") {
  auto ic = circle_iso();
  WireCollection wc = integral_wire_collection(ic, 6);
  Polyline chain = connect_sum_chain(wc, 0.01);
  AlexanderPoly p = alexander_polynomial(chain);
  CHECK(p == AlexanderPoly{{1}, 0});
}

TEST_CASE("far connected sum converges and decays", "[synth][slow]") {
  auto ic = circle_iso();
  WireCollection wc = integral_wire_collection(ic, 6);
  Polyline chain = connect_sum_chain(wc, 0.01);
  ClosedCurve target = make_torus_knot(2, 3, 2.0, 0.5);
  EvaluationRegion K = small_region(ic->current().chart());

  double R = 20.0;
  FarConnectResult far1 = far_connect(chain, target, R, 0.02);
  FarConnectResult far2 = far_connect(chain, target, R, 0.01);
  FieldHandle bsum = FieldHandle::sum(
      {{1.0, FieldHandle::wire(chain)}, {1.0, FieldHandle::wire(far1.placed_target)}});
  double e1 = field_distance(FieldHandle::wire(far1.wire), bsum, K, 0);
  FieldHandle bsum2 = FieldHandle::sum(
      {{1.0, FieldHandle::wire(chain)}, {1.0, FieldHandle::wire(far2.placed_target)}});
  double e2 = field_distance(FieldHandle::wire(far2.wire), bsum2, K, 0);
  INFO("delta3=0.02: " << e1 << " delta3=0.01: " << e2);
  CHECK(e2 < e1);

  // far-knot contribution bounded by C/R^2: doubling R^2 halves it (or better)
  auto farmag = [&](double RR) {
    FarConnectResult fr = far_connect(chain, target, RR, 0.01);
    double worst = 0;
    for (const Vec3& x : K.points)
      worst = std::max(worst, norm(wire_field(fr.placed_target, x)));
    return worst;
  };
  double m1 = farmag(R), m2 = farmag(R * std::sqrt(2.0));
  INFO("m(R)=" << m1 << " m(sqrt2 R)=" << m2);
  CHECK(m2 <= 0.55 * m1);
}

TEST_CASE("far connected sum carries the target knot type", "[synth][slow]") {
  auto ic = circle_iso();
  WireCollection wc = integral_wire_collection(ic, 4);
  Polyline chain = connect_sum_chain(wc, 0.01);
  ClosedCurve target = make_torus_knot(2, 3, 2.0, 0.5);
  FarConnectResult far = far_connect(chain, target, 15.0, 0.01);
  AlexanderPoly p = alexander_polynomial(far.wire);
  INFO(p.str());
  CHECK(p == (AlexanderPoly{{1, -1, 1}, -1}));
}

TEST_CASE("corner rounding of a square", "[synth]") {
  std::vector<Vec3> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  Polyline square(sq, true);
  ClosedCurve rounded = smooth_corners(square, 0.1);
  // closed, finite curvature everywhere on samples
  double kmax = rounded.max_curvature();
  CHECK(kmax < 40.0);
  CHECK(std::isfinite(kmax));
  CHECK_THROWS_AS(fillet_corners(square, 0.6), Error);  // radius beyond half the side
}

TEST_CASE("small rounding barely changes the field", "[synth]") {
  std::vector<Vec3> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  Polyline square(sq, true);
  Polyline rounded = fillet_corners(square, 1e-3, 16);
  for (Vec3 x : {Vec3{0.5, 0.5, 0.4}, Vec3{2.0, 0.3, 0.2}}) {
    Vec3 b0 = wire_field(square, x);
    Vec3 b1 = wire_field(rounded, x);
    CHECK(norm(b1 - b0) / norm(b0) < 1e-3);
  }
}

TEST_CASE("smoothed corners produce a valid closed curve", "[synth]") {
  std::vector<Vec3> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  Polyline square(sq, true);
  ClosedCurve rounded = smooth_corners(square, 0.05, 192, 4096);
  // stays near the fillet polyline
  Polyline ref = fillet_corners(square, 0.05, 16);
  double worst = 0;
  for (int i = 0; i < 256; ++i)
    worst = std::max(worst, ref.min_distance_to_point(rounded.eval_u(i * two_pi / 256)));
  CHECK(worst < 5e-3);
}

TEST_CASE("cable winds once along the core and n times around it", "[synth][slow]") {
  auto ic = trefoil_iso();
  int n = 8;
  CableSpec spec = cable_spec(*ic, n);
  Polyline cab = cable_wire(*ic, spec, 64);
  const TubeChart& chart = ic->current().chart();
  double L = chart.core().length();
  // accumulate windings through the chart
  double s_acc = 0, th_acc = 0;
  TubePoint prev = chart.project(cab.points()[0]);
  for (size_t i = 1; i <= cab.points().size(); ++i) {
    TubePoint cur = chart.project(cab.points()[i % cab.points().size()]);
    s_acc += std::remainder(cur.s - prev.s, L);
    th_acc += std::remainder(cur.theta() - prev.theta(), two_pi);
    prev = cur;
  }
  CHECK(std::llround(s_acc / L) == 1);
  CHECK(std::llround(th_acc / two_pi) == n);
}

TEST_CASE("cable crosses the section exactly at the sampled labels", "[synth][slow]") {
  auto ic = trefoil_iso();
  int n = 8;
  CableSpec spec = cable_spec(*ic, n);
  double L = ic->current().core_length();
  for (int m = 0; m < n; ++m) {
    auto [alpha, sigma] = cable_coords(spec, static_cast<double>(m));
    CHECK(sigma == 0.0);
    CHECK(circ_dist(alpha, spec.alphas[m], 1.0) < 1e-12);
    auto [s, th] = ic->psi_inverse(alpha, sigma);
    CHECK(circ_dist(s, spec.alphas[m] * L, L) < 1e-8 * L);
    CHECK(std::fabs(th) < 1e-12);
  }
}

TEST_CASE("cable tangent defect shrinks with n", "[synth][slow]") {
  auto ic = trefoil_iso();
  double d16 = cable_tangent_defect(*ic, cable_spec(*ic, 16));
  double d48 = cable_tangent_defect(*ic, cable_spec(*ic, 48));
  INFO("d16=" << d16 << " d48=" << d48);
  CHECK(d48 < d16);
}

TEST_CASE("cable-core linking offset is constant in n", "[synth][slow]") {
  auto ic = trefoil_iso();
  Polyline core = to_polyline(ic->current().chart().core(), 1024);
  long long off8 = linking_number(cable_wire(*ic, 8), core).value - 8;
  long long off16 = linking_number(cable_wire(*ic, 16), core).value - 16;
  long long off32 = linking_number(cable_wire(*ic, 32), core).value - 32;
  INFO("offsets " << off8 << " " << off16 << " " << off32);
  CHECK(off8 == off16);
  CHECK(off16 == off32);
}

TEST_CASE("cable stays within eps of the core", "[synth][slow]") {
  auto ic = trefoil_iso();
  double eps = ic->current().eps();
  Polyline cab = cable_wire(*ic, 16);
  Polyline core = to_polyline(ic->current().chart().core(), 2048);
  double h = hausdorff_distance(cab, core);
  // the true value is exactly eps (every cable point sits at distance eps);
  // a grazing-pass allowance of maxseg^2/(2 eps) covers the discretization
  double maxseg = 0;
  for (size_t i = 0; i < cab.segment_count(); ++i)
    maxseg = std::max(maxseg, dist(cab.segment_a(i), cab.segment_b(i)));
  INFO("hausdorff=" << h << " eps=" << eps << " allowance=" << maxseg * maxseg / (2 * eps));
  CHECK(h <= eps + maxseg * maxseg / (2 * eps));
}

TEST_CASE("cable field converges to the surface field", "[synth][slow]") {
  auto ic = trefoil_iso();
  EvaluationRegion K = small_region(ic->current().chart());
  FieldHandle bj = ref_field(ic);
  auto En = [&](int n) {
    Polyline cab = cable_wire(*ic, n);
    return field_distance(
        FieldHandle::sum({{ic->c0() / n, FieldHandle::wire(cab)}}), bj, K, 0);
  };
  double e8 = En(8), e32 = En(32);
  INFO("E8=" << e8 << " E32=" << e32);
  CHECK(e32 < e8);
}
