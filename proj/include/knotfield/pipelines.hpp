#pragma once

#include "config.hpp"
#include "io.hpp"
#include "synth.hpp"

namespace knotfield {

// ---------------------------------------------------------------------------
// Config-driven construction helpers.
// ---------------------------------------------------------------------------

inline ClosedCurve curve_from_config(const Config& cfg, const std::string& section) {
  std::string kind = cfg.get_string(section + ".kind", "trefoil");
  CurveOptions opts;
  opts.orientation = static_cast<int>(cfg.get_int(section + ".orientation", 1));
  if (kind == "circle") return make_circle(cfg.get_double(section + ".R", 1.0), {}, opts);
  if (kind == "ellipse")
    return make_ellipse(cfg.get_double(section + ".a", 2.0), cfg.get_double(section + ".b", 1.0),
                        opts);
  if (kind == "trefoil") return make_trefoil(opts);
  if (kind == "figure_eight") return make_figure_eight(opts);
  if (kind == "torus_knot")
    return make_torus_knot(static_cast<int>(cfg.get_int(section + ".p", 2)),
                           static_cast<int>(cfg.get_int(section + ".q", 3)),
                           cfg.get_double(section + ".R", 2.0),
                           cfg.get_double(section + ".r", 0.5), opts);
  throw Error(errc::usage, "unknown curve kind " + kind + " in [" + section + "]");
}

// Current family from the [current] section; defaults to F = 2 cos 2theta,
// G = 1 when the section is absent.
inline SurfaceCurrent current_from_config(const Config& cfg, TubeChart chart) {
  double L = chart.core().length();
  std::vector<double> fc = cfg.get_list("current.F_cos", {0, 0, 2.0});
  std::vector<double> fs = cfg.get_list("current.F_sin", {});
  std::vector<double> gc = cfg.get_list("current.G_cos", {1.0});
  std::vector<double> gs = cfg.get_list("current.G_sin", {});
  return SurfaceCurrent(std::move(chart), TrigSeries(fc, fs), TrigSeries(gc, gs, L));
}

// ---------------------------------------------------------------------------
// Thin-tube asymptotics verification.
// ---------------------------------------------------------------------------

struct AsymptoticsReport {
  struct AxisRow {
    double eps, residual, ratio;  // ratio = residual / (eps log(1/eps))
  };
  struct TransverseRow {
    double eps, y_radius, residual, C;  // C = residual / (eps log(1/eps) + |y|^2)
  };
  std::vector<AxisRow> axis;
  std::vector<TransverseRow> transverse;
  bool axis_bound_ok = false;        // residual <= C_cap eps log(1/eps), and shrinking
  bool axis_ratio_two_sided = false; // the stricter reading: ratios within x2
  bool transverse_stable = false;    // per-eps C spread within a factor 2
  double c_cap = 0.5;
};

inline AsymptoticsReport run_verify_asymptotics(const ClosedCurve& core, const Config& cfg,
                                                const std::vector<double>& eps_list,
                                                int n_s_samples = 24) {
  if (eps_list.empty()) throw Error(errc::usage, "empty eps list");
  AsymptoticsReport rep;
  double L = core.length();
  QuadSpec q;
  q.rel_tol = cfg.get_double("run.quad_tol", 1e-8);
  std::vector<double> radii = cfg.get_list("run.y_radii", {0.01, 0.02, 0.04});
  for (double eps : eps_list) {
    SurfaceCurrent sc = current_from_config(cfg, TubeChart(core, eps));
    detail::SurfaceEvaluator ev(sc);
    double scal = eps * std::log(1.0 / eps);
    double R = 0;
    for (int i = 0; i < n_s_samples; ++i) {
      double s = i * L / n_s_samples;
      Vec3 B = ev.eval(core.eval(s), q);
      Vec3 comp = sc.chart().chart_components(s, 0, 0, B);
      R = std::max(R, std::fabs(comp.x - sc.G().eval(s)));
    }
    rep.axis.push_back({eps, R, R / scal});
    for (double yr : radii) {
      double worst = 0;
      for (int i = 0; i < 8; ++i) {
        double s = i * L / 8;
        for (int j = 0; j < 4; ++j) {
          double th = two_pi * j / 4 + 0.3;
          double y1 = yr * std::cos(th), y2 = yr * std::sin(th);
          Vec3 B = ev.eval(sc.chart().embed(s, y1, y2), q);
          Vec3 c = sc.chart().chart_components(s, y1, y2, B);
          worst = std::max({worst, std::fabs(eps * c.y + y2), std::fabs(eps * c.z + y1)});
        }
      }
      rep.transverse.push_back({eps, yr, worst, worst / (scal + yr * yr)});
    }
  }
  // verdicts
  rep.axis_bound_ok = true;
  for (size_t i = 0; i < rep.axis.size(); ++i) {
    if (rep.axis[i].ratio > rep.c_cap) rep.axis_bound_ok = false;
    if (i > 0 && rep.axis[i].residual >= rep.axis[i - 1].residual) rep.axis_bound_ok = false;
  }
  double rmin = 1e300, rmax = 0;
  for (const auto& r : rep.axis) {
    rmin = std::min(rmin, r.ratio);
    rmax = std::max(rmax, r.ratio);
  }
  rep.axis_ratio_two_sided = rmax <= 2.0 * rmin;
  rep.transverse_stable = true;
  for (double eps : eps_list) {
    double cmin = 1e300, cmax = 0;
    for (const auto& t : rep.transverse)
      if (t.eps == eps) {
        cmin = std::min(cmin, t.C);
        cmax = std::max(cmax, t.C);
      }
    if (cmax > 2.0 * cmin) rep.transverse_stable = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Wire/field convergence sweep (collection and cable constructions).
// ---------------------------------------------------------------------------

struct SweepRow {
  int n = 0;
  double e_collection = 0;
  double e_cable = 0;
  double e_collection_c1 = 0;  // first-derivative surrogate norm
  double e_cable_c1 = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool decreasing = false;
  bool halved = false;  // E_last < E_first / 2 for both constructions
};

inline SweepResult run_sweep(std::shared_ptr<const IsoChart> iso,
                             const std::vector<int>& n_list, const EvaluationRegion& K,
                             bool with_c1 = false, int cable_ppw = 64) {
  SweepResult res;
  QuadSpec q;
  q.rel_tol = 1e-8;
  auto sc = std::make_shared<SurfaceCurrent>(iso->current());
  FieldHandle bj = FieldHandle::surface(sc, q);
  for (int n : n_list) {
    SweepRow row;
    row.n = n;
    WireCollection wc = integral_wire_collection(iso, n);
    FieldHandle fc = FieldHandle::sum({{wc.weight, wc.summed_field()}});
    row.e_collection = field_distance(fc, bj, K, 0);
    Polyline cab = cable_wire(*iso, n, cable_ppw);
    FieldHandle fcab = FieldHandle::sum({{iso->c0() / n, FieldHandle::wire(cab)}});
    row.e_cable = field_distance(fcab, bj, K, 0);
    if (with_c1) {
      row.e_collection_c1 = field_distance(fc, bj, K, 1);
      row.e_cable_c1 = field_distance(fcab, bj, K, 1);
    }
    res.rows.push_back(row);
  }
  if (res.rows.size() >= 2) {
    res.decreasing = true;
    for (size_t i = 1; i < res.rows.size(); ++i) {
      if (res.rows[i].e_collection >= res.rows[i - 1].e_collection) res.decreasing = false;
      if (res.rows[i].e_cable >= res.rows[i - 1].e_cable) res.decreasing = false;
    }
    res.halved = res.rows.back().e_collection < 0.5 * res.rows.front().e_collection &&
                 res.rows.back().e_cable < 0.5 * res.rows.front().e_cable;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Full synthesis pipelines.
// ---------------------------------------------------------------------------

struct Theorem1Params {
  double eps = 0.05;
  int n_wires = 24;
  double delta = 0.01;
  double R = 25.0;
  double delta3 = 0.01;
  double fillet_radius = 2e-4;
  int iso_grid = 128;
  int n_modes = 16;
  double gate_ratio = 0.95;  // E_n must beat gate_ratio * E_{n/2}
};

struct Theorem1Result {
  std::shared_ptr<const IsoChart> iso;
  WireCollection collection;
  Polyline chain;
  Polyline final_wire;
  Polyline placed_target;
  AlexanderPoly wire_polynomial, target_polynomial, chain_polynomial;
  PeriodicOrbit orbit;
  OrbitCertificate certificate;
  double gate_e_half = 0, gate_e_full = 0;
};

// Builds a wire isotopic to `wire_knot` whose field has a periodic magnetic
// line inside the tube of `line_knot`: surface current on the thin tube of
// the line knot, approximated by a chained collection of integral-curve
// unknots, connected far away to the wire knot, corners rounded.
inline Theorem1Result run_theorem1(const ClosedCurve& wire_knot, const ClosedCurve& line_knot,
                                   const Config& cfg, Theorem1Params prm = {}) {
  Theorem1Result out;
  TubeChart chart(line_knot, prm.eps);
  SurfaceCurrent sc = current_from_config(cfg, chart);
  if (!sc.hyperbolic_candidate())
    throw Error(errc::validation_failed,
                "current must have vanishing first and nonzero second Fourier mode");
  auto iso = std::make_shared<IsoChart>(sc, prm.iso_grid);
  out.iso = iso;

  // convergence gate: the collection field must keep improving at this n
  EvaluationRegion K = annulus_region(chart, 0.02, 0.05, 8, 4, 2);
  QuadSpec q;
  q.rel_tol = 1e-8;
  FieldHandle bj = FieldHandle::surface(std::make_shared<SurfaceCurrent>(sc), q);
  auto En = [&](int n) {
    WireCollection wc = integral_wire_collection(iso, n);
    return field_distance(FieldHandle::sum({{wc.weight, wc.summed_field()}}), bj, K, 0);
  };
  out.gate_e_half = En(prm.n_wires / 2);
  out.gate_e_full = En(prm.n_wires);
  if (out.gate_e_full > prm.gate_ratio * out.gate_e_half)
    throw Error(errc::quadrature_not_converged,
                "convergence gate: E(" + std::to_string(prm.n_wires) + ") = " +
                    fmt_double(out.gate_e_full) + " does not beat " +
                    fmt_double(prm.gate_ratio) + " * E(" + std::to_string(prm.n_wires / 2) +
                    ") = " + fmt_double(prm.gate_ratio * out.gate_e_half));

  out.collection = integral_wire_collection(iso, prm.n_wires);
  out.chain = connect_sum_chain(out.collection, prm.delta);
  out.chain_polynomial = alexander_polynomial(out.chain);

  FarConnectResult far = far_connect(out.chain, wire_knot, prm.R, prm.delta3);
  out.placed_target = far.placed_target;
  out.final_wire = fillet_corners(far.wire, prm.fillet_radius, 4, 0.05);

  out.target_polynomial = alexander_polynomial(wire_knot, 1024);
  out.wire_polynomial = alexander_polynomial(out.final_wire);

  FieldHandle bfinal = FieldHandle::wire(std::make_shared<Polyline>(out.final_wire));
  out.orbit = find_periodic_orbit(bfinal, chart, prm.n_modes);
  auto [lp, lm] = floquet_exponents(out.orbit);
  out.orbit.lambda_plus = lp;
  out.orbit.lambda_minus = lm;
  out.certificate = isotopy_certificate(out.orbit);
  return out;
}

struct Theorem2Params {
  double eps = 0.05;
  std::vector<int> n_list{16, 32, 64};
  int cable_ppw = 64;
  int iso_grid = 128;
  int n_modes = 16;
};

struct Theorem2Result {
  std::shared_ptr<const IsoChart> iso;
  struct Row {
    int n = 0;
    long long linking = 0;
    long long offset = 0;  // linking - n
    double hausdorff = 0;
    double hausdorff_allowance = 0;
    double tangent_defect = 0;
  };
  std::vector<Row> rows;
  bool offset_constant = false;
  Polyline cable;  // at the largest n
  AlexanderPoly cable_polynomial, core_polynomial;
  PeriodicOrbit orbit;
  OrbitCertificate certificate;
  double line_core_distance = 0;
};

// The cable construction: a wire isotopic and C0-close to the core whose
// field has a periodic magnetic line isotopic to the core.
inline Theorem2Result run_theorem2(const ClosedCurve& core, const Config& cfg,
                                   Theorem2Params prm = {}) {
  Theorem2Result out;
  TubeChart chart(core, prm.eps);
  SurfaceCurrent sc = current_from_config(cfg, chart);
  if (!sc.hyperbolic_candidate())
    throw Error(errc::validation_failed,
                "current must have vanishing first and nonzero second Fourier mode");
  auto iso = std::make_shared<IsoChart>(sc, prm.iso_grid);
  out.iso = iso;
  Polyline core_poly = to_polyline(core, 2048);
  for (int n : prm.n_list) {
    CableSpec spec = cable_spec(*iso, n);
    Polyline cab = cable_wire(*iso, spec, prm.cable_ppw);
    Theorem2Result::Row row;
    row.n = n;
    row.linking = linking_number(cab, core_poly).value;
    row.offset = row.linking - n;
    row.hausdorff = hausdorff_distance(cab, core_poly);
    double maxseg = 0;
    for (size_t i = 0; i < cab.segment_count(); ++i)
      maxseg = std::max(maxseg, dist(cab.segment_a(i), cab.segment_b(i)));
    row.hausdorff_allowance = maxseg * maxseg / (2 * prm.eps);
    row.tangent_defect = cable_tangent_defect(*iso, spec);
    out.rows.push_back(row);
    if (n == prm.n_list.back()) out.cable = std::move(cab);
  }
  out.offset_constant = true;
  for (const auto& r : out.rows)
    if (r.offset != out.rows.front().offset) out.offset_constant = false;

  out.core_polynomial = alexander_polynomial(core, 1024);
  out.cable_polynomial = alexander_polynomial(out.cable);

  FieldHandle bcab = FieldHandle::wire(std::make_shared<Polyline>(out.cable));
  out.orbit = find_periodic_orbit(bcab, chart, prm.n_modes);
  auto [lp, lm] = floquet_exponents(out.orbit);
  out.orbit.lambda_plus = lp;
  out.orbit.lambda_minus = lm;
  out.certificate = isotopy_certificate(out.orbit);
  // distance between the magnetic line and the core
  std::vector<Vec3> line_pts;
  double L = core.length();
  for (int i = 0; i < 512; ++i) {
    double s = i * L / 512;
    line_pts.push_back(out.orbit.chart->embed(s, out.orbit.y1.eval(s), out.orbit.y2.eval(s)));
  }
  out.line_core_distance = hausdorff_distance(Polyline(line_pts, true), core_poly);
  return out;
}

}  // namespace knotfield
