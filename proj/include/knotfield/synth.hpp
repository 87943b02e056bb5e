#pragma once

#include "current.hpp"
#include "field.hpp"

namespace knotfield {

// Ambient vector of the surface current at (s, theta).
inline Vec3 current_ambient(const SurfaceCurrent& sc, double s, double theta) {
  auto [js, jth] = sc.j_eval(s, theta);
  const ClosedCurve& core = sc.chart().core();
  FrenetFrame f = core.frenet(s);
  double eps = sc.eps();
  double c = std::cos(theta), sn = std::sin(theta);
  Vec3 ds_vec = (1 - eps * f.kappa * c) * f.T + eps * f.tau * (sn * f.N - c * f.B);
  Vec3 dth_vec = eps * (-sn * f.N + c * f.B);
  return js * ds_vec + jth * dth_vec;
}

// Isochronized current (unit section-return time) in ambient coordinates.
inline Vec3 isochronized_ambient(const IsoChart& ic, double alpha, double s, double theta) {
  return ic.Ttilde(alpha) * current_ambient(ic.current(), s, theta);
}

// ---------------------------------------------------------------------------
// Finite collections of closed integral-curve wires.
// ---------------------------------------------------------------------------

struct WireCollection {
  std::shared_ptr<const IsoChart> iso;
  std::vector<Polyline> wires;              // gamma_k in ambient space
  std::vector<std::vector<double>> s_tab;   // s(theta) per wire on a uniform theta grid
  std::vector<double> alphas;               // section labels, ascending
  double weight = 0;                        // c0 / n
  double closure_defect = 0;

  int theta_samples() const { return s_tab.empty() ? 0 : static_cast<int>(s_tab[0].size()); }

  double s_at(int k, double theta) const {
    const auto& tab = s_tab[k];
    int m = static_cast<int>(tab.size());
    double x = wrap(theta, two_pi) / two_pi * m;
    int i = static_cast<int>(x) % m;
    double f = x - std::floor(x);
    double s0 = tab[i], s1 = tab[(i + 1) % m];
    double L = iso->current().core_length();
    // the table varies by less than a quarter period between samples
    double d = std::remainder(s1 - s0, L);
    return s0 + f * d;
  }

  FieldHandle summed_field() const {
    std::vector<std::pair<double, FieldHandle>> parts;
    for (const auto& w : wires) parts.emplace_back(1.0, FieldHandle::wire(w));
    return FieldHandle::sum(std::move(parts));
  }
};

// n closed integral curves of the current through the equidistributed section
// points, each carrying weight c0/n.
inline WireCollection integral_wire_collection(std::shared_ptr<const IsoChart> ic, int n,
                                               int theta_res = 256) {
  WireCollection wc;
  wc.iso = ic;
  wc.alphas = sample_alphas(*ic, n);
  std::sort(wc.alphas.begin(), wc.alphas.end());
  wc.weight = ic->c0() / n;
  const SurfaceCurrent& sc = ic->current();
  double L = sc.core_length(), eps = sc.eps();
  for (double a : wc.alphas) {
    // march the orbit in theta, recording s on the uniform grid
    std::vector<double> tab(theta_res);
    Dopri5<1> ode;
    ode.rtol = 1e-12;
    ode.atol = 1e-14;
    double s = a * L;
    for (int j = 0; j < theta_res; ++j) {
      tab[j] = s;
      double th0 = j * two_pi / theta_res, th1 = (j + 1) * two_pi / theta_res;
      auto rhs = [&](double th, const std::array<double, 1>& y) {
        return std::array<double, 1>{eps * sc.F().eval(th) / sc.G().eval(y[0])};
      };
      s = ode.integrate(rhs, {s}, th0, th1)[0];
    }
    double gap = circ_dist(s, a * L, L);
    wc.closure_defect = std::max(wc.closure_defect, gap);
    if (gap > 1e-7 * std::max(1.0, L))
      throw Error(errc::not_periodic, "integral wire failed to close, gap " + fmt_double(gap));
    std::vector<Vec3> pts(theta_res);
    for (int j = 0; j < theta_res; ++j)
      pts[j] = sc.chart().surface_point(tab[j], j * two_pi / theta_res);
    wc.wires.emplace_back(std::move(pts), true);
    wc.s_tab.push_back(std::move(tab));
  }
  return wc;
}

// ---------------------------------------------------------------------------
// Connected-sum chain: one closed oriented wire from the collection.
//
// The circles are chained along a path. Joint k removes a short arc at
// theta ~ 0 on gamma_k and at theta ~ pi on gamma_{k+1} and inserts two
// nearly-parallel connector strands traversed in opposite directions, so the
// connector measures cancel as delta -> 0. The resulting walk covers every
// retained arc in its original orientation and closes up into a single curve.
// ---------------------------------------------------------------------------

struct ChainOptions {
  double lift_radius_factor = 3.5;  // connector corridor radius, in eps units
  int arc_samples_per_rad = 24;
  int radial_samples = 8;
};

inline Polyline connect_sum_chain(const WireCollection& wc, double delta,
                                  ChainOptions opts = {}) {
  int n = static_cast<int>(wc.wires.size());
  if (n < 2) throw Error(errc::usage, "need at least two wires to chain");
  const SurfaceCurrent& sc = wc.iso->current();
  const TubeChart& chart = sc.chart();
  double eps = sc.eps();
  double dth = std::clamp(delta / eps, 0.02, pi / 3);
  double r_br = opts.lift_radius_factor * eps;
  double dr = std::min(delta, eps / 4);

  std::vector<Vec3> out;
  auto emit_arc = [&](int k, double th_a, double th_b) {
    // arc of gamma_k from th_a to th_b, traversed with increasing theta
    if (th_b <= th_a) th_b += two_pi;
    int m = std::max(8, static_cast<int>((th_b - th_a) * wc.theta_samples() / two_pi));
    for (int j = 0; j <= m; ++j) {
      double th = th_a + (th_b - th_a) * j / m;
      out.push_back(chart.surface_point(wc.s_at(k, th), th));
    }
  };
  auto emit_radial = [&](int k, double th, double r_from, double r_to) {
    for (int j = 1; j <= opts.radial_samples; ++j) {
      double r = r_from + (r_to - r_from) * j / opts.radial_samples;
      out.push_back(chart.embed_radial(wc.s_at(k, th), th, r));
    }
  };
  auto emit_transit = [&](int k_from, double th_from, int k_to, double th_to, double r) {
    // corridor at fixed radius: theta sweeps from th_from to th_to while s
    // moves between the joined circles
    double s_from = wc.s_at(k_from, th_from), s_to = wc.s_at(k_to, th_to);
    double L = sc.core_length();
    double ds = std::remainder(s_to - s_from, L);
    double sweep = th_to - th_from;
    int m = std::max(12, static_cast<int>(std::fabs(sweep) * opts.arc_samples_per_rad +
                                          std::fabs(ds) * 16 / L * wc.theta_samples()));
    for (int j = 1; j <= m; ++j) {
      double f = static_cast<double>(j) / m;
      // smooth blend keeps corners mild before the final rounding
      double g = f * f * (3 - 2 * f);
      out.push_back(chart.embed_radial(s_from + g * ds, th_from + f * sweep, r));
    }
  };

  // outbound: gamma_1 almost fully, then V-arcs of the interior circles
  emit_arc(0, dth / 2, two_pi - dth / 2);
  for (int k = 0; k + 1 < n; ++k) {
    // out-strand of joint k: from (gamma_k, -dth/2) to (gamma_{k+1}, pi+dth/2)
    emit_radial(k, -dth / 2, eps, r_br + dr);
    emit_transit(k, -dth / 2, k + 1, pi + dth / 2, r_br + dr);
    emit_radial(k + 1, pi + dth / 2, r_br + dr, eps);
    if (k + 1 == n - 1) {
      // last circle: single cut at theta ~ pi, wrap through 0
      emit_arc(n - 1, pi + dth / 2, pi - dth / 2 + two_pi);
    } else {
      emit_arc(k + 1, pi + dth / 2, two_pi - dth / 2);
    }
  }
  // return: back-strands and U-arcs, descending
  for (int k = n - 2; k >= 0; --k) {
    // back-strand of joint k: from (gamma_{k+1}, pi-dth/2) to (gamma_k, +dth/2)
    emit_radial(k + 1, pi - dth / 2, eps, r_br - dr);
    emit_transit(k + 1, pi - dth / 2, k, dth / 2, r_br - dr);
    emit_radial(k, dth / 2, r_br - dr, eps);
    if (k > 0) emit_arc(k, dth / 2, pi - dth / 2);
  }

  Polyline gamma(std::move(out), true);
  double msd = gamma.min_self_distance();
  if (msd < 1e-3 * eps)
    throw Error(errc::connector_collision,
                "chain self-distance " + fmt_double(msd) + " below tolerance");
  return gamma;
}

// Orientation audit: the retained integral-curve arcs inside the chain must be
// traversed along the current direction. Returns the worst-case alignment
// (below zero means a reversed arc).
inline double chain_orientation_alignment(const Polyline& chain, const WireCollection& wc) {
  const SurfaceCurrent& sc = wc.iso->current();
  double eps = sc.eps();
  double worst = 1.0;
  size_t nseg = chain.segment_count();
  for (size_t i = 0; i < nseg; ++i) {
    Vec3 a = chain.segment_a(i), b = chain.segment_b(i);
    Vec3 mid = 0.5 * (a + b);
    double d;
    sc.chart().core().nearest_u(mid, &d);
    if (std::fabs(d - eps) > 0.05 * eps) continue;  // connector, not a retained arc
    TubePoint p = sc.chart().project(mid);
    Vec3 jdir = current_ambient(sc, p.s, p.theta());
    worst = std::min(worst, dot(normalized(b - a), normalized(jdir)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Far connected sum with the target knot.
// ---------------------------------------------------------------------------

struct FarConnectResult {
  Polyline wire;          // the connected sum
  Polyline placed_target; // the translated target curve
  Vec3 offset;
};

inline FarConnectResult far_connect(const Polyline& gamma, const ClosedCurve& target, double R,
                                    double delta3, int target_res = 1024,
                                    const std::vector<Vec3>& keep_clear = {}) {
  // scene extent
  double r_scene = 0;
  for (const Vec3& p : gamma.points()) r_scene = std::max(r_scene, norm(p));
  double r_target = 0;
  for (int i = 0; i < 64; ++i) r_target = std::max(r_target, norm(target.eval_u(i * two_pi / 64)));

  const Vec3 dirs[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (const Vec3& d : dirs) {
    Vec3 offset = (R + r_scene + r_target) * d;
    Polyline placed = to_polyline(target.translated(offset), target_res);

    // cut the chain at its extreme vertex in direction d
    const auto& gp = gamma.points();
    size_t icut = 0;
    double best = -1e300;
    for (size_t i = 0; i < gp.size(); ++i)
      if (dot(gp[i], d) > best) {
        best = dot(gp[i], d);
        icut = i;
      }
    // remove ~delta3 of arc around the cut vertex
    auto walk = [&](const std::vector<Vec3>& pts, size_t from, int step, double len) {
      size_t i = from;
      double acc = 0;
      while (acc < len) {
        size_t j = (i + pts.size() + step) % pts.size();
        acc += dist(pts[i], pts[j]);
        i = j;
      }
      return i;
    };
    size_t g_end = walk(gp, icut, -1, delta3 / 2);   // retained chain ends here
    size_t g_start = walk(gp, icut, +1, delta3 / 2); // and resumes here

    // cut the target at its extreme vertex toward the scene (-d)
    const auto& tp = placed.points();
    size_t jcut = 0;
    best = -1e300;
    for (size_t j = 0; j < tp.size(); ++j)
      if (dot(tp[j], -1.0 * d) > best) {
        best = dot(tp[j], -1.0 * d);
        jcut = j;
      }
    size_t t_end = walk(tp, jcut, -1, delta3 / 2);
    size_t t_start = walk(tp, jcut, +1, delta3 / 2);

    // two nearly-parallel strands offset laterally by delta3/2; each end lifts
    // outward from its own curve (the chain end along +d, the target end back
    // toward the scene along -d)
    Vec3 lat = normalized(cross(d, std::fabs(d.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0}));
    double gap_len = dist(gp[g_end], tp[t_start]);
    int m = std::max(64, static_cast<int>(gap_len / std::max(delta3, gap_len / 4096)));
    auto emit_strand = [&](const Vec3& from, const Vec3& lift_from, const Vec3& to,
                           const Vec3& lift_to, double side, std::vector<Vec3>& sink) {
      Vec3 lift_a = from + (0.05 * gap_len) * lift_from;
      Vec3 lift_b = to + (0.05 * gap_len) * lift_to;
      for (int q = 1; q <= 8; ++q) sink.push_back(from + (lift_a - from) * (q / 8.0));
      for (int q = 1; q <= m; ++q) {
        double f = static_cast<double>(q) / m;
        Vec3 base = lift_a + f * (lift_b - lift_a);
        double taper = std::sin(pi * f);
        sink.push_back(base + (side * delta3 * 0.5 * taper) * lat);
      }
      for (int q = 1; q <= 8; ++q) sink.push_back(lift_b + (to - lift_b) * (q / 8.0));
    };

    std::vector<Vec3> out;
    // retained chain: g_start .. g_end (forward order)
    for (size_t i = g_start;; i = (i + 1) % gp.size()) {
      out.push_back(gp[i]);
      if (i == g_end) break;
    }
    emit_strand(gp[g_end], d, tp[t_start], -1.0 * d, +1.0, out);
    for (size_t j = t_start;; j = (j + 1) % tp.size()) {
      out.push_back(tp[j]);
      if (j == t_end) break;
    }
    emit_strand(tp[t_end], -1.0 * d, gp[g_start], d, -1.0, out);

    Polyline result(std::move(out), true);
    if (result.min_self_distance() < 0.1 * delta3) continue;
    bool clear = true;
    for (const Vec3& k : keep_clear)
      if (result.min_distance_to_point(k) < 1e-6) clear = false;
    if (!clear) continue;
    return {std::move(result), std::move(placed), offset};
  }
  throw Error(errc::connector_collision, "no collision-free corridor to the far target");
}

// ---------------------------------------------------------------------------
// Corner rounding.
// ---------------------------------------------------------------------------

// Replace corners by a circular fillet of the given radius; stays a polyline
// (dense samples along the fillets). Vertices turning less than `min_angle`
// are left alone, so rounding a piecewise-smooth wire only touches the
// genuine junctions.
inline Polyline fillet_corners(const Polyline& p, double radius, int arc_samples = 8,
                               double min_angle = 1e-7) {
  const auto& pts = p.points();
  size_t n = pts.size();
  std::vector<Vec3> out;
  for (size_t i = 0; i < n; ++i) {
    Vec3 prev = pts[(i + n - 1) % n], cur = pts[i], next = pts[(i + 1) % n];
    Vec3 u = normalized(cur - prev), v = normalized(next - cur);
    double c = std::clamp(dot(u, v), -1.0, 1.0);
    double ang = std::acos(c);
    if (ang < min_angle) {
      out.push_back(cur);
      continue;
    }
    double t = radius * std::tan(ang / 2);
    double lim = 0.49 * std::min(dist(prev, cur), dist(cur, next));
    if (t > lim)
      throw Error(errc::radius_too_large, "fillet radius " + fmt_double(radius) +
                                              " too large for segment length");
    Vec3 a = cur - t * u, b = cur + t * v;
    // quadratic blend through the corner approximates the circular fillet
    for (int q = 0; q <= arc_samples; ++q) {
      double f = static_cast<double>(q) / arc_samples;
      Vec3 q1 = a + f * (cur - a), q2 = cur + f * (b - cur);
      out.push_back(q1 + f * (q2 - q1));
    }
  }
  return Polyline(std::move(out), true);
}

// Rounded corners as a smooth closed curve: fillet, resample by arc length,
// and fit a sigma-smoothed trigonometric series.
inline ClosedCurve smooth_corners(const Polyline& p, double radius, int fit_order = 128,
                                  int samples = 2048) {
  Polyline f = fillet_corners(p, radius, 16);
  const auto& pts = f.points();
  size_t n = pts.size();
  // resample uniformly by arc length
  std::vector<double> cum(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + dist(pts[i], pts[(i + 1) % n]);
  double total = cum[n];
  std::vector<Vec3> rs(samples);
  size_t seg = 0;
  for (int j = 0; j < samples; ++j) {
    double target = total * j / samples;
    while (seg + 1 < n + 1 && cum[seg + 1] < target) ++seg;
    double ffrac = (target - cum[seg]) / std::max(cum[seg + 1] - cum[seg], 1e-300);
    rs[j] = pts[seg % n] + ffrac * (pts[(seg + 1) % n] - pts[seg % n]);
  }
  std::vector<double> sx(samples), sy(samples), sz(samples);
  for (int j = 0; j < samples; ++j) {
    sx[j] = rs[j].x;
    sy[j] = rs[j].y;
    sz[j] = rs[j].z;
  }
  TrigSeries X = TrigSeries::fit(sx, fit_order), Y = TrigSeries::fit(sy, fit_order),
             Z = TrigSeries::fit(sz, fit_order);
  // Lanczos sigma factors damp the Gibbs oscillation of the fit
  auto smooth = [&](const TrigSeries& t) {
    std::vector<double> a = t.cos_coeffs(), b = t.sin_coeffs();
    for (size_t k = 1; k < a.size(); ++k) {
      double x = pi * k / (fit_order + 1);
      double sig = std::pow(std::sin(x) / x, 2.0);
      a[k] *= sig;
      b[k] *= sig;
    }
    return TrigSeries(a, b);
  };
  CurveOptions opts;
  opts.kappa_min_factor = 1e-12;  // long straight runs fit to very low curvature
  return ClosedCurve(smooth(X), smooth(Y), smooth(Z), opts);
}

// ---------------------------------------------------------------------------
// Cable wires.
// ---------------------------------------------------------------------------

struct CableSpec {
  int n = 0;
  std::vector<double> alphas;  // sorted section labels
  std::vector<double> deltas;  // cyclic gaps, summing to one
  double max_delta = 0;
};

// Quintic smoothstep: C^2 transition from 0 to 1 on [0, 1].
inline double smoothstep5(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  return t * t * t * (10 + t * (-15 + 6 * t));
}

inline double smoothstep5_deriv(double t) {
  if (t <= 0 || t >= 1) return 0;
  return 30 * t * t * (1 - t) * (1 - t);
}

inline CableSpec cable_spec(const IsoChart& ic, int n) {
  CableSpec spec;
  spec.n = n;
  spec.alphas = sample_alphas(ic, n);
  std::sort(spec.alphas.begin(), spec.alphas.end());
  spec.deltas.resize(n);
  for (int k = 0; k < n; ++k) {
    double next = (k + 1 < n) ? spec.alphas[k + 1] : spec.alphas[0] + 1.0;
    spec.deltas[k] = next - spec.alphas[k];
    spec.max_delta = std::max(spec.max_delta, spec.deltas[k]);
  }
  if (spec.max_delta >= 0.5)
    throw Error(errc::self_intersection,
                "largest section gap " + fmt_double(spec.max_delta) + " needs a larger n");
  return spec;
}

// Section coordinates of the cable at time t in [0, n): winds once in alpha
// and n times in sigma, crossing the section exactly at the sampled labels.
inline std::pair<double, double> cable_coords(const CableSpec& spec, double t) {
  double tw = wrap(t, static_cast<double>(spec.n));
  int m = std::min(static_cast<int>(tw), spec.n - 1);
  double alpha = spec.alphas[m] + spec.deltas[m] * smoothstep5(tw - m);
  return {wrap(alpha, 1.0), tw - m};
}

// The cable as an ambient polyline on the tube surface.
inline Polyline cable_wire(const IsoChart& ic, const CableSpec& spec, int pts_per_winding = 64) {
  const SurfaceCurrent& sc = ic.current();
  std::vector<Vec3> pts;
  pts.reserve(spec.n * pts_per_winding);
  for (int j = 0; j < spec.n * pts_per_winding; ++j) {
    double t = static_cast<double>(j) / pts_per_winding;
    auto [alpha, sigma] = cable_coords(spec, t);
    auto [s, th] = ic.psi_inverse(alpha, sigma);
    pts.push_back(sc.chart().surface_point(s, th));
  }
  Polyline cab(std::move(pts), true);
  if (cab.min_self_distance() < 1e-6 * sc.eps())
    throw Error(errc::self_intersection, "cable strands collide; increase n");
  return cab;
}

inline Polyline cable_wire(const IsoChart& ic, int n, int pts_per_winding = 64) {
  return cable_wire(ic, cable_spec(ic, n), pts_per_winding);
}

// sup_t |dGamma/dt - isochronized current|, the uniform tangent-closeness
// measure of the cable construction.
inline double cable_tangent_defect(const IsoChart& ic, const CableSpec& spec,
                                   int probes_per_winding = 8) {
  const SurfaceCurrent& sc = ic.current();
  double h = 1e-5;
  double worst = 0;
  for (int j = 0; j < spec.n * probes_per_winding; ++j) {
    double t = (j + 0.31) / probes_per_winding;
    auto embed_at = [&](double tt) {
      auto [alpha, sigma] = cable_coords(spec, tt);
      auto [s, th] = ic.psi_inverse(alpha, sigma);
      return sc.chart().surface_point(s, th);
    };
    Vec3 vel = (embed_at(t + h) - embed_at(t - h)) / (2 * h);
    auto [alpha, sigma] = cable_coords(spec, t);
    auto [s, th] = ic.psi_inverse(alpha, sigma);
    worst = std::max(worst, norm(vel - isochronized_ambient(ic, alpha, s, th)));
  }
  return worst;
}

// Hausdorff distance between two closed polylines (vertex-to-segment based).
inline double hausdorff_distance(const Polyline& a, const Polyline& b) {
  auto one_sided = [](const Polyline& p, const Polyline& q) {
    double worst = 0;
    for (const Vec3& x : p.points()) worst = std::max(worst, q.min_distance_to_point(x));
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace knotfield
