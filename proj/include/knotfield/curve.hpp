#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "common.hpp"
#include "quadrature.hpp"
#include "trig.hpp"

namespace knotfield {

struct FrenetFrame {
  Vec3 T, N, B;
  double kappa = 0;
  double tau = 0;
};

struct CurveOptions {
  int orientation = +1;
  // Curves with inflection points have no Frenet frame; reject below this.
  // Scaled by 2*pi/length at validation time.
  double kappa_min_factor = 1e-6;
  // Pairwise clearance threshold for the self-intersection scan, relative to length.
  double min_clearance_factor = 1e-7;
  bool validate = true;
  int table_size = 2048;
};

// Smooth closed space curve given by one trigonometric series per coordinate
// over a free parameter u in [0, 2pi). Arc length is tabulated once at
// construction; all public geometry queries take the arc-length parameter s.
class ClosedCurve {
 public:
  ClosedCurve() = default;

  ClosedCurve(TrigSeries x, TrigSeries y, TrigSeries z, CurveOptions opts = {})
      : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)), orientation_(opts.orientation) {
    if (orientation_ < 0) {
      x_ = x_.reversed();
      y_ = y_.reversed();
      z_ = z_.reversed();
    }
    build_tables(opts);
    if (opts.validate) validate(opts);
  }

  // Least-squares fit through points sampled uniformly in the curve parameter.
  static ClosedCurve fit_from_samples(const std::vector<Vec3>& pts, int order,
                                      CurveOptions opts = {}) {
    std::vector<double> sx(pts.size()), sy(pts.size()), sz(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      sx[i] = pts[i].x;
      sy[i] = pts[i].y;
      sz[i] = pts[i].z;
    }
    return ClosedCurve(TrigSeries::fit(sx, order), TrigSeries::fit(sy, order),
                       TrigSeries::fit(sz, order), opts);
  }

  double length() const { return length_; }
  int orientation() const { return orientation_; }
  const TrigSeries& series_x() const { return x_; }
  const TrigSeries& series_y() const { return y_; }
  const TrigSeries& series_z() const { return z_; }
  double kappa_min_used() const { return kappa_min_; }

  // --- parameter-space evaluation (u is the free parameter, not arc length) ---

  Vec3 eval_u(double u) const { return {x_.eval(u), y_.eval(u), z_.eval(u)}; }
  Vec3 deriv_u(double u, int d) const {
    return {x_.eval_deriv(u, d), y_.eval_deriv(u, d), z_.eval_deriv(u, d)};
  }
  double speed_u(double u) const { return norm(deriv_u(u, 1)); }

  // Arc length from u=0 to u (machine-precision table + local Gauss panel).
  double arclen_at_u(double u) const {
    double uw = wrap(u, two_pi);
    double h = two_pi / table_n_;
    int i = std::min<int>(static_cast<int>(uw / h), table_n_ - 1);
    double base = s_of_u_[i];
    double extra = gauss_panel([this](double v) { return speed_u(v); }, i * h, uw);
    return base + extra;
  }

  // Invert the arc-length map: u(s), Newton-polished to ~1e-12.
  double u_of_s(double s) const {
    double sw = wrap(s, length_);
    auto it = std::upper_bound(s_of_u_.begin(), s_of_u_.end(), sw);
    int i = std::max<int>(0, static_cast<int>(it - s_of_u_.begin()) - 1);
    double h = two_pi / table_n_;
    double u = i * h;
    double si = s_of_u_[i];
    // linear predictor, then Newton on s(u) - sw
    u += (sw - si) / std::max(speed_u(u), 1e-300);
    for (int k = 0; k < 6; ++k) {
      double f = arclen_at_u(u) - sw;
      if (std::fabs(f) < 1e-15 * std::max(1.0, length_)) break;
      u -= f / speed_u(u);
    }
    return wrap(u, two_pi);
  }

  // --- arc-length interface ---

  Vec3 eval(double s) const { return eval_u(u_of_s(s)); }
  Vec3 tangent(double s) const { return tangent_u(u_of_s(s)); }
  Vec3 tangent_u(double u) const { return normalized(deriv_u(u, 1)); }

  FrenetFrame frenet(double s) const { return frenet_u(u_of_s(s)); }

  FrenetFrame frenet_u(double u) const {
    Vec3 d1 = deriv_u(u, 1), d2 = deriv_u(u, 2), d3 = deriv_u(u, 3);
    double v = norm(d1);
    Vec3 c = cross(d1, d2);
    double cn = norm(c);
    FrenetFrame f;
    f.kappa = cn / (v * v * v);
    if (f.kappa < kappa_min_)
      throw Error(errc::inflection_point,
                  "curvature " + fmt_double(f.kappa) + " below " + fmt_double(kappa_min_));
    f.T = d1 / v;
    f.B = c / cn;
    f.N = cross(f.B, f.T);
    f.tau = dot(c, d3) / (cn * cn);
    return f;
  }

  double curvature(double s) const { return frenet(s).kappa; }
  double torsion(double s) const { return frenet(s).tau; }

  // Nearest point on the curve: returns the parameter u minimizing |x - gamma(u)|.
  // Uses the construction table for bracketing, then Newton on the stationarity
  // condition. If `ambiguity_ratio` is given, throws AmbiguousProjection when a
  // second local minimum comes within that factor of the best distance.
  double nearest_u(const Vec3& x, double* dist_out = nullptr,
                   std::optional<double> ambiguity_ratio = std::nullopt) const {
    double h = two_pi / table_n_;
    int best = 0;
    double bd = 1e300;
    std::vector<double> d2(table_n_);
    for (int i = 0; i < table_n_; ++i) {
      d2[i] = norm2(points_[i] - x);
      if (d2[i] < bd) {
        bd = d2[i];
        best = i;
      }
    }
    double u = refine_nearest(x, best * h, h);
    double dmin = dist(eval_u(u), x);
    if (ambiguity_ratio) {
      // scan for a competing local minimum well-separated in parameter
      for (int i = 0; i < table_n_; ++i) {
        int im = (i + table_n_ - 1) % table_n_, ip = (i + 1) % table_n_;
        if (d2[i] <= d2[im] && d2[i] <= d2[ip] && circ_dist(i * h, u, two_pi) > 16 * h) {
          double u2 = refine_nearest(x, i * h, h);
          double dm2 = dist(eval_u(u2), x);
          if (dm2 < *ambiguity_ratio * dmin && circ_dist(u2, u, two_pi) > 8 * h)
            throw Error(errc::ambiguous_projection, "two core points at comparable distance");
        }
      }
    }
    if (dist_out) *dist_out = dmin;
    return u;
  }

  // Minimum pairwise distance between samples whose chord is shorter than the
  // arc between them would allow for a locally flat curve; this is the
  // "doubled distance between far-apart arcs" estimate used for the reach.
  double min_far_distance() const {
    double best = 1e300;
    for (int i = 0; i < table_n_; ++i) {
      for (int j = i + 1; j < table_n_; ++j) {
        double arc = circ_dist(s_of_u_[i], s_of_u_[j], length_);
        double chord = dist(points_[i], points_[j]);
        if (chord < arc * (2.0 / pi)) best = std::min(best, chord);
      }
    }
    return best;
  }

  double max_curvature() const {
    double m = 0;
    double h = two_pi / table_n_;
    for (int i = 0; i < table_n_; ++i) {
      Vec3 d1 = deriv_u(i * h, 1), d2 = deriv_u(i * h, 2);
      double v = norm(d1);
      m = std::max(m, norm(cross(d1, d2)) / (v * v * v));
    }
    return m;
  }

  // Rigid motion: rotate (row-major matrix) then translate. Harmonics map linearly.
  ClosedCurve transformed(const Mat3& R, const Vec3& t, CurveOptions opts = {}) const {
    auto comb = [&](int row) {
      const TrigSeries* s[3] = {&x_, &y_, &z_};
      int n = std::max({x_.order(), y_.order(), z_.order()});
      std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
      for (int c = 0; c < 3; ++c) {
        for (int k = 0; k <= s[c]->order(); ++k) {
          a[k] += R(row, c) * s[c]->cos_coeffs()[k];
          b[k] += R(row, c) * s[c]->sin_coeffs()[k];
        }
      }
      return TrigSeries(std::move(a), std::move(b));
    };
    TrigSeries nx = comb(0), ny = comb(1), nz = comb(2);
    std::vector<double> ax = nx.cos_coeffs(), bx = nx.sin_coeffs();
    std::vector<double> ay = ny.cos_coeffs(), by = ny.sin_coeffs();
    std::vector<double> az = nz.cos_coeffs(), bz = nz.sin_coeffs();
    ax[0] += t.x;
    ay[0] += t.y;
    az[0] += t.z;
    opts.orientation = +1;
    return ClosedCurve(TrigSeries(ax, bx), TrigSeries(ay, by), TrigSeries(az, bz), opts);
  }

  ClosedCurve translated(const Vec3& t) const {
    Mat3 I;
    I(0, 0) = I(1, 1) = I(2, 2) = 1.0;
    return transformed(I, t);
  }

  ClosedCurve mirrored() const {
    // reflect z -> -z
    Mat3 M;
    M(0, 0) = M(1, 1) = 1.0;
    M(2, 2) = -1.0;
    return transformed(M, {});
  }

  ClosedCurve reversed() const {
    CurveOptions o;
    o.orientation = -1;
    return ClosedCurve(x_, y_, z_, o);
  }

  int table_size() const { return table_n_; }

 private:
  void build_tables(const CurveOptions& opts) {
    table_n_ = opts.table_size;
    s_of_u_.assign(table_n_ + 1, 0.0);
    points_.resize(table_n_);
    double h = two_pi / table_n_;
    for (int i = 0; i < table_n_; ++i) {
      points_[i] = eval_u(i * h);
      s_of_u_[i + 1] =
          s_of_u_[i] + gauss_panel([this](double v) { return speed_u(v); }, i * h, (i + 1) * h);
    }
    length_ = s_of_u_.back();
    s_of_u_.pop_back();
    kappa_min_ = opts.kappa_min_factor * two_pi / length_;
  }

  void validate(const CurveOptions& opts) {
    if (!(length_ > 0) || !std::isfinite(length_))
      throw Error(errc::validation_failed, "degenerate curve length");
    double h = two_pi / table_n_;
    for (int i = 0; i < table_n_; ++i) {
      Vec3 d1 = deriv_u(i * h, 1), d2 = deriv_u(i * h, 2);
      double v = norm(d1);
      if (v < 1e-12 * length_)
        throw Error(errc::validation_failed, "vanishing speed at u=" + fmt_double(i * h));
      double kappa = norm(cross(d1, d2)) / (v * v * v);
      if (kappa < kappa_min_)
        throw Error(errc::validation_failed, "inflection point: curvature " + fmt_double(kappa) +
                                                 " < " + fmt_double(kappa_min_) +
                                                 " at u=" + fmt_double(i * h));
    }
    // self-intersection scan on the sample set: non-adjacent arcs must stay apart
    double clear_thresh = opts.min_clearance_factor * length_;
    double arc_excl = 4.0 * length_ / table_n_;
    for (int i = 0; i < table_n_; ++i) {
      for (int j = i + 1; j < table_n_; ++j) {
        double arc = circ_dist(s_of_u_[i], s_of_u_[j], length_);
        if (arc <= arc_excl) continue;
        double chord = dist(points_[i], points_[j]);
        if (chord < clear_thresh)
          throw Error(errc::validation_failed,
                      "self-intersection: samples at arc distance " + fmt_double(arc) +
                          " only " + fmt_double(chord) + " apart");
      }
    }
  }

  double refine_nearest(const Vec3& x, double u0, double h) const {
    // golden-section bracket around u0, then Newton on g(u) = (gamma-x).gamma'
    auto d2f = [&](double u) { return norm2(eval_u(u) - x); };
    double a = u0 - h, b = u0 + h;
    const double gr = 0.61803398874989484;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = d2f(c1), f2 = d2f(c2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - gr * (b - a);
        f1 = d2f(c1);
      } else {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + gr * (b - a);
        f2 = d2f(c2);
      }
      if (b - a < 1e-10) break;
    }
    double u = 0.5 * (a + b);
    for (int it = 0; it < 6; ++it) {
      Vec3 d = eval_u(u) - x;
      Vec3 g1 = deriv_u(u, 1), g2 = deriv_u(u, 2);
      double g = dot(d, g1);
      double gp = dot(g1, g1) + dot(d, g2);
      if (gp <= 0) break;
      double du = g / gp;
      u -= du;
      if (std::fabs(du) < 1e-14) break;
    }
    return wrap(u, two_pi);
  }

  TrigSeries x_, y_, z_;
  int orientation_ = +1;
  int table_n_ = 0;
  std::vector<double> s_of_u_;
  std::vector<Vec3> points_;
  double length_ = 0;
  double kappa_min_ = 0;
};

// ---------------------------------------------------------------------------
// Polyline: discretized wires.
// ---------------------------------------------------------------------------

class Polyline {
 public:
  Polyline() = default;
  Polyline(std::vector<Vec3> pts, bool closed) : pts_(std::move(pts)), closed_(closed) {
    drop_duplicates();
  }

  const std::vector<Vec3>& points() const { return pts_; }
  bool closed() const { return closed_; }
  size_t segment_count() const {
    return pts_.size() < 2 ? 0 : (closed_ ? pts_.size() : pts_.size() - 1);
  }
  Vec3 segment_a(size_t i) const { return pts_[i]; }
  Vec3 segment_b(size_t i) const { return pts_[(i + 1) % pts_.size()]; }

  double length() const {
    double l = 0;
    for (size_t i = 0; i < segment_count(); ++i) l += dist(segment_a(i), segment_b(i));
    return l;
  }

  Polyline reversed() const {
    std::vector<Vec3> r(pts_.rbegin(), pts_.rend());
    return Polyline(std::move(r), closed_);
  }

  double min_distance_to_point(const Vec3& x) const {
    double best = 1e300;
    for (size_t i = 0; i < segment_count(); ++i)
      best = std::min(best, seg_point_dist(segment_a(i), segment_b(i), x));
    return best;
  }

  // Segment-level self-intersection scan with a uniform spatial hash. Pairs
  // are screened by a chord-vs-arc test so that neighbouring pieces of a
  // smooth curve are not reported: a pair only counts when the straight-line
  // distance is far below what a locally flat run of that arc length allows.
  // Returns the minimum distance over the suspicious pairs (large when none).
  double min_self_distance() const {
    size_t n = segment_count();
    if (n < 3) return 1e300;
    std::vector<double> cum(n + 1, 0.0);
    double maxseg = 0;
    for (size_t i = 0; i < n; ++i) {
      double l = dist(segment_a(i), segment_b(i));
      cum[i + 1] = cum[i] + l;
      maxseg = std::max(maxseg, l);
    }
    double total = cum[n];
    double cell = std::max(2.0 * maxseg, 1e-12);
    auto key = [&](const Vec3& p) {
      auto q = [&](double v) { return static_cast<long long>(std::floor(v / cell)); };
      return std::tuple<long long, long long, long long>(q(p.x), q(p.y), q(p.z));
    };
    std::vector<std::pair<std::tuple<long long, long long, long long>, size_t>> entries;
    entries.reserve(n);
    for (size_t i = 0; i < n; ++i)
      entries.emplace_back(key(0.5 * (segment_a(i) + segment_b(i))), i);
    std::sort(entries.begin(), entries.end());
    double best = 1e300;
    for (size_t ei = 0; ei < entries.size(); ++ei) {
      auto [kx, ky, kz] = entries[ei].first;
      size_t i = entries[ei].second;
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy)
          for (long long dz = -1; dz <= 1; ++dz) {
            auto probe = std::make_tuple(kx + dx, ky + dy, kz + dz);
            auto it = std::lower_bound(
                entries.begin(), entries.end(), std::make_pair(probe, size_t(0)));
            for (; it != entries.end() && it->first == probe; ++it) {
              size_t j = it->second;
              if (j <= i) continue;
              size_t d = j - i;
              if (d <= 1 || (closed_ && d == n - 1)) continue;
              double arc_fwd = cum[j] - cum[i + 1];
              double arc = closed_ ? std::min(arc_fwd, total - cum[j + 1] + cum[i]) : arc_fwd;
              double chord = seg_seg_dist(segment_a(i), segment_b(i), segment_a(j),
                                          segment_b(j));
              if (chord < arc * (2.0 / pi) * 0.9) best = std::min(best, chord);
            }
          }
    }
    return best;
  }

  static double seg_point_dist(const Vec3& a, const Vec3& b, const Vec3& x) {
    Vec3 ab = b - a;
    double t = dot(x - a, ab) / std::max(norm2(ab), 1e-300);
    t = std::clamp(t, 0.0, 1.0);
    return dist(a + t * ab, x);
  }

  static double seg_seg_dist(const Vec3& p1, const Vec3& p2, const Vec3& q1, const Vec3& q2) {
    // standard closest-point-of-two-segments
    Vec3 d1 = p2 - p1, d2 = q2 - q1, r = p1 - q1;
    double a = norm2(d1), e = norm2(d2), f = dot(d2, r);
    double s, t;
    if (a <= 1e-300 && e <= 1e-300) return dist(p1, q1);
    if (a <= 1e-300) {
      s = 0;
      t = std::clamp(f / e, 0.0, 1.0);
    } else {
      double c = dot(d1, r);
      if (e <= 1e-300) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else {
        double b = dot(d1, d2), denom = a * e - b * b;
        s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
        t = (b * s + f) / e;
        if (t < 0) {
          t = 0;
          s = std::clamp(-c / a, 0.0, 1.0);
        } else if (t > 1) {
          t = 1;
          s = std::clamp((b - c) / a, 0.0, 1.0);
        }
      }
    }
    return dist(p1 + s * d1, q1 + t * d2);
  }

 private:
  void drop_duplicates() {
    std::vector<Vec3> out;
    for (const Vec3& p : pts_)
      if (out.empty() || dist(out.back(), p) > 1e-14) out.push_back(p);
    if (closed_ && out.size() > 1 && dist(out.front(), out.back()) < 1e-14) out.pop_back();
    pts_ = std::move(out);
  }

  std::vector<Vec3> pts_;
  bool closed_ = true;
};

inline Polyline to_polyline(const ClosedCurve& c, int n) {
  std::vector<Vec3> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = c.eval_u(i * two_pi / n);
  return Polyline(std::move(pts), true);
}

// ---------------------------------------------------------------------------
// Integral invariants.
// ---------------------------------------------------------------------------

// Gauss self-integral. In the offset variables (u, w = v - u) the integrand is
// one-sidedly smooth on w in [0, 2pi] (it vanishes linearly at both ends), so
// product Gauss panels pinned at w = 0 converge at high order; this dodges the
// |w| kink that sits across the diagonal in (u, v) variables. Two resolutions
// are compared to certify convergence.
inline double writhe(const ClosedCurve& c, int quad_order = 24, double tol = 1e-6,
                     double* defect_out = nullptr) {
  const GaussRule& g = GaussRule::order8();
  auto integrand = [&](double u, double w) {
    Vec3 du = c.deriv_u(u, 1), dv = c.deriv_u(u + w, 1);
    Vec3 d = c.eval_u(u) - c.eval_u(u + w);
    double r2 = norm2(d);
    double r = std::sqrt(r2);
    return dot(cross(du, dv), d) / (r2 * r);
  };
  auto run = [&](int m) {
    double h = two_pi / m;
    double acc = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double a0 = i * h, b0 = j * h;
        double p = 0;
        for (size_t ii = 0; ii < g.nodes.size(); ++ii)
          for (size_t jj = 0; jj < g.nodes.size(); ++jj) {
            double u = a0 + 0.5 * h * (1 + g.nodes[ii]);
            double w = b0 + 0.5 * h * (1 + g.nodes[jj]);
            p += g.weights[ii] * g.weights[jj] * integrand(u, w);
          }
        acc += p * 0.25 * h * h;
      }
    return acc / (4 * pi);
  };
  double w1 = run(quad_order), w2 = run(2 * quad_order);
  double defect = std::fabs(w2 - w1);
  if (defect_out) *defect_out = defect;
  if (defect > tol)
    throw Error(errc::quadrature_not_converged,
                "writhe refinement defect " + fmt_double(defect));
  return w2;
}

inline double total_torsion(const ClosedCurve& c, double abs_tol = 1e-10) {
  auto f = [&](double u) {
    Vec3 d1 = c.deriv_u(u, 1), d2 = c.deriv_u(u, 2), d3 = c.deriv_u(u, 3);
    Vec3 cr = cross(d1, d2);
    double cn2 = norm2(cr);
    if (cn2 <= 0) throw Error(errc::inflection_point, "zero curvature in torsion integral");
    return dot(cr, d3) / cn2 * norm(d1);
  };
  return adaptive_gauss(f, 0.0, two_pi, abs_tol * std::max(1.0, c.length()));
}

struct IntegerWithDefect {
  long long value = 0;
  double defect = 0;
};

// Frenet framing twist: total torsion / 2pi plus writhe is an integer for
// inflection-free closed curves. The defect reports quadrature quality.
inline IntegerWithDefect framing_twist_n0(const ClosedCurve& c, int quad_order = 24) {
  double tw = total_torsion(c) / two_pi;
  double wr = writhe(c, quad_order);
  double v = tw + wr;
  IntegerWithDefect r;
  r.value = std::llround(v);
  r.defect = std::fabs(v - static_cast<double>(r.value));
  if (r.defect > 0.01)
    throw Error(errc::not_near_integer,
                "twist+writhe = " + fmt_double(v) + " not near an integer");
  return r;
}

namespace detail {
inline double link_pair_integral(const Vec3& a1, const Vec3& a2, const Vec3& b1, const Vec3& b2,
                                 int depth) {
  Vec3 da = a2 - a1, db = b2 - b1;
  double la = norm(da), lb = norm(db);
  double d = Polyline::seg_seg_dist(a1, a2, b1, b2);
  if (depth < 4 && d < 2.0 * std::max(la, lb)) {
    Vec3 am = 0.5 * (a1 + a2), bm = 0.5 * (b1 + b2);
    return link_pair_integral(a1, am, b1, bm, depth + 1) +
           link_pair_integral(a1, am, bm, b2, depth + 1) +
           link_pair_integral(am, a2, b1, bm, depth + 1) +
           link_pair_integral(am, a2, bm, b2, depth + 1);
  }
  const GaussRule& g = GaussRule::order8();
  double acc = 0;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    for (size_t j = 0; j < g.nodes.size(); ++j) {
      Vec3 p = a1 + (0.5 + 0.5 * g.nodes[i]) * da;
      Vec3 q = b1 + (0.5 + 0.5 * g.nodes[j]) * db;
      Vec3 r = p - q;
      double rn2 = norm2(r);
      acc += g.weights[i] * g.weights[j] * dot(cross(da, db), r) / (rn2 * std::sqrt(rn2));
    }
  return 0.25 * acc;
}
}  // namespace detail

// Gauss linking integral of two disjoint closed polylines, rounded to the
// nearest integer.
inline IntegerWithDefect linking_number(const Polyline& c1, const Polyline& c2,
                                        double min_dist_threshold = 1e-9) {
  double dmin = 1e300;
  for (size_t i = 0; i < c1.segment_count(); ++i)
    for (size_t j = 0; j < c2.segment_count(); ++j)
      dmin = std::min(dmin, Polyline::seg_seg_dist(c1.segment_a(i), c1.segment_b(i),
                                                   c2.segment_a(j), c2.segment_b(j)));
  if (dmin < min_dist_threshold)
    throw Error(errc::curves_too_close, "minimum distance " + fmt_double(dmin));
  double acc = 0;
  for (size_t i = 0; i < c1.segment_count(); ++i)
    for (size_t j = 0; j < c2.segment_count(); ++j)
      acc += detail::link_pair_integral(c1.segment_a(i), c1.segment_b(i), c2.segment_a(j),
                                        c2.segment_b(j), 0);
  double v = acc / (4 * pi);
  IntegerWithDefect r;
  r.value = std::llround(v);
  r.defect = std::fabs(v - static_cast<double>(r.value));
  if (r.defect > 0.1)
    throw Error(errc::not_near_integer, "linking integral " + fmt_double(v));
  return r;
}

inline IntegerWithDefect linking_number(const ClosedCurve& c1, const ClosedCurve& c2,
                                        int resolution = 1024) {
  return linking_number(to_polyline(c1, resolution), to_polyline(c2, resolution));
}

inline IntegerWithDefect linking_number(const Polyline& c1, const ClosedCurve& c2,
                                        int resolution = 1024) {
  return linking_number(c1, to_polyline(c2, resolution));
}

// ---------------------------------------------------------------------------
// Standard curves.
// ---------------------------------------------------------------------------

inline ClosedCurve make_circle(double R, Vec3 center = {}, CurveOptions opts = {}) {
  if (!(R > 0)) throw Error(errc::validation_failed, "circle radius must be positive");
  TrigSeries x({center.x, R}, {0, 0});
  TrigSeries y({center.y, 0}, {0, R});
  TrigSeries z({center.z}, {0});
  return ClosedCurve(x, y, z, opts);
}

inline ClosedCurve make_ellipse(double a, double b, CurveOptions opts = {}) {
  if (!(a > 0) || !(b > 0)) throw Error(errc::validation_failed, "ellipse axes must be positive");
  TrigSeries x({0, a}, {0, 0});
  TrigSeries y({0, 0}, {0, b});
  TrigSeries z({0}, {0});
  return ClosedCurve(x, y, z, opts);
}

// (p,q) torus knot on the torus of radii (R, r):
//   ((R + r cos qu) cos pu, (R + r cos qu) sin pu, r sin qu).
inline ClosedCurve make_torus_knot(int p, int q, double R, double r, CurveOptions opts = {}) {
  if (p < 1 || q < 1) throw Error(errc::validation_failed, "torus knot windings must be >= 1");
  if (std::gcd(p, q) != 1)
    throw Error(errc::validation_failed,
                "gcd(" + std::to_string(p) + "," + std::to_string(q) + ") != 1: not a knot");
  if (!(r > 0) || !(R > r))
    throw Error(errc::validation_failed, "need 0 < r < R for an embedded torus knot");
  int n = p + q;
  std::vector<double> ax(n + 1, 0.0), bx(n + 1, 0.0), ay(n + 1, 0.0), by(n + 1, 0.0),
      az(n + 1, 0.0), bz(n + 1, 0.0);
  // cos qu cos pu = (cos(p+q)u + cos(p-q)u)/2, etc.
  ax[p] += R;
  by[p] += R;
  ax[p + q] += r / 2;
  by[p + q] += r / 2;
  int m = std::abs(p - q);
  ax[m] += r / 2;
  by[m] += (p >= q ? r / 2 : -r / 2);
  bz[q] += r;
  return ClosedCurve(TrigSeries(ax, bx), TrigSeries(ay, by), TrigSeries(az, bz), opts);
}

inline ClosedCurve make_trefoil(CurveOptions opts = {}) { return make_torus_knot(2, 3, 2.0, 0.5, opts); }

// Figure-eight knot, ((2+cos 2u) cos 3u, (2+cos 2u) sin 3u, sin 4u).
inline ClosedCurve make_figure_eight(CurveOptions opts = {}) {
  std::vector<double> ax(6, 0.0), bx(6, 0.0), ay(6, 0.0), by(6, 0.0), az(6, 0.0), bz(6, 0.0);
  ax[3] = 2.0;
  by[3] = 2.0;
  ax[5] = 0.5;
  by[5] = 0.5;
  ax[1] = 0.5;
  by[1] = 0.5;
  bz[4] = 1.0;
  return ClosedCurve(TrigSeries(ax, bx), TrigSeries(ay, by), TrigSeries(az, bz), opts);
}

}  // namespace knotfield
