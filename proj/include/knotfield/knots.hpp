#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curve.hpp"

namespace knotfield {

// ---------------------------------------------------------------------------
// Crossing diagrams from generic projections of closed polylines.
// ---------------------------------------------------------------------------

struct DiagramEvent {
  int id = 0;       // crossing id
  bool over = false;
  int sign = 0;     // sign(det[t_over, t_under]) in the projection plane
  double t = 0;     // position along the curve (segment index + fraction)
};

struct KnotDiagram {
  Vec3 direction;
  int crossings = 0;
  std::vector<DiagramEvent> events;  // sorted along the curve; two per crossing

  // Gauss code with ids renamed in order of first occurrence, rotated to the
  // lexicographically minimal form so equal diagrams compare equal.
  std::vector<std::array<int, 3>> canonical_code() const {
    size_t n = events.size();
    if (n == 0) return {};
    std::vector<std::array<int, 3>> best;
    for (size_t start = 0; start < n; ++start) {
      std::map<int, int> rename;
      std::vector<std::array<int, 3>> code;
      code.reserve(n);
      for (size_t k = 0; k < n; ++k) {
        const DiagramEvent& e = events[(start + k) % n];
        auto [it, fresh] = rename.try_emplace(e.id, static_cast<int>(rename.size()));
        code.push_back({it->second, e.over ? 1 : 0, e.sign});
      }
      if (best.empty() || code < best) best = std::move(code);
    }
    return best;
  }
};

struct ProjectOptions {
  int max_attempts = 64;
  double angle_tol = 1e-7;   // rejects near-tangent crossings
  double depth_tol = 1e-9;   // rejects strand contacts, relative to scene size
  double merge_tol = 1e-9;   // rejects triple points, relative to scene size
};

namespace detail {

// Deterministic well-spread directions on the sphere (golden-angle spiral,
// offset to avoid axis-aligned degeneracies).
inline Vec3 probe_direction(int k) {
  double golden = pi * (3.0 - std::sqrt(5.0));
  double z = 1.0 - 2.0 * (k + 0.617) / 64.0;
  z = std::clamp(z, -0.99, 0.99);
  double r = std::sqrt(1.0 - z * z);
  double phi = golden * k + 0.2341;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace detail

// Extracts the crossing diagram of a closed polyline along a generic
// direction, probing a deterministic direction sequence until the projection
// passes the transversality checks.
inline KnotDiagram project_diagram(const Polyline& poly, ProjectOptions opts = {}) {
  size_t n = poly.segment_count();
  if (n < 3) throw Error(errc::degenerate_diagram, "too few segments");
  double scene = 0;
  for (const Vec3& p : poly.points()) scene = std::max(scene, norm(p));
  scene = std::max(scene, 1e-12);

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    Vec3 d = detail::probe_direction(attempt);
    Vec3 e1 = normalized(cross(d, std::fabs(d.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
    Vec3 e2 = cross(d, e1);
    struct Seg {
      double x1, y1, x2, y2, z1, z2;
    };
    std::vector<Seg> segs(n);
    double maxlen = 0;
    for (size_t i = 0; i < n; ++i) {
      Vec3 a = poly.segment_a(i), b = poly.segment_b(i);
      segs[i] = {dot(a, e1), dot(a, e2), dot(b, e1), dot(b, e2), dot(a, d), dot(b, d)};
      maxlen = std::max(maxlen, std::hypot(segs[i].x2 - segs[i].x1, segs[i].y2 - segs[i].y1));
    }
    // 2D spatial hash over segment bounding boxes
    double cell = std::max(maxlen, 1e-12 * scene);
    std::multimap<std::pair<long long, long long>, size_t> grid;
    auto cells_of = [&](const Seg& s) {
      long long x0 = static_cast<long long>(std::floor(std::min(s.x1, s.x2) / cell));
      long long x1 = static_cast<long long>(std::floor(std::max(s.x1, s.x2) / cell));
      long long y0 = static_cast<long long>(std::floor(std::min(s.y1, s.y2) / cell));
      long long y1 = static_cast<long long>(std::floor(std::max(s.y1, s.y2) / cell));
      std::vector<std::pair<long long, long long>> out;
      for (long long x = x0; x <= x1; ++x)
        for (long long y = y0; y <= y1; ++y) out.emplace_back(x, y);
      return out;
    };
    for (size_t i = 0; i < n; ++i)
      for (auto c : cells_of(segs[i])) grid.emplace(c, i);

    bool ok = true;
    struct Hit {
      double ti, tj;  // positions along the curve
      size_t si, sj;
      double fi, fj;  // fractions within the segments
      int sign;
      bool i_over;
      double px, py;
    };
    std::vector<Hit> hits;
    std::vector<std::pair<size_t, size_t>> seen;
    for (size_t i = 0; i < n && ok; ++i) {
      std::vector<size_t> cand;
      for (auto c : cells_of(segs[i])) {
        auto [lo, hi] = grid.equal_range(c);
        for (auto it = lo; it != hi; ++it) cand.push_back(it->second);
      }
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      for (size_t j : cand) {
        if (j <= i) continue;
        size_t gap = j - i;
        if (gap <= 1 || gap == n - 1) continue;  // adjacent segments share a vertex
        const Seg &A = segs[i], &B = segs[j];
        double rx = A.x2 - A.x1, ry = A.y2 - A.y1;
        double sx = B.x2 - B.x1, sy = B.y2 - B.y1;
        double den = rx * sy - ry * sx;
        double la = std::hypot(rx, ry), lb = std::hypot(sx, sy);
        double qx = B.x1 - A.x1, qy = B.y1 - A.y1;
        double t = (qx * sy - qy * sx);
        double u = (qx * ry - qy * rx);
        if (std::fabs(den) <= opts.angle_tol * la * lb) {
          // parallel in projection: reject the direction only if they overlap
          if (Polyline::seg_seg_dist({A.x1, A.y1, 0}, {A.x2, A.y2, 0}, {B.x1, B.y1, 0},
                                     {B.x2, B.y2, 0}) < opts.merge_tol * scene) {
            ok = false;
            break;
          }
          continue;
        }
        t /= den;
        u /= den;
        if (t < 0 || t >= 1 || u < 0 || u >= 1) continue;
        // the half-open convention counts vertex hits once; only a crossing
        // within float roundoff of the boundary is ambiguous
        if (std::min({t, 1 - t, u, 1 - u}) < 1e-9) {
          ok = false;
          break;
        }
        double zi = A.z1 + t * (A.z2 - A.z1);
        double zj = B.z1 + u * (B.z2 - B.z1);
        if (std::fabs(zi - zj) < opts.depth_tol * scene) {
          ok = false;
          break;
        }
        bool i_over = zi > zj;
        double cr = den;
        int sign = i_over ? (cr > 0 ? 1 : -1) : (cr > 0 ? -1 : 1);
        hits.push_back({static_cast<double>(i) + t, static_cast<double>(j) + u, i, j, t, u,
                        sign, i_over, A.x1 + t * rx, A.y1 + t * ry});
      }
    }
    if (!ok) continue;
    // triple-point guard: distinct crossings must be separated in the plane
    for (size_t a = 0; a < hits.size() && ok; ++a)
      for (size_t b = a + 1; b < hits.size(); ++b)
        if (std::hypot(hits[a].px - hits[b].px, hits[a].py - hits[b].py) <
            opts.merge_tol * scene) {
          ok = false;
          break;
        }
    if (!ok) continue;

    KnotDiagram dia;
    dia.direction = d;
    dia.crossings = static_cast<int>(hits.size());
    for (size_t k = 0; k < hits.size(); ++k) {
      const Hit& h = hits[k];
      dia.events.push_back({static_cast<int>(k), h.i_over, h.sign, h.ti});
      dia.events.push_back({static_cast<int>(k), !h.i_over, h.sign, h.tj});
    }
    std::sort(dia.events.begin(), dia.events.end(),
              [](const DiagramEvent& a, const DiagramEvent& b) { return a.t < b.t; });
    return dia;
  }
  throw Error(errc::no_generic_direction,
              "no generic projection after " + std::to_string(opts.max_attempts) + " attempts");
}

inline KnotDiagram project_diagram(const ClosedCurve& c, int resolution = 1024,
                                   ProjectOptions opts = {}) {
  return project_diagram(to_polyline(c, resolution), opts);
}

// Greedy Reidemeister I/II reduction on the event sequence. A doubly-linked
// ring with a recheck worklist keeps this near-linear, which matters for the
// chained-wire diagrams (thousands of crossings, almost all bigons).
inline KnotDiagram simplify_diagram(KnotDiagram d) {
  int n = static_cast<int>(d.events.size());
  if (n == 0) return d;
  std::vector<int> nxt(n), prv(n);
  std::vector<char> alive(n, 1);
  for (int i = 0; i < n; ++i) {
    nxt[i] = (i + 1) % n;
    prv[i] = (i + n - 1) % n;
  }
  // the two event slots of each crossing id
  std::map<int, std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i) {
    auto [it, fresh] = slots.try_emplace(d.events[i].id, std::pair<int, int>{i, -1});
    if (!fresh) it->second.second = i;
  }
  int alive_count = n;
  auto other_slot = [&](int i) {
    auto [a, b] = slots.at(d.events[i].id);
    return a == i ? b : a;
  };
  std::vector<int> work;
  for (int i = 0; i < n; ++i) work.push_back(i);
  auto remove_event = [&](int i) {
    alive[i] = 0;
    --alive_count;
    nxt[prv[i]] = nxt[i];
    prv[nxt[i]] = prv[i];
  };
  while (!work.empty()) {
    int i = work.back();
    work.pop_back();
    if (!alive[i] || alive_count < 2) continue;
    int j = nxt[i];
    if (!alive[j] || j == i) continue;
    const DiagramEvent &a = d.events[i], &b = d.events[j];
    if (a.id == b.id) {
      // R1: both passes adjacent
      int pi = prv[i], nj = nxt[j];
      remove_event(i);
      remove_event(j);
      d.crossings -= 1;
      if (alive_count > 0) {
        work.push_back(pi);
        work.push_back(nj);
      }
      continue;
    }
    if (a.over && b.over) {
      // R2 candidate: find the matching adjacent under-under pair
      int iu = other_slot(i), ju = other_slot(j);
      if (alive[iu] && alive[ju] && (nxt[iu] == ju || nxt[ju] == iu)) {
        int around[4] = {prv[i], nxt[j], alive[iu] ? prv[iu] : 0, alive[ju] ? nxt[ju] : 0};
        remove_event(i);
        remove_event(j);
        remove_event(iu);
        remove_event(ju);
        d.crossings -= 2;
        if (alive_count > 0)
          for (int w : around)
            if (alive[w]) work.push_back(w);
        continue;
      }
    }
    if (!a.over && !b.over) {
      int io = other_slot(i), jo = other_slot(j);
      if (alive[io] && alive[jo] && (nxt[io] == jo || nxt[jo] == io)) {
        int around[4] = {prv[i], nxt[j], prv[io], nxt[jo]};
        remove_event(i);
        remove_event(j);
        remove_event(io);
        remove_event(jo);
        d.crossings -= 2;
        if (alive_count > 0)
          for (int w : around)
            if (alive[w]) work.push_back(w);
        continue;
      }
    }
  }
  std::vector<DiagramEvent> out;
  for (int i = 0; i < n; ++i)
    if (alive[i]) out.push_back(d.events[i]);
  d.events = std::move(out);
  return d;
}

// ---------------------------------------------------------------------------
// Alexander polynomial.
// ---------------------------------------------------------------------------

// Laurent polynomial with integer coefficients: coeffs[k] multiplies
// t^(min_exp + k).
struct AlexanderPoly {
  std::vector<long long> coeffs{1};
  int min_exp = 0;

  bool operator==(const AlexanderPoly& o) const {
    return coeffs == o.coeffs && min_exp == o.min_exp;
  }

  long long eval_at_1() const {
    long long s = 0;
    for (long long c : coeffs) s += c;
    return s;
  }

  std::string str() const {
    std::string out;
    for (size_t k = 0; k < coeffs.size(); ++k) {
      long long c = coeffs[coeffs.size() - 1 - k];
      int e = min_exp + static_cast<int>(coeffs.size() - 1 - k);
      if (c == 0) continue;
      if (!out.empty()) out += (c > 0 ? " + " : " - ");
      else if (c < 0) out += "-";
      long long a = std::llabs(c);
      std::string term;
      if (a != 1 || e == 0) term += std::to_string(a);
      if (e != 0) {
        if (!term.empty()) term += " ";
        term += "t";
        if (e != 1) term += "^" + std::to_string(e);
      }
      out += term;
    }
    return out.empty() ? "0" : out;
  }
};

namespace detail {

inline long long mod_pow(long long b, long long e, long long p) {
  long long r = 1;
  b %= p;
  while (e) {
    if (e & 1) r = static_cast<__int128>(r) * b % p;
    b = static_cast<__int128>(b) * b % p;
    e >>= 1;
  }
  return r;
}

// Determinant of (M0 + t M1) mod p by evaluation at distinct points and
// Lagrange interpolation; returns coefficient vector of length n+1.
inline std::vector<long long> det_poly_mod(const std::vector<long long>& M0,
                                           const std::vector<long long>& M1, int n, long long p) {
  int npts = n + 1;
  std::vector<long long> xs(npts), ys(npts);
  std::vector<long long> work(n * n);
  for (int k = 0; k < npts; ++k) {
    long long t = k + 2;
    xs[k] = t;
    for (int i = 0; i < n * n; ++i) {
      long long v = (M0[i] + static_cast<__int128>(M1[i]) * t) % p;
      work[i] = (v % p + p) % p;
    }
    // Gaussian elimination mod p
    long long det = 1;
    std::vector<long long> A = work;
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (A[r * n + col] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) {
        det = 0;
        break;
      }
      if (piv != col) {
        for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
        det = p - det;
      }
      long long d = A[col * n + col];
      det = static_cast<__int128>(det) * d % p;
      long long inv = mod_pow(d, p - 2, p);
      for (int r = col + 1; r < n; ++r) {
        long long f = static_cast<__int128>(A[r * n + col]) * inv % p;
        if (!f) continue;
        for (int c = col; c < n; ++c)
          A[r * n + c] = (A[r * n + c] - static_cast<__int128>(f) * A[col * n + c] % p + p) % p;
      }
    }
    ys[k] = det % p;
  }
  // Lagrange interpolation mod p
  std::vector<long long> poly(npts, 0);
  for (int k = 0; k < npts; ++k) {
    // basis polynomial prod_{j != k} (x - xs[j]) / (xs[k] - xs[j])
    std::vector<long long> basis(1, 1);
    long long denom = 1;
    for (int j = 0; j < npts; ++j) {
      if (j == k) continue;
      std::vector<long long> nb(basis.size() + 1, 0);
      for (size_t c = 0; c < basis.size(); ++c) {
        nb[c + 1] = (nb[c + 1] + basis[c]) % p;
        nb[c] = (nb[c] - static_cast<__int128>(basis[c]) * xs[j] % p + p * 2) % p;
      }
      basis = std::move(nb);
      denom = static_cast<__int128>(denom) * ((xs[k] - xs[j]) % p + p) % p;
    }
    long long f = static_cast<__int128>(ys[k]) * mod_pow(denom, p - 2, p) % p;
    for (size_t c = 0; c < basis.size(); ++c)
      poly[c] = (poly[c] + static_cast<__int128>(f) * basis[c]) % p;
  }
  return poly;
}

}  // namespace detail

// Alexander polynomial of a knot diagram, from the crossing relations: the
// determinant of a first minor of the Alexander matrix, normalized to
// symmetric exponents with a positive leading coefficient.
inline AlexanderPoly alexander_polynomial(const KnotDiagram& diagram) {
  KnotDiagram d = simplify_diagram(diagram);
  int c = d.crossings;
  if (c == 0) return AlexanderPoly{{1}, 0};
  if (static_cast<int>(d.events.size()) != 2 * c)
    throw Error(errc::degenerate_diagram, "event/crossing mismatch");

  // arcs between consecutive under-passes; arc k starts at the k-th under event
  std::vector<int> under_order;  // event indices of under events, in order
  for (size_t k = 0; k < d.events.size(); ++k)
    if (!d.events[k].over) under_order.push_back(static_cast<int>(k));
  int narc = static_cast<int>(under_order.size());
  if (narc != c) throw Error(errc::degenerate_diagram, "under-pass count mismatch");

  auto arc_of_position = [&](double t) {
    // arc index containing curve position t: the last under event at or
    // before t, wrapping to the final arc before the first under event
    int best = narc - 1;
    for (int k = 0; k < narc; ++k)
      if (d.events[under_order[k]].t <= t) best = k;
    return best;
  };

  // Arc k runs from under event k to under event k+1; under event k therefore
  // ends arc k-1 and starts arc k.
  std::map<int, int> slot;  // crossing id -> under slot
  for (int k = 0; k < narc; ++k) slot[d.events[under_order[k]].id] = k;
  std::vector<long long> M0(c * c, 0), M1(c * c, 0);
  int row = 0;
  for (auto& [id, k] : slot) {
    int incoming = (k + narc - 1) % narc;
    int outgoing = k;
    // the over event of this crossing
    double t_over = -1;
    int sgn = 0;
    for (const auto& e : d.events)
      if (e.id == id && e.over) {
        t_over = e.t;
        sgn = e.sign;
      }
    int jarc = arc_of_position(t_over);
    // positive: t x_in + (1-t) x_over - x_out = 0
    // negative: x_in + (t-1) x_over - t x_out = 0
    auto add = [&](int col, long long c0, long long c1) {
      M0[row * c + col] += c0;
      M1[row * c + col] += c1;
    };
    if (sgn > 0) {
      add(incoming, 0, 1);
      add(jarc, 1, -1);
      add(outgoing, -1, 0);
    } else {
      add(incoming, 1, 0);
      add(jarc, -1, 1);
      add(outgoing, 0, -1);
    }
    ++row;
  }

  // first minor: drop the last row and column
  int n = c - 1;
  if (n == 0) return AlexanderPoly{{1}, 0};
  std::vector<long long> A0(n * n), A1(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A0[i * n + j] = M0[i * c + j];
      A1[i * n + j] = M1[i * c + j];
    }

  const long long p1 = 2147483629LL, p2 = 2147483587LL;
  std::vector<long long> d1 = detail::det_poly_mod(A0, A1, n, p1);
  std::vector<long long> d2 = detail::det_poly_mod(A0, A1, n, p2);
  // CRT lift with symmetric range
  __int128 P = static_cast<__int128>(p1) * p2;
  long long inv_p1_mod_p2 = detail::mod_pow(p1 % p2, p2 - 2, p2);
  std::vector<long long> coeffs(d1.size());
  for (size_t k = 0; k < d1.size(); ++k) {
    long long r1 = d1[k], r2 = d2[k];
    long long diff = ((r2 - r1) % p2 + p2) % p2;
    long long m = static_cast<__int128>(diff) * inv_p1_mod_p2 % p2;
    __int128 v = static_cast<__int128>(r1) + static_cast<__int128>(m) * p1;
    if (v > P / 2) v -= P;
    coeffs[k] = static_cast<long long>(v);
  }
  // strip zero tails, normalize t-power and sign
  int lo = 0, hi = static_cast<int>(coeffs.size()) - 1;
  while (hi >= 0 && coeffs[hi] == 0) --hi;
  while (lo <= hi && coeffs[lo] == 0) ++lo;
  if (hi < lo) throw Error(errc::degenerate_diagram, "vanishing determinant");
  AlexanderPoly out_poly;
  out_poly.coeffs.assign(coeffs.begin() + lo, coeffs.begin() + hi + 1);
  int deg = static_cast<int>(out_poly.coeffs.size()) - 1;
  if (deg % 2 != 0) {
    // Alexander polynomials of knots have even Laurent breadth; an odd breadth
    // indicates a broken diagram
    throw Error(errc::degenerate_diagram, "odd-breadth determinant");
  }
  out_poly.min_exp = -deg / 2;
  if (out_poly.coeffs.back() < 0)
    for (auto& v : out_poly.coeffs) v = -v;
  if (std::llabs(out_poly.eval_at_1()) != 1)
    throw Error(errc::degenerate_diagram,
                "determinant at t=1 is " + std::to_string(out_poly.eval_at_1()));
  return out_poly;
}

inline AlexanderPoly alexander_polynomial(const Polyline& p, ProjectOptions opts = {}) {
  return alexander_polynomial(project_diagram(p, opts));
}

inline AlexanderPoly alexander_polynomial(const ClosedCurve& c, int resolution = 1024) {
  return alexander_polynomial(project_diagram(c, resolution));
}

// ---------------------------------------------------------------------------
// Invariant comparison. Matching invariants never prove isotopy, so the
// positive verdict only claims consistency.
// ---------------------------------------------------------------------------

enum class KnotVerdict { distinguished, consistent };

inline KnotVerdict same_knot_type(const AlexanderPoly& a, const AlexanderPoly& b) {
  return a == b ? KnotVerdict::consistent : KnotVerdict::distinguished;
}

inline KnotVerdict same_knot_type(const Polyline& c1, const Polyline& c2) {
  return same_knot_type(alexander_polynomial(c1), alexander_polynomial(c2));
}

inline KnotVerdict same_knot_type(const ClosedCurve& c1, const ClosedCurve& c2,
                                  int resolution = 1024) {
  return same_knot_type(alexander_polynomial(c1, resolution),
                        alexander_polynomial(c2, resolution));
}

}  // namespace knotfield
