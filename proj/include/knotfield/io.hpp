#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "current.hpp"
#include "curve.hpp"
#include "dynamics.hpp"
#include "knots.hpp"
#include "tube.hpp"

namespace knotfield {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV formats. All numbers are written with "%.17g" so that identical runs
// produce byte-identical files.
// ---------------------------------------------------------------------------

inline void write_polyline_csv(const std::string& path, const Polyline& p) {
  std::ofstream f(path);
  if (!f) throw Error(errc::usage, "cannot open " + path);
  f << "s,x,y,z\n";
  const auto& pts = p.points();
  double s = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) s += dist(pts[i - 1], pts[i]);
    f << fmt_double(s) << ',' << fmt_double(pts[i].x) << ',' << fmt_double(pts[i].y) << ','
      << fmt_double(pts[i].z) << '\n';
  }
  if (p.closed() && !pts.empty()) {
    s += dist(pts.back(), pts.front());
    f << fmt_double(s) << ',' << fmt_double(pts[0].x) << ',' << fmt_double(pts[0].y) << ','
      << fmt_double(pts[0].z) << '\n';
  }
}

inline Polyline read_polyline_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(errc::usage, "cannot open " + path);
  std::string line;
  std::getline(f, line);  // header
  std::vector<Vec3> pts;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double s, x, y, z;
    if (ss >> s >> x >> y >> z) pts.push_back({x, y, z});
  }
  bool closed = pts.size() > 2 && dist(pts.front(), pts.back()) < 1e-12;
  if (closed) pts.pop_back();
  return Polyline(std::move(pts), closed);
}

inline void write_field_samples_csv(const std::string& path, const std::vector<Vec3>& points,
                                    const std::vector<Vec3>& values) {
  std::ofstream f(path);
  if (!f) throw Error(errc::usage, "cannot open " + path);
  f << "x,y,z,Bx,By,Bz\n";
  for (size_t i = 0; i < points.size(); ++i)
    f << fmt_double(points[i].x) << ',' << fmt_double(points[i].y) << ','
      << fmt_double(points[i].z) << ',' << fmt_double(values[i].x) << ','
      << fmt_double(values[i].y) << ',' << fmt_double(values[i].z) << '\n';
}

inline void write_tube_mesh_csv(const std::string& path, const TubeChart& chart, int ns,
                                int ntheta) {
  std::ofstream f(path);
  if (!f) throw Error(errc::usage, "cannot open " + path);
  f << "s,theta,x,y,z\n";
  double L = chart.core().length();
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ntheta; ++j) {
      double s = i * L / ns, th = j * two_pi / ntheta;
      Vec3 p = chart.surface_point(s, th);
      f << fmt_double(s) << ',' << fmt_double(th) << ',' << fmt_double(p.x) << ','
        << fmt_double(p.y) << ',' << fmt_double(p.z) << '\n';
    }
}

inline void write_iso_csv(const std::string& path, const IsoChart& ic) {
  std::ofstream f(path);
  if (!f) throw Error(errc::usage, "cannot open " + path);
  f << "alpha,T,Ttilde,B,rho_cdf\n";
  int n = ic.grid_size();
  for (int i = 0; i < n; ++i) {
    double a = static_cast<double>(i) / n;
    f << fmt_double(a) << ',' << fmt_double(ic.T(a)) << ',' << fmt_double(ic.Ttilde(a)) << ','
      << fmt_double(ic.Bdens(a)) << ',' << fmt_double(ic.cdf_rho(a)) << '\n';
  }
}

inline void write_orbit_csv(const std::string& path, const PeriodicOrbit& orbit, int n = 512) {
  std::ofstream f(path);
  if (!f) throw Error(errc::usage, "cannot open " + path);
  f << "s,y1,y2,x,y,z\n";
  double L = orbit.chart->core().length();
  for (int i = 0; i <= n; ++i) {
    double s = wrap(i * L / n, L * (1 + 1e-15));
    double a = orbit.y1.eval(s), b = orbit.y2.eval(s);
    Vec3 p = orbit.chart->embed(s, a, b);
    f << fmt_double(s) << ',' << fmt_double(a) << ',' << fmt_double(b) << ',' << fmt_double(p.x)
      << ',' << fmt_double(p.y) << ',' << fmt_double(p.z) << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON formats.
// ---------------------------------------------------------------------------

inline json curve_to_json(const ClosedCurve& c) {
  json j;
  j["kind"] = "harmonics";
  j["orientation"] = c.orientation();
  auto pack = [](const TrigSeries& t) {
    json arr = json::array();
    for (size_t k = 0; k < t.cos_coeffs().size(); ++k)
      arr.push_back({t.cos_coeffs()[k], t.sin_coeffs()[k]});
    return arr;
  };
  j["harmonics"] = {pack(c.series_x()), pack(c.series_y()), pack(c.series_z())};
  return j;
}

inline ClosedCurve curve_from_json(const json& j) {
  std::string kind = j.value("kind", "harmonics");
  CurveOptions opts;
  opts.orientation = j.value("orientation", 1);
  if (kind == "circle") return make_circle(j.value("R", 1.0), {}, opts);
  if (kind == "ellipse") return make_ellipse(j.value("a", 2.0), j.value("b", 1.0), opts);
  if (kind == "torus_knot")
    return make_torus_knot(j.value("p", 2), j.value("q", 3), j.value("R", 2.0),
                           j.value("r", 0.5), opts);
  if (kind == "figure_eight") return make_figure_eight(opts);
  if (kind == "trefoil") return make_trefoil(opts);
  if (kind != "harmonics") throw Error(errc::usage, "unknown curve kind " + kind);
  auto unpack = [&](const json& arr) {
    std::vector<double> a, b;
    for (const auto& pair : arr) {
      a.push_back(pair.at(0).get<double>());
      b.push_back(pair.at(1).get<double>());
    }
    return TrigSeries(a, b);
  };
  const json& h = j.at("harmonics");
  return ClosedCurve(unpack(h.at(0)), unpack(h.at(1)), unpack(h.at(2)), opts);
}

inline json certificate_to_json(const OrbitCertificate& c) {
  return json{{"confined", c.confined},       {"sup_y", c.sup_y},
              {"C_measured", c.C_measured},   {"lambda_plus", c.lambda_plus},
              {"lambda_minus", c.lambda_minus}, {"residual", c.residual},
              {"s_winding", c.s_winding}};
}

inline json polynomial_to_json(const AlexanderPoly& p) {
  return json{{"coefficients", p.coeffs}, {"min_exponent", p.min_exp}, {"display", p.str()}};
}

inline json diagram_to_json(const KnotDiagram& d) {
  json ev = json::array();
  for (const auto& e : d.events)
    ev.push_back({{"id", e.id}, {"over", e.over}, {"sign", e.sign}, {"t", e.t}});
  json code = json::array();
  for (const auto& c : d.canonical_code()) code.push_back({c[0], c[1], c[2]});
  return json{{"crossings", d.crossings}, {"events", ev}, {"gauss_code", code}};
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error(errc::usage, "cannot open " + path);
  f << j.dump(2) << '\n';
}

}  // namespace knotfield
