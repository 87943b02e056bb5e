// Command-line driver: builds wires of prescribed knot type whose magnetic
// fields carry hyperbolic periodic field lines of prescribed knot type, and
// runs the verification experiments around that construction.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "knotfield/knotfield.hpp"

namespace fs = std::filesystem;
using namespace knotfield;

namespace {

int exit_code_for(errc c) {
  switch (c) {
    case errc::usage:
      return 1;
    case errc::validation_failed:
    case errc::inflection_point:
    case errc::out_of_disk:
    case errc::outside_tube:
    case errc::curves_too_close:
    case errc::radius_too_large:
    case errc::ambiguous_projection:
      return 2;
    default:
      return 3;
  }
}

struct RunContext {
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 1;

  Config cfg;
  void load() {
    cfg = Config::load(config_path);
    fs::create_directories(out_dir);
  }
  std::string path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

  void write_manifest(const std::string& command, const json& extra) const {
    json m;
    m["command"] = command;
    m["config"] = cfg.serialize();
    m["constants"] = extra;
    write_json(path("manifest.json"), m);
  }
};

json knot_verdicts(const AlexanderPoly& p) {
  const std::pair<const char*, AlexanderPoly> table[] = {
      {"unknot", {{1}, 0}},
      {"trefoil", {{1, -1, 1}, -1}},
      {"figure_eight", {{-1, 3, -1}, -1}},
  };
  json v;
  v["polynomial"] = polynomial_to_json(p);
  for (auto& [name, q] : table) {
    AlexanderPoly qq = q;
    if (qq.coeffs.back() < 0)
      for (auto& c : qq.coeffs) c = -c;
    v[std::string("vs_") + name] =
        same_knot_type(p, qq) == KnotVerdict::consistent ? "consistent" : "distinguished";
  }
  return v;
}

void cmd_verify_asymptotics(RunContext& ctx) {
  std::vector<double> eps_list = ctx.cfg.get_list("run.eps_list");
  if (eps_list.empty()) throw Error(errc::usage, "run.eps_list is empty");
  ClosedCurve core = curve_from_config(ctx.cfg, "core");
  AsymptoticsReport rep = run_verify_asymptotics(core, ctx.cfg, eps_list);

  std::ofstream csv(ctx.path("asymptotics.csv"));
  csv << "kind,eps,y_radius,residual,ratio\n";
  for (const auto& r : rep.axis)
    csv << "axis," << fmt_double(r.eps) << ",0," << fmt_double(r.residual) << ','
        << fmt_double(r.ratio) << '\n';
  for (const auto& t : rep.transverse)
    csv << "transverse," << fmt_double(t.eps) << ',' << fmt_double(t.y_radius) << ','
        << fmt_double(t.residual) << ',' << fmt_double(t.C) << '\n';
  csv.close();

  json verdict;
  verdict["axis_bound_ok"] = rep.axis_bound_ok;
  verdict["axis_ratio_two_sided"] = rep.axis_ratio_two_sided;
  verdict["transverse_stable"] = rep.transverse_stable;
  verdict["c_cap"] = rep.c_cap;
  write_json(ctx.path("verdict.json"), verdict);
  ctx.write_manifest("verify-asymptotics", {{"eps_list", eps_list}});
  if (!rep.axis_bound_ok || !rep.transverse_stable)
    throw Error(errc::quadrature_not_converged, "asymptotic verification failed");
}

void cmd_theorem1(RunContext& ctx) {
  ClosedCurve wire_knot = curve_from_config(ctx.cfg, "wire");
  ClosedCurve line_knot = curve_from_config(ctx.cfg, "line");
  Theorem1Params prm;
  prm.eps = ctx.cfg.get_double("run.eps", prm.eps);
  prm.n_wires = static_cast<int>(ctx.cfg.get_int("run.n", prm.n_wires));
  prm.delta = ctx.cfg.get_double("run.delta", prm.delta);
  prm.R = ctx.cfg.get_double("run.R", prm.R);
  prm.delta3 = ctx.cfg.get_double("run.delta3", prm.delta3);
  prm.n_modes = static_cast<int>(ctx.cfg.get_int("run.n_modes", prm.n_modes));
  prm.gate_ratio = ctx.cfg.get_double("run.gate_ratio", prm.gate_ratio);

  Theorem1Result res = run_theorem1(wire_knot, line_knot, ctx.cfg, prm);

  write_polyline_csv(ctx.path("chain.csv"), res.chain);
  write_polyline_csv(ctx.path("wire.csv"), res.final_wire);
  write_polyline_csv(ctx.path("target.csv"), res.placed_target);
  write_orbit_csv(ctx.path("orbit.csv"), res.orbit);
  write_iso_csv(ctx.path("iso.csv"), *res.iso);
  write_json(ctx.path("certificate.json"), certificate_to_json(res.certificate));
  json knots;
  knots["final_wire"] = knot_verdicts(res.wire_polynomial);
  knots["target"] = knot_verdicts(res.target_polynomial);
  knots["chain"] = knot_verdicts(res.chain_polynomial);
  knots["wire_matches_target"] =
      same_knot_type(res.wire_polynomial, res.target_polynomial) == KnotVerdict::consistent;
  write_json(ctx.path("knots.json"), knots);
  ctx.write_manifest("theorem1",
                     {{"eps", prm.eps},
                      {"n", prm.n_wires},
                      {"delta", prm.delta},
                      {"R", prm.R},
                      {"delta3", prm.delta3},
                      {"gate_e_half", res.gate_e_half},
                      {"gate_e_full", res.gate_e_full}});
  if (!res.certificate.confined)
    throw Error(errc::not_a_graph, "periodic line not confined to the working region");
}

void cmd_theorem2(RunContext& ctx) {
  ClosedCurve core = curve_from_config(ctx.cfg, "core");
  Theorem2Params prm;
  prm.eps = ctx.cfg.get_double("run.eps", prm.eps);
  prm.n_list.clear();
  for (double v : ctx.cfg.get_list("run.n_list", {16, 32, 64}))
    prm.n_list.push_back(static_cast<int>(v));
  prm.n_modes = static_cast<int>(ctx.cfg.get_int("run.n_modes", prm.n_modes));

  Theorem2Result res = run_theorem2(core, ctx.cfg, prm);

  write_polyline_csv(ctx.path("cable.csv"), res.cable);
  write_orbit_csv(ctx.path("orbit.csv"), res.orbit);
  write_json(ctx.path("certificate.json"), certificate_to_json(res.certificate));
  std::ofstream csv(ctx.path("cable_table.csv"));
  csv << "n,linking,offset,hausdorff,hausdorff_allowance,tangent_defect\n";
  for (const auto& r : res.rows)
    csv << r.n << ',' << r.linking << ',' << r.offset << ',' << fmt_double(r.hausdorff) << ','
        << fmt_double(r.hausdorff_allowance) << ',' << fmt_double(r.tangent_defect) << '\n';
  csv.close();
  json knots;
  knots["cable"] = knot_verdicts(res.cable_polynomial);
  knots["core"] = knot_verdicts(res.core_polynomial);
  knots["cable_matches_core"] =
      same_knot_type(res.cable_polynomial, res.core_polynomial) == KnotVerdict::consistent;
  knots["offset_constant"] = res.offset_constant;
  knots["line_core_distance"] = res.line_core_distance;
  write_json(ctx.path("knots.json"), knots);
  ctx.write_manifest("theorem2", {{"eps", prm.eps}, {"n_list", prm.n_list}});
  if (!res.offset_constant)
    throw Error(errc::not_near_integer, "cable-core linking offset drifted across n");
}

void cmd_sweep(RunContext& ctx) {
  ClosedCurve core = curve_from_config(ctx.cfg, "core");
  double eps = ctx.cfg.get_double("run.eps", 0.05);
  std::vector<int> n_list;
  for (double v : ctx.cfg.get_list("run.n_list", {8, 16, 32, 64}))
    n_list.push_back(static_cast<int>(v));
  bool with_c1 = ctx.cfg.get_bool("run.with_c1", false);
  TubeChart chart(core, eps);
  SurfaceCurrent sc = current_from_config(ctx.cfg, chart);
  auto iso = std::make_shared<IsoChart>(sc, static_cast<int>(ctx.cfg.get_int("run.iso_grid", 128)));
  EvaluationRegion K = annulus_region(chart, 0.02, 0.05, 8, 4, 2);
  SweepResult res = run_sweep(iso, n_list, K, with_c1);

  std::ofstream csv(ctx.path("sweep.csv"));
  csv << "n,E_collection,E_cable,E_collection_c1,E_cable_c1\n";
  for (const auto& r : res.rows)
    csv << r.n << ',' << fmt_double(r.e_collection) << ',' << fmt_double(r.e_cable) << ','
        << fmt_double(r.e_collection_c1) << ',' << fmt_double(r.e_cable_c1) << '\n';
  csv.close();
  json verdict;
  if (res.rows.size() >= 2) {
    verdict["decreasing"] = res.decreasing;
    verdict["halved"] = res.halved;
  } else {
    verdict["verdict"] = "single n: no convergence verdict";
  }
  write_json(ctx.path("verdict.json"), verdict);
  ctx.write_manifest("sweep-convergence", {{"eps", eps}, {"n_list", n_list}});
}

void cmd_trace(RunContext& ctx) {
  std::string source = ctx.cfg.get_string("trace.source", "curve");
  FieldHandle field;
  if (source == "wire_csv") {
    field = FieldHandle::wire(
        std::make_shared<Polyline>(read_polyline_csv(ctx.cfg.get_string("trace.path"))));
  } else if (source == "curve") {
    field = FieldHandle::wire(std::make_shared<ClosedCurve>(curve_from_config(ctx.cfg, "core")));
  } else if (source == "current") {
    ClosedCurve core = curve_from_config(ctx.cfg, "core");
    double eps = ctx.cfg.get_double("run.eps", 0.05);
    field = FieldHandle::surface(std::make_shared<SurfaceCurrent>(
        current_from_config(ctx.cfg, TubeChart(core, eps))));
  } else {
    throw Error(errc::usage, "trace.source must be wire_csv, curve, or current");
  }
  auto seed = ctx.cfg.get_list("trace.seed");
  if (seed.size() != 3) throw Error(errc::usage, "trace.seed must be x,y,z");
  double length = ctx.cfg.get_double("trace.length", 10.0);
  double tol = ctx.cfg.get_double("trace.tol", 1e-10);
  double max_step = ctx.cfg.get_double("trace.max_step", 0.0);
  Polyline tr = trace_field_line(field, {seed[0], seed[1], seed[2]}, length, tol, nullptr,
                                 max_step);
  write_polyline_csv(ctx.path("trace.csv"), tr);
  ctx.write_manifest("trace", {{"length", length}, {"tol", tol}});
}

void cmd_knot_id(RunContext& ctx) {
  Polyline p = read_polyline_csv(ctx.cfg.get_string("input.polyline"));
  KnotDiagram d = project_diagram(p);
  AlexanderPoly poly = alexander_polynomial(d);
  json out;
  out["diagram"] = diagram_to_json(d);
  out["identification"] = knot_verdicts(poly);
  write_json(ctx.path("knot.json"), out);
  ctx.write_manifest("knot-id", {{"crossings", d.crossings}});
}

void cmd_export_tube(RunContext& ctx) {
  ClosedCurve core = curve_from_config(ctx.cfg, "core");
  double eps = ctx.cfg.get_double("run.eps", 0.05);
  int ns = static_cast<int>(ctx.cfg.get_int("grid.ns", 256));
  int ntheta = static_cast<int>(ctx.cfg.get_int("grid.ntheta", 64));
  TubeChart chart(core, eps);
  write_tube_mesh_csv(ctx.path("tube.csv"), chart, ns, ntheta);
  ctx.write_manifest("export-tube", {{"eps", eps}, {"ns", ns}, {"ntheta", ntheta}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wires of prescribed knot type with prescribed magnetic lines"};
  app.require_subcommand(1);
  RunContext ctx;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ctx.config_path, "configuration file")->required();
    sub->add_option("--out", ctx.out_dir, "output directory");
    sub->add_option("--jobs", ctx.jobs, "worker budget for independent cells");
  };
  std::map<std::string, void (*)(RunContext&)> handlers;
  for (auto& [name, desc, fn] :
       std::vector<std::tuple<std::string, std::string, void (*)(RunContext&)>>{
           {"verify-asymptotics", "thin-tube field asymptotics across an eps grid",
            cmd_verify_asymptotics},
           {"theorem1", "wire of one knot type with a magnetic line of another",
            cmd_theorem1},
           {"theorem2", "cable wire close to a knot with a magnetic line of its type",
            cmd_theorem2},
           {"sweep-convergence", "wire-to-surface-current field convergence table", cmd_sweep},
           {"trace", "trace a magnetic field line", cmd_trace},
           {"knot-id", "identify a closed polyline by its knot invariants", cmd_knot_id},
           {"export-tube", "export the tube surface mesh", cmd_export_tube}}) {
    add_common(app.add_subcommand(name, desc));
    handlers[name] = fn;
  }

  CLI11_PARSE(app, argc, argv);
  std::string picked = app.get_subcommands().front()->get_name();
  try {
    ctx.load();
    handlers[picked](ctx);
  } catch (const Error& e) {
    json err{{"error", errc_name(e.code())}, {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    json err{{"error", "Unexpected"}, {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 3;
  }
  return 0;
}
