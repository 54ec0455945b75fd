#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "helfrich/curvature.hpp"
#include "helfrich/energy.hpp"
#include "helfrich/flow.hpp"
#include "helfrich/mesh.hpp"
#include "helfrich/mesh_io.hpp"
#include "helfrich/params.hpp"
#include "helfrich/sphere_analysis.hpp"
#include "helfrich/sphere_fit.hpp"
#include "helfrich/stability.hpp"

#ifndef HELFRICH_VERSION
#define HELFRICH_VERSION "0.0.0"
#endif

namespace helfrich::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
  CliError(int code, const std::string& what, json diagnostic = nullptr)
      : std::runtime_error(what), code(code), diagnostic(std::move(diagnostic)) {}
  int code;
  json diagnostic;
};

// Everything a run records for its manifests.
struct Run {
  std::string subcommand;
  json echo = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
};

struct ParamFlags {
  std::optional<double> kc, kbar, c0, lambda, p;
  std::string config;
  std::optional<double> geom_eps, root_eps;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json params_json(const ParameterSet& P) {
  return {{"kc", P.kc}, {"kbar", P.kbar}, {"c0", P.c0}, {"lambda", P.lambda}, {"p", P.p}};
}

json read_json_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw CliError(kMissingFile, std::string(what) + " not found: " + path);
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError(kValidation, std::string(what) + " is not valid JSON: " + e.what());
  }
}

ParameterSet resolve_params(const ParamFlags& f, Run& run) {
  ParameterSet P;
  if (!f.config.empty()) {
    const json cfg = read_json_file(f.config, "config");
    if (!cfg.is_object()) throw CliError(kValidation, "config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      if (!value.is_number()) throw CliError(kValidation, "config key '" + key + "' must be a number");
      const double v = value.get<double>();
      if (key == "kc") P.kc = v;
      else if (key == "kbar") P.kbar = v;
      else if (key == "c0") P.c0 = v;
      else if (key == "lambda") P.lambda = v;
      else if (key == "p") P.p = v;
      else throw CliError(kValidation, "unknown config key '" + key + "'");
    }
    run.inputs.push_back(f.config);
  }
  if (f.kc) P.kc = *f.kc;
  if (f.kbar) P.kbar = *f.kbar;
  if (f.c0) P.c0 = *f.c0;
  if (f.lambda) P.lambda = *f.lambda;
  if (f.p) P.p = *f.p;
  if (auto rej = validate(P)) throw CliError(kValidation, rej->reason);
  run.echo["params"] = params_json(P);
  return P;
}

Tolerances resolve_tolerances(const ParamFlags& f, Run& run) {
  Tolerances tol;
  if (f.geom_eps) tol.geom_eps = *f.geom_eps;
  if (f.root_eps) tol.root_eps = *f.root_eps;
  if (auto rej = validate(tol)) throw CliError(kValidation, rej->reason);
  run.echo["tolerances"] = {{"geom_eps", tol.geom_eps}, {"root_eps", tol.root_eps}};
  return tol;
}

TriMesh load_mesh(const std::string& path, Run& run) {
  if (!fs::exists(path)) throw CliError(kMissingFile, "mesh not found: " + path);
  run.inputs.push_back(path);
  run.echo["mesh"] = path;
  return read_mesh(path);
}

void write_text(const std::string& path, const std::string& text, Run& run) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kMissingFile, "cannot write " + path);
  out << text;
  run.outputs.push_back(path);
}

void save_mesh(const std::string& path, const TriMesh& mesh, Run& run) {
  write_mesh(path, mesh);
  run.outputs.push_back(path);
}

// The report goes to --out when given, otherwise to stdout.
void emit(const json& report, const std::string& out_path, std::ostream& out, Run& run) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) out << text;
  else write_text(out_path, text, run);
}

Vec3 parse_vec3(const std::string& s) {
  Vec3 v;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> v.x() >> c1 >> v.y() >> c2 >> v.z()) || c1 != ',' || c2 != ',' || !v.allFinite())
    throw CliError(kValidation, "expected x,y,z but got '" + s + "'");
  return v;
}

HarmonicMode parse_mode(const std::string& s) {
  HarmonicMode m;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> m.l >> c1 >> m.m >> c2 >> m.amplitude) || c1 != ',' || c2 != ',')
    throw CliError(kValidation, "expected --mode l,m,amplitude but got '" + s + "'");
  return m;
}

json solution_json(const ParameterSet& P, const Tolerances& tol) {
  const SphericalSolutionSet s = classify_spheres(P, tol);
  const SphericalSolutionSet lit = literal_theorem_prediction(P, tol);
  json energies = json::array();
  for (double r : s.radii) energies.push_back(sphere_energy_closed_form(r, P));
  json r;
  r["params"] = params_json(P);
  r["verdict"] = to_string(s.verdict);
  r["radii"] = s.radii;
  r["x"] = s.x ? json(*s.x) : json(nullptr);
  r["boundedness"] = to_string(s.boundedness);
  r["literal_theorem_agrees"] = s.literal_theorem_agrees;
  r["literal_verdict"] = to_string(lit.verdict);
  r["literal_radii"] = lit.radii;
  r["energies"] = energies;
  return r;
}

json certificate_json(const ConvexityCertificate& c, const ParameterSet& P, double a0) {
  json trace = json::array();
  for (const auto& t : c.trace)
    trace.push_back({{"s", t.s},
                     {"a", t.coeffs.a},
                     {"b", t.coeffs.b},
                     {"c", t.coeffs.c},
                     {"discriminant", t.discriminant},
                     {"H1", t.h1 ? json(*t.h1) : json(nullptr)}});
  json r;
  r["params"] = params_json(P);
  r["a0"] = a0;
  r["kind"] = to_string(c.kind);
  r["h1_min"] = c.kind == CertificateKind::PositiveLowerBound ? json(c.h1_min) : json(nullptr);
  r["s_at_min"] = c.kind == CertificateKind::PositiveLowerBound ? json(c.s_at_min) : json(nullptr);
  r["grid_points"] = c.grid_points;
  r["grid_self_check"] = c.grid_self_check;
  r["stated_hypotheses_hold"] = stated_certificate_hypotheses(P, a0);
  r["trace"] = trace;
  return r;
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HELFRICH_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

std::vector<double> grid_axis(const json& grid, const char* key, double fallback) {
  if (!grid.contains(key)) return {fallback};
  const json& a = grid.at(key);
  if (!a.is_array() || a.empty()) throw CliError(kValidation, std::string("grid axis '") + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw CliError(kValidation, std::string("grid axis '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string sweep_row(const ParameterSet& P, const Tolerances& tol, std::optional<double> a0) {
  const SphericalSolutionSet s = classify_spheres(P, tol);
  std::string r1, r2, e1, e2;
  if (s.radii.size() >= 1) r1 = num(s.radii[0]), e1 = num(sphere_energy_closed_form(s.radii[0], P));
  if (s.radii.size() >= 2) r2 = num(s.radii[1]), e2 = num(sphere_energy_closed_form(s.radii[1], P));
  std::string row = num(P.c0) + "," + num(P.lambda) + "," + num(P.p) + "," + std::string(to_string(s.verdict)) + "," +
                    r1 + "," + r2 + "," + e1 + "," + e2 + "," + std::string(to_string(s.boundedness)) + "," +
                    (s.literal_theorem_agrees ? "true" : "false");
  if (a0) {
    try {
      const ConvexityCertificate c = mean_convexity_certificate(P, *a0);
      row += "," + std::string(to_string(c.kind)) + ",";
      if (c.kind == CertificateKind::PositiveLowerBound) row += num(c.h1_min);
    } catch (const CertificateGateError& e) {
      row += ",gate: " + e.inequality + ",";
    }
  }
  return row;
}

json mesh_info_json(const TriMesh& mesh) {
  const MeshMeasures m = measures(mesh);
  const CurvatureField f = curvature_field(mesh);
  const SphereFit fit = sphere_fit(mesh);
  json r;
  r["V"] = mesh.num_vertices();
  r["E"] = mesh.num_edges();
  r["F"] = mesh.num_faces();
  r["chi"] = m.chi;
  r["area"] = m.area;
  r["volume"] = m.volume;
  r["Hmin"] = *std::min_element(f.H.begin(), f.H.end());
  r["Hmax"] = *std::max_element(f.H.begin(), f.H.end());
  r["maxAo2"] = *std::max_element(f.Ao2.begin(), f.Ao2.end());
  r["convexity"] = to_string(convexity_class(f));
  r["minFaceQuality"] = min_face_quality(mesh);
  r["sphereFit"] = {{"center", vec_json(fit.center)}, {"radius", fit.radius}, {"rms", fit.rms}};
  return r;
}

std::string trace_csv(const std::vector<FlowStep>& trace) {
  std::string s = "step,energy,gradNorm,maxAo2,fittedRadius,minH\n";
  for (const auto& t : trace)
    s += std::to_string(t.step) + "," + num(t.energy) + "," + num(t.grad_norm) + "," + num(t.max_ao2) + "," +
         num(t.fitted_radius) + "," + num(t.min_h) + "\n";
  return s;
}

json diagnostics_json(const ConvergenceDiagnostics& d) {
  json r;
  r["fittedRadius"] = d.fitted_radius;
  r["rms"] = d.rms;
  r["maxAo2"] = d.max_ao2;
  r["residualSup"] = d.residual_sup;
  r["energy"] = {{"bending", d.energy.bending}, {"area", d.energy.area_term}, {"volume", d.energy.volume_term},
                 {"topological", d.energy.topological}, {"total", d.energy.total}};
  r["convexity"] = to_string(d.convexity);
  r["predictedVerdict"] = to_string(d.predicted.verdict);
  r["predictedRadii"] = d.predicted.radii;
  r["matchedRadius"] = d.matched_radius ? json(*d.matched_radius) : json(nullptr);
  r["relativeGap"] = d.matched_radius ? json(d.relative_gap) : json(nullptr);
  return r;
}

void write_manifests(const Run& run, double seconds) {
  json m;
  m["subcommand"] = run.subcommand;
  m["version"] = HELFRICH_VERSION;
  m["parameters"] = run.echo;
  m["seed"] = run.seed;
  m["inputs"] = run.inputs;
  m["outputs"] = run.outputs;
  m["wallSeconds"] = seconds;
  const std::string text = m.dump(2) + "\n";
  for (const auto& path : run.outputs) {
    std::ofstream out(path + ".manifest.json", std::ios::binary);
    out << text;
  }
}

void add_param_flags(CLI::App* sub, ParamFlags& f) {
  sub->add_option("--kc", f.kc, "bending modulus (> 0, default 1)");
  sub->add_option("--kbar", f.kbar, "Gaussian bending modulus (default 0)");
  sub->add_option("--c0", f.c0, "spontaneous curvature (default 0)");
  sub->add_option("--lambda", f.lambda, "tensile stress (default 0)");
  sub->add_option("--p", f.p, "osmotic pressure difference (default 0)");
  sub->add_option("--config", f.config, "JSON object with any of kc, kbar, c0, lambda, p; flags override it");
  sub->add_option("--geom-eps", f.geom_eps, "relative curvature tolerance");
  sub->add_option("--root-eps", f.root_eps, "root comparison tolerance");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Helfrich membrane numerical lab"};
  app.name(args.empty() ? "helfrich-lab" : fs::path(args[0]).filename().string());
  app.set_version_flag("--version", HELFRICH_VERSION);
  app.require_subcommand(1);

  ParamFlags pf;
  std::string mesh_path, out_path, trace_path, report_path, grid_path, csv_path, center_str = "0,0,0";
  std::optional<double> a0;
  double radius = 1.0;
  int subdiv = 4, grid_points = 10000;
  std::vector<std::string> mode_strs;
  FlowConfig fc;
  std::string direction = "lbfgs";

  auto* classify = app.add_subcommand("classify", "spherical solutions for one parameter set");
  add_param_flags(classify, pf);
  classify->add_option("--out", out_path, "write the JSON report here");

  auto* sweep = app.add_subcommand("sweep", "classification over a parameter grid (CSV)");
  add_param_flags(sweep, pf);
  sweep->add_option("--grid", grid_path, "JSON {\"c0\": [...], \"lambda\": [...], \"p\": [...]}")->required();
  sweep->add_option("--a0", a0, "add mean-convexity certificate columns for this a0");
  sweep->add_option("--out", out_path, "write the CSV here");

  auto* energy = app.add_subcommand("energy", "energy breakdown of a mesh");
  add_param_flags(energy, pf);
  energy->add_option("--mesh", mesh_path, "OBJ or PLY mesh")->required();
  energy->add_option("--out", out_path, "write the JSON report here");

  auto* residual = app.add_subcommand("residual", "Euler-Lagrange residual of a mesh");
  add_param_flags(residual, pf);
  residual->add_option("--mesh", mesh_path, "OBJ or PLY mesh")->required();
  residual->add_option("--out", out_path, "write the JSON report here");
  residual->add_option("--csv", csv_path, "per-vertex residual CSV");

  auto* flow = app.add_subcommand("flow", "gradient flow of the energy");
  add_param_flags(flow, pf);
  flow->add_option("--mesh", mesh_path, "initial OBJ or PLY mesh")->required();
  flow->add_option("--out", out_path, "final mesh");
  flow->add_option("--trace", trace_path, "per-step trace CSV");
  flow->add_option("--report", report_path, "write the JSON summary here");
  flow->add_option("--max-steps", fc.max_steps, "step budget");
  flow->add_option("--initial-step", fc.initial_step, "first steepest-descent trial step");
  flow->add_option("--backtrack", fc.backtrack_factor, "line-search shrink factor in (0,1)");
  flow->add_option("--armijo", fc.armijo_c, "sufficient-decrease constant in (0,1)");
  flow->add_option("--grad-tol", fc.grad_tol, "stop when the area-weighted gradient norm is below this");
  flow->add_option("--remesh-every", fc.remesh_every, "tangential relaxation period (0 = never)");
  flow->add_option("--seed", fc.seed, "recorded in the manifest");
  flow->add_option("--direction", direction, "lbfgs or steepest")->check(CLI::IsMember({"lbfgs", "steepest"}));
  flow->add_option("--lbfgs-memory", fc.lbfgs_memory, "stored correction pairs");
  flow->add_option("--min-quality", fc.min_face_quality, "stop below this face quality");

  auto* perturb = app.add_subcommand("perturb", "sphere perturbed by spherical harmonics");
  perturb->add_option("--r", radius, "base radius")->required();
  perturb->add_option("--mode", mode_strs, "l,m,amplitude (repeatable)");
  perturb->add_option("--subdiv", subdiv, "icosphere subdivisions");
  perturb->add_option("--center", center_str, "x,y,z");
  perturb->add_option("--out", out_path, "mesh path; the spec goes to <out>.spec.json")->required();

  auto* mildness = app.add_subcommand("mildness", "which stability class applies to a surface");
  add_param_flags(mildness, pf);
  mildness->add_option("--mesh", mesh_path, "OBJ or PLY mesh")->required();
  mildness->add_option("--a0", a0, "bound on |A°| for class IV");
  mildness->add_option("--out", out_path, "write the JSON report here");

  auto* certify = app.add_subcommand("certify", "lower bound on H for solutions");
  add_param_flags(certify, pf);
  certify->add_option("--a0", a0, "bound on |A°|")->required();
  certify->add_option("--grid-points", grid_points, "s samples on [0, a0^2]");
  certify->add_option("--out", out_path, "write the JSON report here");

  auto* info = app.add_subcommand("mesh-info", "topology, measures and curvature summary");
  info->add_option("--mesh", mesh_path, "OBJ or PLY mesh")->required();
  info->add_option("--out", out_path, "write the JSON report here");

  auto* ico = app.add_subcommand("icosphere", "write an icosphere mesh");
  ico->add_option("--subdiv", subdiv, "subdivisions (<= 8)");
  ico->add_option("--r", radius, "radius");
  ico->add_option("--center", center_str, "x,y,z");
  ico->add_option("--out", out_path, "mesh path")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::ostringstream ignored;
      app.exit(e, out, ignored);
      return kOk;
    }
    err << e.what() << "\n";
    return kValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run;
  run.subcommand = sub->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  int code = kOk;

  try {
    if (sub == classify) {
      const ParameterSet P = resolve_params(pf, run);
      const Tolerances tol = resolve_tolerances(pf, run);
      emit(solution_json(P, tol), out_path, out, run);

    } else if (sub == sweep) {
      const ParameterSet base = resolve_params(pf, run);
      const Tolerances tol = resolve_tolerances(pf, run);
      const json grid = read_json_file(grid_path, "grid");
      run.inputs.push_back(grid_path);
      if (!grid.is_object()) throw CliError(kValidation, "grid must be a JSON object");
      for (const auto& [key, _] : grid.items())
        if (key != "c0" && key != "lambda" && key != "p") throw CliError(kValidation, "unknown grid axis '" + key + "'");
      if (a0 && !(*a0 > 0.0)) throw CliError(kValidation, "--a0 must be positive");
      const auto c0s = grid_axis(grid, "c0", base.c0);
      const auto lams = grid_axis(grid, "lambda", base.lambda);
      const auto ps = grid_axis(grid, "p", base.p);
      run.echo["grid"] = grid;
      if (a0) run.echo["a0"] = *a0;

      std::vector<ParameterSet> points;
      for (double c0 : c0s)
        for (double lam : lams)
          for (double p : ps) points.push_back({base.kc, base.kbar, c0, lam, p});
      std::vector<std::string> rows(points.size());
      std::atomic<std::size_t> next{0};
      auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < points.size();) rows[i] = sweep_row(points[i], tol, a0);
      };
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < worker_count(points.size()); ++w) pool.emplace_back(work);
        work();
      }
      std::string csv = "c0,lambda,p,verdict,r1,r2,E1,E2,boundedness,literal_agrees";
      if (a0) csv += ",certificate,h1_min";
      csv += "\n";
      for (const auto& r : rows) csv += r + "\n";
      if (out_path.empty()) out << csv;
      else write_text(out_path, csv, run);

    } else if (sub == energy) {
      const ParameterSet P = resolve_params(pf, run);
      const TriMesh mesh = load_mesh(mesh_path, run);
      std::vector<Vec3> grad;
      const EnergyBreakdown e = energy_and_gradient(mesh, P, grad);
      const CurvatureField f = curvature_field(mesh);
      const ResidualField res = el_residual_field(mesh, P);
      const MeshMeasures m = measures(mesh);
      json r;
      r["breakdown"] = {{"bending", e.bending}, {"area", e.area_term}, {"volume", e.volume_term},
                        {"topological", e.topological}, {"total", e.total}};
      r["residual"] = {{"sup", res.sup}, {"l2", res.l2}};
      r["gradNorm"] = area_weighted_norm(grad, f.area);
      r["measures"] = {{"area", m.area}, {"volume", m.volume}, {"chi", m.chi}};
      r["tildeDefect"] = tilde_equivalence_check(mesh, P);
      emit(r, out_path, out, run);

    } else if (sub == residual) {
      const ParameterSet P = resolve_params(pf, run);
      const TriMesh mesh = load_mesh(mesh_path, run);
      const ResidualField res = el_residual_field(mesh, P);
      json r;
      r["sup"] = res.sup;
      r["l2"] = res.l2;
      r["min"] = *std::min_element(res.values.begin(), res.values.end());
      r["max"] = *std::max_element(res.values.begin(), res.values.end());
      r["vertices"] = res.values.size();
      emit(r, out_path, out, run);
      if (!csv_path.empty()) {
        std::string csv = "vertex,x,y,z,residual\n";
        for (std::size_t i = 0; i < res.values.size(); ++i) {
          const Vec3& v = mesh.vertices()[i];
          csv += std::to_string(i) + "," + num(v.x()) + "," + num(v.y()) + "," + num(v.z()) + "," +
                 num(res.values[i]) + "\n";
        }
        write_text(csv_path, csv, run);
      }

    } else if (sub == flow) {
      const ParameterSet P = resolve_params(pf, run);
      const Tolerances tol = resolve_tolerances(pf, run);
      fc.direction = direction == "steepest" ? DescentDirection::Steepest : DescentDirection::Lbfgs;
      if (auto bad = validate(fc)) throw CliError(kValidation, *bad);
      run.seed = fc.seed;
      run.echo["flow"] = {{"max_steps", fc.max_steps}, {"initial_step", fc.initial_step},
                          {"backtrack_factor", fc.backtrack_factor}, {"armijo_c", fc.armijo_c},
                          {"grad_tol", fc.grad_tol}, {"remesh_every", fc.remesh_every},
                          {"seed", fc.seed}, {"direction", direction}, {"lbfgs_memory", fc.lbfgs_memory},
                          {"min_face_quality", fc.min_face_quality}};
      const TriMesh mesh = load_mesh(mesh_path, run);
      if (boundedness_verdict(P, tol) != Boundedness::Plausible)
        err << "warning: functional is unbounded below for these parameters ("
            << to_string(boundedness_verdict(P, tol)) << ")\n";
      const FlowResult res = run_flow(mesh, P, fc);
      const FlowStep& last = res.trace.back();
      json r;
      r["termination"] = to_string(res.termination);
      r["steps"] = last.step;
      r["remeshEvents"] = res.remesh_events;
      r["boundedParameters"] = res.bounded_parameters;
      r["monotone"] = trace_is_monotone(res.trace);
      r["final"] = {{"energy", last.energy}, {"gradNorm", last.grad_norm}, {"maxAo2", last.max_ao2},
                    {"fittedRadius", last.fitted_radius}, {"minH", last.min_h}, {"volume", last.volume}};
      r["diagnostics"] = diagnostics_json(convergence_diagnostics(res.mesh, P, tol));
      if (!out_path.empty()) save_mesh(out_path, res.mesh, run);
      if (!trace_path.empty()) write_text(trace_path, trace_csv(res.trace), run);
      emit(r, report_path, out, run);
      if (res.termination == FlowTermination::MeshDegenerate) {
        err << "flow stopped: mesh quality fell below " << fc.min_face_quality << "\n";
        code = kNumerical;
      }

    } else if (sub == perturb) {
      PerturbationSpec spec;
      spec.radius = radius;
      spec.subdivisions = subdiv;
      for (const auto& s : mode_strs) spec.modes.push_back(parse_mode(s));
      const Vec3 center = parse_vec3(center_str);
      json modes = json::array();
      for (const auto& m : spec.modes) modes.push_back({{"l", m.l}, {"m", m.m}, {"amplitude", m.amplitude}});
      json sj = {{"radius", spec.radius}, {"subdivisions", spec.subdivisions}, {"center", vec_json(center)},
                 {"modes", modes}};
      run.echo["spec"] = sj;
      if (subdiv < 0 || subdiv > 8) throw CliError(kValidation, "--subdiv must be in 0..8");
      const TriMesh mesh = perturb_sphere(spec, center);
      save_mesh(out_path, mesh, run);
      write_text(out_path + ".spec.json", sj.dump(2) + "\n", run);

    } else if (sub == mildness) {
      const ParameterSet P = resolve_params(pf, run);
      const Tolerances tol = resolve_tolerances(pf, run);
      if (a0 && !(*a0 > 0.0)) throw CliError(kValidation, "--a0 must be positive");
      if (a0) run.echo["a0"] = *a0;
      const TriMesh mesh = load_mesh(mesh_path, run);
      const MildnessVerdict v = mildness_class(mesh, P, a0, tol);
      json r;
      r["matched_class"] = to_string(v.matched_class);
      r["details"] = v.details;
      r["averageH"] = v.input.avg_h;
      r["maxAo2"] = v.input.max_ao2;
      r["weaklyConvex"] = v.input.weakly_convex;
      r["weaklyMeanConvex"] = v.input.weakly_mean_convex;
      r["a0"] = a0 ? json(*a0) : json(nullptr);
      emit(r, out_path, out, run);

    } else if (sub == certify) {
      const ParameterSet P = resolve_params(pf, run);
      run.echo["a0"] = *a0;
      run.echo["grid_points"] = grid_points;
      emit(certificate_json(mean_convexity_certificate(P, *a0, grid_points), P, *a0), out_path, out, run);

    } else if (sub == info) {
      emit(mesh_info_json(load_mesh(mesh_path, run)), out_path, out, run);

    } else if (sub == ico) {
      const Vec3 center = parse_vec3(center_str);
      run.echo["icosphere"] = {{"subdivisions", subdiv}, {"radius", radius}, {"center", vec_json(center)}};
      if (subdiv < 0 || subdiv > 8) throw CliError(kValidation, "--subdiv must be in 0..8");
      save_mesh(out_path, make_icosphere(subdiv, radius, center), run);
    }
  } catch (const CliError& e) {
    err << run.subcommand << ": " << e.what() << "\n";
    if (e.code == kNumerical) out << json{{"error", e.what()}, {"diagnostic", e.diagnostic}}.dump(2) << "\n";
    return e.code;
  } catch (const MeshError& e) {
    err << run.subcommand << ": " << e.what() << "\n";
    return e.kind() == MeshError::Kind::Io && !fs::exists(mesh_path) ? kMissingFile : kValidation;
  } catch (const std::invalid_argument& e) {
    err << run.subcommand << ": " << e.what() << "\n";
    return kValidation;
  } catch (const std::domain_error& e) {
    err << run.subcommand << ": " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << run.subcommand << ": numerical failure: " << e.what() << "\n";
    out << json{{"error", "numerical failure"}, {"subcommand", run.subcommand}, {"message", e.what()}}.dump(2)
        << "\n";
    return kNumerical;
  }

  write_manifests(run, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return code;
}

} // namespace helfrich::cli
