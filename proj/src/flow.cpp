#include "helfrich/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <unordered_map>

#include "helfrich/sphere_fit.hpp"

namespace helfrich {

namespace {

using Field = std::vector<Vec3>;

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
  return s;
}

void axpy(double alpha, const Field& x, Field& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Field difference(const Field& a, const Field& b) {
  Field d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

struct Pair {
  Field s, y;
  double rho;
};

// Two-loop recursion with initial inverse Hessian gamma * M^{-1}.
Field lbfgs_direction(const Field& g, const std::deque<Pair>& memory, const std::vector<double>& area) {
  Field q = g;
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    alpha[k] = memory[k].rho * dot(memory[k].s, q);
    axpy(-alpha[k], memory[k].y, q);
  }
  double gamma = 1.0;
  if (!memory.empty()) {
    const Pair& last = memory.back();
    double yMy = 0.0;
    for (std::size_t i = 0; i < area.size(); ++i) yMy += last.y[i].squaredNorm() / area[i];
    gamma = dot(last.s, last.y) / yMy;
  }
  for (std::size_t i = 0; i < q.size(); ++i) q[i] *= gamma / area[i];
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const double beta = memory[k].rho * dot(memory[k].y, q);
    axpy(alpha[k] - beta, memory[k].s, q);
  }
  for (Vec3& v : q) v = -v;
  return q;
}

struct State {
  TriMesh mesh;
  double energy;
  Field gradient;
  CurvatureField field;
};

State evaluate(const TriMesh& mesh, const ParameterSet& params) {
  Field g;
  const double e = energy_and_gradient(mesh, params, g).total;
  return State{mesh, e, std::move(g), curvature_field(mesh)};
}

FlowStep record(int step, const State& s, double step_size, bool remeshed) {
  FlowStep r;
  r.step = step;
  r.energy = s.energy;
  r.grad_norm = area_weighted_norm(s.gradient, s.field.area);
  r.max_ao2 = *std::max_element(s.field.Ao2.begin(), s.field.Ao2.end());
  r.min_h = *std::min_element(s.field.H.begin(), s.field.H.end());
  r.fitted_radius = sphere_fit(s.mesh).radius;
  r.volume = signed_volume(s.mesh);
  r.step_size = step_size;
  r.remeshed = remeshed;
  return r;
}

std::optional<TriMesh> try_move(const TriMesh& mesh, const Field& dir, double t) {
  std::vector<Vec3> x = mesh.vertices();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * dir[i];
  try {
    return mesh.with_vertices(std::move(x));
  } catch (const MeshError&) {
    return std::nullopt;
  }
}

} // namespace

std::optional<std::string> validate(const FlowConfig& c) {
  if (c.max_steps < 0) return "max_steps must be >= 0";
  if (!(c.initial_step > 0.0)) return "initial_step must be > 0";
  if (!(c.backtrack_factor > 0.0 && c.backtrack_factor < 1.0)) return "backtrack_factor must be in (0,1)";
  if (!(c.armijo_c > 0.0 && c.armijo_c < 1.0)) return "armijo_c must be in (0,1)";
  if (!(c.grad_tol > 0.0)) return "grad_tol must be > 0";
  if (c.remesh_every < 0) return "remesh_every must be >= 0";
  if (c.lbfgs_memory < 1) return "lbfgs_memory must be >= 1";
  if (!(c.min_face_quality >= 0.0 && c.min_face_quality < 1.0)) return "min_face_quality must be in [0,1)";
  if (!(c.divergence_volume_ratio > 1.0)) return "divergence_volume_ratio must be > 1";
  return std::nullopt;
}

std::string_view to_string(FlowTermination t) {
  switch (t) {
  case FlowTermination::Converged: return "Converged";
  case FlowTermination::MaxSteps: return "MaxSteps";
  case FlowTermination::MeshDegenerate: return "MeshDegenerate";
  case FlowTermination::EnergyDiverging: return "EnergyDiverging";
  case FlowTermination::Stalled: return "Stalled";
  }
  return "?";
}

FlowResult run_flow(const TriMesh& mesh, const ParameterSet& params, const FlowConfig& config) {
  if (auto err = validate(config)) throw std::invalid_argument("run_flow: " + *err);
  if (auto rej = validate(params)) throw std::invalid_argument("run_flow: " + rej->reason);

  State cur = evaluate(mesh, params);
  FlowResult result{cur.mesh, {}, FlowTermination::MaxSteps, 0,
                    boundedness_verdict(params) == Boundedness::Plausible};
  result.trace.push_back(record(0, cur, 0.0, false));
  const double volume0 = result.trace.front().volume;
  const double energy0 = cur.energy;
  const int remesh_cutoff = config.max_steps - config.max_steps / 10;

  std::deque<Pair> memory;
  double steepest_step = config.initial_step;

  for (int step = 1; step <= config.max_steps; ++step) {
    const FlowStep& last = result.trace.back();
    if (last.grad_norm < config.grad_tol) {
      result.termination = FlowTermination::Converged;
      break;
    }
    if (last.volume > config.divergence_volume_ratio * volume0 && cur.energy < energy0) {
      result.termination = FlowTermination::EnergyDiverging;
      break;
    }

    bool use_lbfgs = config.direction == DescentDirection::Lbfgs && !memory.empty();
    std::optional<State> next;
    double accepted_t = 0.0;
    for (int attempt = 0; attempt < 2 && !next; ++attempt) {
      Field dir;
      if (use_lbfgs) {
        dir = lbfgs_direction(cur.gradient, memory, cur.field.area);
      } else {
        dir.resize(cur.gradient.size());
        for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = -cur.gradient[i] / cur.field.area[i];
      }
      double slope = dot(cur.gradient, dir);
      if (!(slope < 0.0)) {
        memory.clear();
        use_lbfgs = false;
        continue;
      }
      double t = use_lbfgs ? 1.0 : steepest_step;
      for (int bt = 0; bt < 80; ++bt, t *= config.backtrack_factor) {
        auto trial = try_move(cur.mesh, dir, t);
        if (!trial) continue;
        const double e = helfrich_energy(*trial, params).total;
        if (e < cur.energy && e <= cur.energy + config.armijo_c * t * slope) {
          next = evaluate(*trial, params);
          accepted_t = t;
          break;
        }
      }
      if (!next) {
        // Quasi-Newton model went stale; retry along the plain gradient.
        memory.clear();
        use_lbfgs = false;
      }
    }
    if (!next) {
      result.termination = FlowTermination::Stalled;
      break;
    }
    if (!use_lbfgs) steepest_step = std::min(accepted_t * 2.0, 1e6 * config.initial_step);

    if (min_face_quality(next->mesh) < config.min_face_quality) {
      result.termination = FlowTermination::MeshDegenerate;
      break;
    }

    Pair pr{difference(next->mesh.vertices(), cur.mesh.vertices()),
            difference(next->gradient, cur.gradient), 0.0};
    const double sy = dot(pr.s, pr.y);
    if (sy > 1e-14 * std::sqrt(dot(pr.s, pr.s) * dot(pr.y, pr.y))) {
      pr.rho = 1.0 / sy;
      memory.push_back(std::move(pr));
      if (static_cast<int>(memory.size()) > config.lbfgs_memory) memory.pop_front();
    }
    cur = std::move(*next);
    result.trace.push_back(record(step, cur, accepted_t, false));

    if (config.remesh_every > 0 && step % config.remesh_every == 0 && step < remesh_cutoff) {
      cur = evaluate(tangential_relaxation(cur.mesh).mesh, params);
      memory.clear();
      ++result.remesh_events;
      result.trace.push_back(record(step, cur, 0.0, true));
    }
  }
  if (result.termination == FlowTermination::MaxSteps &&
      result.trace.back().grad_norm < config.grad_tol)
    result.termination = FlowTermination::Converged;
  result.mesh = cur.mesh;
  return result;
}

bool trace_is_monotone(const std::vector<FlowStep>& trace, double slack) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k].remeshed) continue;
    if (trace[k].energy > trace[k - 1].energy + slack * (1.0 + std::abs(trace[k - 1].energy)))
      return false;
  }
  return true;
}

namespace {

// Edge flip pass. Faces (a,b,c) and (b,a,d) sharing edge a-b become
// (a,d,c) and (b,c,d) when the angles opposite a-b sum above pi.
std::vector<Face> flip_non_delaunay(const std::vector<Vec3>& x, std::vector<Face> faces,
                                    std::size_t num_vertices, int& flips, int& skipped) {
  auto key = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  std::unordered_map<std::uint64_t, int> owner; // directed edge -> face
  std::vector<int> valence(num_vertices, 0);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      owner[key(faces[f][k], faces[f][(k + 1) % 3])] = static_cast<int>(f);
      ++valence[faces[f][k]];
    }
  }
  const auto angle = [&](int apex, int u, int v) {
    const Vec3 a = x[u] - x[apex], b = x[v] - x[apex];
    return std::atan2(a.cross(b).norm(), a.dot(b));
  };
  const auto third = [](const Face& f, int a, int b) {
    for (int v : f)
      if (v != a && v != b) return v;
    return -1;
  };

  const std::size_t nf = faces.size();
  for (std::size_t f1 = 0; f1 < nf; ++f1) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f1][k], b = faces[f1][(k + 1) % 3];
      if (a > b) continue;
      const auto it = owner.find(key(b, a));
      if (it == owner.end()) continue;
      const int f2 = it->second;
      const int c = third(faces[f1], a, b), d = third(faces[f2], a, b);
      if (angle(c, a, b) + angle(d, a, b) <= std::numbers::pi + 1e-12) continue;
      if (c == d || owner.count(key(c, d)) || owner.count(key(d, c)) || valence[a] <= 3 ||
          valence[b] <= 3) {
        ++skipped;
        continue;
      }
      const Face n1 = {a, d, c}, n2 = {b, c, d};
      const Vec3 old_n = (x[b] - x[a]).cross(x[c] - x[a]) + (x[a] - x[b]).cross(x[d] - x[b]);
      const Vec3 m1 = (x[d] - x[a]).cross(x[c] - x[a]), m2 = (x[c] - x[b]).cross(x[d] - x[b]);
      if (m1.dot(old_n) <= 0.0 || m2.dot(old_n) <= 0.0) {
        ++skipped;
        continue;
      }
      for (int j = 0; j < 3; ++j) {
        owner.erase(key(faces[f1][j], faces[f1][(j + 1) % 3]));
        owner.erase(key(faces[f2][j], faces[f2][(j + 1) % 3]));
      }
      faces[f1] = n1;
      faces[f2] = n2;
      for (int j = 0; j < 3; ++j) {
        owner[key(n1[j], n1[(j + 1) % 3])] = static_cast<int>(f1);
        owner[key(n2[j], n2[(j + 1) % 3])] = f2;
      }
      --valence[a];
      --valence[b];
      ++valence[c];
      ++valence[d];
      ++flips;
      break; // face f1 changed; its remaining edges are revisited next pass
    }
  }
  return faces;
}

} // namespace

RelaxationResult tangential_relaxation(const TriMesh& mesh, bool flip_edges) {
  const auto& x = mesh.vertices();
  const CurvatureField field = curvature_field(mesh);
  const double cap = 0.1 * mesh.mean_edge_length();

  std::vector<Vec3> moved = x;
  double max_disp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec3 centroid = Vec3::Zero();
    double weight = 0.0;
    for (int f : mesh.vertex_faces()[i]) {
      const Face& t = mesh.faces()[f];
      const double a = mesh.face_area(f);
      centroid += a * (x[t[0]] + x[t[1]] + x[t[2]]) / 3.0;
      weight += a;
    }
    Vec3 disp = centroid / weight - x[i];
    disp -= disp.dot(field.normal[i]) * field.normal[i];
    const double len = disp.norm();
    if (len > cap) disp *= cap / len;
    moved[i] += disp;
    max_disp = std::max(max_disp, disp.norm());
  }

  RelaxationResult out{mesh.with_vertices(moved), max_disp, 0, 0};
  if (flip_edges) {
    std::vector<Face> faces =
        flip_non_delaunay(moved, mesh.faces(), moved.size(), out.flips, out.skipped_flips);
    if (out.flips > 0) {
      try {
        out.mesh = TriMesh(moved, std::move(faces));
      } catch (const MeshError&) {
        // Keep the smoothed mesh with its original connectivity.
        out.skipped_flips += out.flips;
        out.flips = 0;
      }
    }
  }
  return out;
}

ConvergenceDiagnostics convergence_diagnostics(const TriMesh& mesh, const ParameterSet& params,
                                               const Tolerances& tol) {
  ConvergenceDiagnostics d;
  const SphereFit fit = sphere_fit(mesh);
  const CurvatureField field = curvature_field(mesh);
  d.fitted_radius = fit.radius;
  d.rms = fit.rms;
  d.max_ao2 = *std::max_element(field.Ao2.begin(), field.Ao2.end());
  d.residual_sup = el_residual_field(mesh, params).sup;
  d.energy = helfrich_energy(mesh, params);
  d.convexity = convexity_class(field, tol);
  d.predicted = classify_spheres(params, tol);
  if (d.predicted.verdict == SphereVerdict::AnyRadius) {
    d.matched_radius = fit.radius;
    d.relative_gap = 0.0;
  } else {
    for (double r : d.predicted.radii) {
      const double gap = std::abs(fit.radius - r) / r;
      if (!d.matched_radius || gap < d.relative_gap) {
        d.matched_radius = r;
        d.relative_gap = gap;
      }
    }
  }
  return d;
}

} // namespace helfrich
