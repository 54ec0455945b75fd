#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "helfrich/flow.hpp"
#include "helfrich/sphere_fit.hpp"
#include "helfrich/stability.hpp"

using namespace helfrich;
using doctest::Approx;

namespace {

double mean_edge(const TriMesh& m) {
  double sum = 0.0;
  int n = 0;
  for (const auto& f : m.faces())
    for (int k = 0; k < 3; ++k, ++n) sum += (m.vertices()[f[k]] - m.vertices()[f[(k + 1) % 3]]).norm();
  return sum / n;
}

bool volume_nondecreasing(const std::vector<FlowStep>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i].volume < t[i - 1].volume) return false;
  return true;
}

} // namespace

TEST_CASE("config validation") {
  CHECK_FALSE(validate(FlowConfig{}).has_value());
  auto bad = [](auto tweak) {
    FlowConfig c;
    tweak(c);
    return validate(c).has_value();
  };
  CHECK(bad([](FlowConfig& c) { c.max_steps = -1; }));
  CHECK(bad([](FlowConfig& c) { c.initial_step = 0.0; }));
  CHECK(bad([](FlowConfig& c) { c.backtrack_factor = 1.0; }));
  CHECK(bad([](FlowConfig& c) { c.backtrack_factor = 0.0; }));
  CHECK(bad([](FlowConfig& c) { c.armijo_c = 1.0; }));
  CHECK(bad([](FlowConfig& c) { c.grad_tol = 0.0; }));
  CHECK(bad([](FlowConfig& c) { c.remesh_every = -2; }));
  CHECK(bad([](FlowConfig& c) { c.lbfgs_memory = 0; }));
  FlowConfig c;
  c.max_steps = -1;
  CHECK_THROWS_AS(run_flow(make_icosphere(1, 1.0), {1, 0, 0, 0, 0}, c), std::invalid_argument);
}

TEST_CASE("spontaneous curvature flow grows the unit sphere to radius two") {
  FlowConfig c;
  c.max_steps = 500;
  const FlowResult r = run_flow(make_icosphere(3, 1.0), {1, 0, 1, 0, 0}, c);
  CHECK(r.termination == FlowTermination::Converged);
  CHECK(r.trace.back().fitted_radius == Approx(2.0).epsilon(0.01));
  CHECK(std::abs(r.trace.back().energy) < 0.5);
  CHECK(trace_is_monotone(r.trace));
  CHECK(r.trace.front().step == 0);
  CHECK(r.trace.back().step == static_cast<int>(r.trace.size()) - 1);
}

TEST_CASE("steepest direction also descends") {
  FlowConfig c;
  c.max_steps = 300;
  c.direction = DescentDirection::Steepest;
  const FlowResult r = run_flow(make_icosphere(2, 1.0), {1, 0, 1, 0, 0}, c);
  CHECK(trace_is_monotone(r.trace));
  CHECK(r.trace.back().energy < r.trace.front().energy);
  CHECK(r.trace.back().fitted_radius > r.trace.front().fitted_radius);
}

TEST_CASE("unbounded inflation is detected") {
  const ParameterSet P{1, 0, 2, -2, -1};
  FlowConfig c;
  c.max_steps = 500;
  const FlowResult r = run_flow(make_icosphere(3, 2.0), P, c);
  CHECK(r.termination == FlowTermination::EnergyDiverging);
  CHECK_FALSE(r.bounded_parameters);
  CHECK(trace_is_monotone(r.trace));
  CHECK(volume_nondecreasing(r.trace));
  CHECK(r.trace.back().volume > 100 * r.trace.front().volume);
  CHECK(r.trace.back().energy < r.trace.front().energy);
}

TEST_CASE("a stable classified sphere is a fixed point") {
  FlowConfig c;
  c.max_steps = 50;
  const TriMesh start = make_icosphere(3, 2.0);
  const FlowResult r = run_flow(start, {1, 0, 1, 0, 0}, c);
  CHECK(r.termination == FlowTermination::Converged);
  CHECK(std::abs(r.trace.back().fitted_radius - 2.0) < 2e-3);
  CHECK(std::abs(r.trace.back().energy - r.trace.front().energy) < 1e-6);
}

TEST_CASE("radially unstable classified spheres are left by the flow") {
  // lambda = 1, p = -1: E(r) = 8 pi + 4 pi r^2 - 4 pi r^3 / 3 has a maximum at r = 2
  FlowConfig c;
  c.max_steps = 200;
  const FlowResult r = run_flow(perturb_sphere({{{2, 0, 0.05}}, 2.0, 3}), {1, 0, 0, 1, -1}, c);
  CHECK(r.termination != FlowTermination::Converged);
  CHECK(r.trace.back().energy < r.trace.front().energy);
  CHECK(std::abs(r.trace.back().fitted_radius - 2.0) > 0.1);
}

TEST_CASE("two-radius case: the small sphere attracts, the large one repels") {
  const ParameterSet P{1, 0, 2, 0, -0.75};
  FlowConfig c;
  c.max_steps = 2000;
  const FlowResult small = run_flow(make_icosphere(3, 1.2), P, c);
  CHECK(trace_is_monotone(small.trace));
  CHECK(small.trace.back().fitted_radius == Approx(4.0 / 3.0).epsilon(0.02));

  // r = 4 is a radial maximum of the sphere energy; starting outside it the
  // flow inflates instead of settling on it
  c.max_steps = 200;
  const FlowResult large = run_flow(make_icosphere(3, 5.0), P, c);
  MESSAGE("two-basin probe from r = 5 does not reach r = 4: " << to_string(large.termination)
          << ", fitted radius " << large.trace.back().fitted_radius);
  CHECK(large.termination == FlowTermination::EnergyDiverging);
  CHECK(large.trace.back().fitted_radius > 5.0);
}

TEST_CASE("energy trace is rigid-motion equivariant") {
  const TriMesh m = perturb_sphere({{{2, 0, 0.1}, {3, 1, 0.05}}, 1.0, 3});
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.9, Vec3(1, -2, 0.5).normalized()).toRotationMatrix();
  FlowConfig c;
  c.max_steps = 30;
  const FlowResult a = run_flow(m, {1, 0, 1, 0, 0}, c);
  const FlowResult b = run_flow(transformed(m, R, Vec3(1, 2, 3)), {1, 0, 1, 0, 0}, c);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(std::abs(a.trace[k].energy - b.trace[k].energy) <= 1e-8 * std::abs(a.trace[k].energy));
    CHECK(a.trace[k].fitted_radius == Approx(b.trace[k].fitted_radius).epsilon(1e-8));
  }
}

TEST_CASE("runs are deterministic") {
  const TriMesh m = perturb_sphere({{{2, 0, 0.1}}, 1.0, 2});
  FlowConfig c;
  c.max_steps = 40;
  c.remesh_every = 10;
  const FlowResult a = run_flow(m, {1, 0, 1, 0, 0}, c);
  const FlowResult b = run_flow(m, {1, 0, 1, 0, 0}, c);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k].energy == b.trace[k].energy);
  CHECK(a.mesh.vertices() == b.mesh.vertices());
}

TEST_CASE("remesh events are logged and stay out of the final tenth") {
  FlowConfig c;
  c.max_steps = 100;
  c.remesh_every = 10;
  c.grad_tol = 1e-12;
  const FlowResult r = run_flow(perturb_sphere({{{2, 0, 0.1}, {3, 1, 0.05}}, 1.0, 3}), {1, 0, 1, 0, 0}, c);
  CHECK(r.remesh_events > 0);
  int logged = 0;
  for (const auto& s : r.trace) {
    if (!s.remeshed) continue;
    ++logged;
    CHECK(s.step < c.max_steps - c.max_steps / 10);
  }
  CHECK(logged == r.remesh_events);
  CHECK(trace_is_monotone(r.trace));
  CHECK(r.trace.back().energy < r.trace.front().energy);
}

TEST_CASE("mesh quality guard stops the flow") {
  FlowConfig c;
  c.max_steps = 200;
  const TriMesh m = make_icosphere(2, 1.0);
  c.min_face_quality = min_face_quality(m) * 1.0001;
  const FlowResult r = run_flow(m, {1, 0, 1, 0, 0}, c);
  CHECK(r.termination == FlowTermination::MeshDegenerate);
  // the last accepted mesh is kept
  CHECK(min_face_quality(r.mesh) >= min_face_quality(m) * 0.999);
}

TEST_CASE("monotonicity helper") {
  std::vector<FlowStep> t(3);
  t[0].energy = 3, t[1].energy = 2, t[2].energy = 2.5;
  CHECK_FALSE(trace_is_monotone(t));
  t[2].remeshed = true;
  CHECK(trace_is_monotone(t));
}

TEST_CASE("tangential relaxation") {
  const TriMesh ico = make_icosphere(3, 1.0);
  const RelaxationResult a = tangential_relaxation(ico);
  CHECK(a.max_displacement <= 0.1 * mean_edge(ico) * (1 + 1e-12));
  CHECK(a.mesh.euler_characteristic() == 2);
  CHECK(sphere_fit(a.mesh).radius == Approx(1.0).epsilon(1e-3));

  const TriMesh stretched = transformed(make_icosphere(3, 1.0), Vec3(3, 1, 1).asDiagonal().toDenseMatrix());
  const RelaxationResult b = tangential_relaxation(stretched);
  CHECK(b.flips > 0);
  CHECK(b.mesh.euler_characteristic() == 2);
  CHECK(b.mesh.num_faces() == stretched.num_faces());
  CHECK(min_face_angle(b.mesh) > min_face_angle(stretched));
  CHECK(b.max_displacement <= 0.1 * mean_edge(stretched) * (1 + 1e-12));
  CHECK(measures(b.mesh).volume == Approx(measures(stretched).volume).epsilon(0.02));

  const RelaxationResult c = tangential_relaxation(stretched, false);
  CHECK(c.flips == 0);
}

TEST_CASE("convergence diagnostics") {
  const ParameterSet P{1, 0, 2, 0, -0.75};
  const ConvergenceDiagnostics d = convergence_diagnostics(make_icosphere(3, 4.0), P);
  REQUIRE(d.matched_radius.has_value());
  CHECK(*d.matched_radius == Approx(4.0));
  CHECK(d.relative_gap < 1e-6);
  CHECK(d.max_ao2 < 1e-6);

  const ConvergenceDiagnostics cube = convergence_diagnostics(make_cube(1.0, Vec3::Zero(), 4), P);
  CHECK(cube.max_ao2 > 1.0);
  CHECK(cube.relative_gap > 0.1);
}
