#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "helfrich/curvature.hpp"
#include "helfrich/energy.hpp"
#include "helfrich/mesh.hpp"
#include "helfrich/params.hpp"
#include "helfrich/sphere_analysis.hpp"

namespace helfrich {

enum class DescentDirection {
  Steepest, ///< -M^{-1} g, the lumped-mass L2 gradient
  Lbfgs,    ///< limited-memory quasi-Newton seeded with M^{-1}
};

struct FlowConfig {
  int max_steps = 5000;
  double initial_step = 1e-3;
  double backtrack_factor = 0.5; ///< in (0, 1)
  double armijo_c = 1e-4;        ///< in (0, 1)
  double grad_tol = 1e-6;        ///< on the area-weighted gradient norm
  int remesh_every = 0;          ///< 0 disables remeshing
  std::uint64_t seed = 0;
  DescentDirection direction = DescentDirection::Lbfgs;
  int lbfgs_memory = 10;
  double min_face_quality = 0.02;
  double divergence_volume_ratio = 100.0;
};

/// Empty when the configuration is usable, otherwise the reason.
std::optional<std::string> validate(const FlowConfig& config);

struct FlowStep {
  int step = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double max_ao2 = 0.0;
  double fitted_radius = 0.0;
  double min_h = 0.0;
  double volume = 0.0;
  double step_size = 0.0; ///< accepted line-search step leading here
  bool remeshed = false;  ///< energy re-logged after a remesh event
};

/// Stalled: no step along the descent direction lowers the energy any more
/// (roundoff floor or a stale quasi-Newton model that plain gradient steps
/// cannot repair).
enum class FlowTermination { Converged, MaxSteps, MeshDegenerate, EnergyDiverging, Stalled };
std::string_view to_string(FlowTermination t);

struct FlowResult {
  TriMesh mesh;
  std::vector<FlowStep> trace;
  FlowTermination termination = FlowTermination::MaxSteps;
  int remesh_events = 0;
  bool bounded_parameters = true; ///< false: run was allowed despite an unbounded functional
};

/// Armijo-backtracking descent on the discrete Helfrich energy.
FlowResult run_flow(const TriMesh& mesh, const ParameterSet& params, const FlowConfig& config = {});

/// True when energies never increase between remesh events (up to `slack`
/// relative roundoff).
bool trace_is_monotone(const std::vector<FlowStep>& trace, double slack = 1e-12);

struct RelaxationResult {
  TriMesh mesh;
  double max_displacement = 0.0;
  int flips = 0;
  int skipped_flips = 0; ///< rejected because they would break the manifold
};

/// Moves vertices within their tangent planes toward area-weighted one-ring
/// centroids (each step capped at 0.1 mean edge length), then flips
/// non-Delaunay edges when `flip_edges` is set.
RelaxationResult tangential_relaxation(const TriMesh& mesh, bool flip_edges = true);

struct ConvergenceDiagnostics {
  double fitted_radius = 0.0;
  double rms = 0.0;
  double max_ao2 = 0.0;
  double residual_sup = 0.0;
  EnergyBreakdown energy;
  ConvexityClass convexity = ConvexityClass::NotMeanConvex;
  SphericalSolutionSet predicted;
  std::optional<double> matched_radius; ///< nearest predicted radius
  double relative_gap = 0.0;            ///< |fitted - matched| / matched
};

ConvergenceDiagnostics convergence_diagnostics(const TriMesh& mesh, const ParameterSet& params,
                                               const Tolerances& tol = {});

} // namespace helfrich
