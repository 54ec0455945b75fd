#pragma once

#include <cstdint>
#include <vector>

#include "helfrich/curvature.hpp"
#include "helfrich/mesh.hpp"
#include "helfrich/params.hpp"

namespace helfrich {

struct EnergyBreakdown {
  double bending = 0.0;     ///< (kc/2) int (H - c0)^2
  double area_term = 0.0;   ///< lambda * Area
  double volume_term = 0.0; ///< p * Vol
  double topological = 0.0; ///< 2 kbar pi chi
  double total = 0.0;
};

/// Discrete Helfrich energy; bending integrates vertex H against mixed areas.
/// Throws MeshError(Topology) if chi != 2.
EnergyBreakdown helfrich_energy(const TriMesh& mesh, const ParameterSet& params);

/// S_H - (2 kc S~ + 4 kbar pi) with S~ = 1/4 int (H - c0)^2 + l1 Area + l2 Vol,
/// l1 = lambda/(2 kc), l2 = p/(2 kc). Zero up to roundoff.
double tilde_equivalence_check(const TriMesh& mesh, const ParameterSet& params);

struct ResidualField {
  std::vector<double> values; ///< per-vertex Euler-Lagrange residual
  double sup = 0.0;
  double l2 = 0.0;            ///< sqrt(sum_i area_i r_i^2)
};

/// kc (Delta H + H |A°|^2) + 2 kc c0 K - (kc c0^2/2 + lambda) H - p per vertex.
ResidualField el_residual_field(const TriMesh& mesh, const ParameterSet& params);

/// Exact gradient of helfrich_energy with respect to vertex positions.
std::vector<Vec3> energy_gradient(const TriMesh& mesh, const ParameterSet& params);

/// Energy and gradient together; cheaper than calling both.
EnergyBreakdown energy_and_gradient(const TriMesh& mesh, const ParameterSet& params,
                                    std::vector<Vec3>& gradient);

/// sqrt(sum_i |g_i|^2 / area_i): the L2 norm of the gradient density.
double area_weighted_norm(const std::vector<Vec3>& gradient, const std::vector<double>& area);

/// Worst relative error between fourth-order central differences of the energy and
/// <gradient, d> over `sample` random unit directions d in R^{3V}.
/// Relative errors are taken against max(|analytic|, |fd|, 1e-8 (1 + |E|)).
double fd_gradient_check(const TriMesh& mesh, const ParameterSet& params, double h, int sample,
                         std::uint64_t seed = 1);

} // namespace helfrich
