#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "helfrich/params.hpp"

namespace helfrich {

enum class Boundedness { Plausible, UnboundedFlattening, UnboundedInflation };

enum class SphereVerdict { AnyRadius, Unique, TwoRadii, NoSphere };

/// Spherical critical points of the functional for one parameter set.
/// Radii are strictly positive and sorted ascending.
struct SphericalSolutionSet {
  SphereVerdict verdict = SphereVerdict::NoSphere;
  std::vector<double> radii;
  std::optional<double> x; ///< lambda/(kc c0) + c0/2, only when c0 != 0
  Boundedness boundedness = Boundedness::Plausible;
  /// Whether the literal case table of the classification theorem predicts
  /// the same verdict and radii.
  bool literal_theorem_agrees = true;
};

std::string_view to_string(Boundedness b);
std::string_view to_string(SphereVerdict v);

/// Euler-Lagrange operator evaluated on a round sphere of radius r:
/// 2 kc c0 r^-2 - (kc c0^2/2 + lambda) 2 r^-1 - p.
double el_sphere_residual(double r, const ParameterSet& params);

/// Scale used to judge |el_sphere_residual| against root_eps.
double el_sphere_residual_scale(double r, const ParameterSet& params);

/// Real roots u = 1/r of the sphere equation, any sign, ascending.
/// For c0 == 0 the equation is linear (2 lambda u + p = 0); when it is the
/// identity 0 = 0 every u solves it.
struct SphereEquationRoots {
  bool degenerate_linear = false;
  bool every_u = false;
  std::vector<double> roots;
};
SphereEquationRoots quadratic_roots(const ParameterSet& params);

Boundedness boundedness_verdict(const ParameterSet& params,
                                const Tolerances& tol = {});

/// Case analysis of spherical solutions (zero, one, two or a continuum).
SphericalSolutionSet classify_spheres(const ParameterSet& params,
                                      const Tolerances& tol = {});

/// The classification theorem's case table read literally, without any
/// boundedness reasoning. Used as the cross-check behind
/// literal_theorem_agrees.
SphericalSolutionSet literal_theorem_prediction(const ParameterSet& params,
                                                const Tolerances& tol = {});

/// Energy of a round sphere of radius r:
/// r^3 (4 p pi/3) + r^2 (2 pi kc c0^2 + 4 pi lambda) - 8 pi kc c0 r
///   + 4 pi kbar + 8 pi kc.
double sphere_energy_closed_form(double r, const ParameterSet& params);

struct WitnessPoint {
  double radius;
  double energy;
};

/// Spheres of radius 2^k, k = 0..n-1, whose energies decrease without bound
/// under inflation. Throws std::logic_error unless the parameters are
/// UnboundedInflation, and std::runtime_error if the sequence fails to end
/// strictly decreasing below its first value.
std::vector<WitnessPoint> unboundedness_witness(const ParameterSet& params, int n);

} // namespace helfrich
