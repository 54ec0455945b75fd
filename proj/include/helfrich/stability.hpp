#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "helfrich/curvature.hpp"
#include "helfrich/flow.hpp"
#include "helfrich/mesh.hpp"
#include "helfrich/params.hpp"

namespace helfrich {

struct HarmonicMode {
  int l = 0;
  int m = 0;               ///< |m| <= l; m < 0 selects the sin(|m| phi) branch
  double amplitude = 0.0;  ///< length units
};

struct PerturbationSpec {
  std::vector<HarmonicMode> modes;
  double radius = 1.0;
  int subdivisions = 4;
};

/// Real spherical harmonic scaled so that max |Y| over the sphere is 1.
/// For m = 0 this is the Legendre polynomial P_l(cos theta).
double real_harmonic(int l, int m, double theta, double phi);

/// Icosphere of the given radius displaced along its exact normals by
/// psi = sum amplitude * Y_l^m. Throws std::domain_error when a mode is out
/// of range or sum |amplitude| >= radius.
TriMesh perturb_sphere(const PerturbationSpec& spec, const Vec3& center = Vec3::Zero());

/// Integral of H divided by the area, with mixed-area weights.
double average_mean_curvature(const TriMesh& mesh);

enum class MildClass { I, II, III, IV, None };
std::string_view to_string(MildClass c);

struct ClassCheck {
  bool holds = false;
  std::vector<std::string> failures; ///< one entry per violated inequality
  std::vector<std::string> notes;    ///< non-fatal remarks
};

/// Inputs shared by all classes so the curvature field is computed once.
struct MildnessInput {
  ParameterSet params;
  std::optional<double> a0;
  double avg_h = 0.0;
  double max_ao2 = 0.0;
  bool weakly_convex = false;
  bool weakly_mean_convex = false;
};

MildnessInput mildness_input(const TriMesh& mesh, const ParameterSet& params, std::optional<double> a0,
                             const Tolerances& tol = {});

/// Hypotheses of a single class, evaluated independently of the others.
ClassCheck check_class(MildClass c, const MildnessInput& in, const Tolerances& tol = {});

struct MildnessVerdict {
  MildClass matched_class = MildClass::None;
  std::vector<std::string> details; ///< failures of every class tried, or notes of the match
  MildnessInput input;
};

/// Tries classes I to IV in order and returns the first whose hypotheses
/// hold. Class III uses p <= 0.
MildnessVerdict mildness_class(const TriMesh& mesh, const ParameterSet& params,
                               std::optional<double> a0 = std::nullopt, const Tolerances& tol = {});

struct ParabolaCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// P(H) = a H^2 + b H + c at |A°|^2 = s.
ParabolaCoefficients parabola_coefficients(const ParameterSet& params, double s);

/// Smaller root of P, or nullopt when the discriminant is negative.
std::optional<double> lower_root(const ParabolaCoefficients& q);

/// Thrown when the certificate hypotheses fail; `inequality` names the one.
class CertificateGateError : public std::invalid_argument {
public:
  CertificateGateError(std::string inequality, const std::string& what)
      : std::invalid_argument(what), inequality(std::move(inequality)) {}
  std::string inequality;
};

/// Throws CertificateGateError unless c0 > 0, lambda >= kc(a0^2 - c0/2),
/// lambda >= kc(a0^2 - c0^2/2) and p < -c0 kc a0^2. The second lambda bound is
/// what b(s) <= 0 actually needs; the first alone does not imply it for
/// c0 < 1.
void certificate_gate(const ParameterSet& params, double a0);

/// The stated hypotheses only (without the second lambda bound).
bool stated_certificate_hypotheses(const ParameterSet& params, double a0);

struct CoefficientSample {
  double s = 0.0;
  ParabolaCoefficients coeffs;
  double discriminant = 0.0;
  std::optional<double> h1;
};

enum class CertificateKind { PositiveLowerBound, Vacuous };
std::string_view to_string(CertificateKind k);

struct ConvexityCertificate {
  CertificateKind kind = CertificateKind::Vacuous;
  double h1_min = 0.0;   ///< meaningful for PositiveLowerBound
  double s_at_min = 0.0;
  std::vector<CoefficientSample> trace; ///< a handful of s values for reporting
  double grid_self_check = 0.0;         ///< |h1_min(full grid) - h1_min(half grid)|
  int grid_points = 0;
};

/// Minimum over s in [0, a0^2] of the lower root H1(s) of P, using a uniform
/// grid, the endpoints and the boundary of {discriminant >= 0}. H1 has no
/// interior stationary points (the stationarity condition does not involve
/// s), so the minimum sits on one of those candidates.
ConvexityCertificate mean_convexity_certificate(const ParameterSet& params, double a0,
                                                int grid_points = 10000);

struct ConsistencyReport {
  FlowTermination termination = FlowTermination::MaxSteps;
  double h1_min = 0.0;
  double min_h = 0.0;
  double band = 0.0;          ///< allowed shortfall, 5% of the curvature scale
  double final_max_ao2 = 0.0;
  double fitted_radius = 0.0;
  bool vacuous = false;       ///< certificate found no admissible s
  bool assessed = false;      ///< converged and still max |A°|^2 <= a0^2
  bool consistent = false;    ///< min_h >= h1_min - band (false when vacuous)
};

/// Flows the mesh and compares its final min H with the certificate bound.
/// Throws std::invalid_argument when max |A°|^2 > a0^2 on the input mesh and
/// CertificateGateError when the parameters fail the gate.
ConsistencyReport certificate_consistency_probe(const TriMesh& mesh, const ParameterSet& params, double a0,
                                                const FlowConfig& config = {});

} // namespace helfrich
