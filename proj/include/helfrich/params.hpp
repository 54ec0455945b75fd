#pragma once

#include <optional>
#include <string>

namespace helfrich {

/// Constants of the Helfrich functional with osmotic pressure and tensile
/// stress. Lengths and energies are in any consistent unit system.
struct ParameterSet {
  double kc = 1.0;     ///< bending modulus, must be > 0
  double kbar = 0.0;   ///< Gaussian bending modulus
  double c0 = 0.0;     ///< spontaneous curvature [1/length]
  double lambda = 0.0; ///< tensile stress [energy/length^2]
  double p = 0.0;      ///< osmotic pressure difference [energy/length^3]

  bool operator==(const ParameterSet&) const = default;
};

struct Tolerances {
  double geom_eps = 1e-3; ///< relative tolerance for curvature/convexity tests
  double root_eps = 1e-9; ///< tolerance for quadratic-root comparisons
  double grad_tol = 1e-6; ///< flow stopping gradient norm
};

/// Reason a parameter set was rejected, naming the offending field.
struct Rejection {
  std::string field;
  std::string reason;
};

/// Empty on success.
std::optional<Rejection> validate(const ParameterSet& params);
std::optional<Rejection> validate(const Tolerances& tol);

/// Dilation by rho: c0 ~ rho^-1, lambda ~ rho^-2, p ~ rho^-3; kc, kbar fixed.
/// Throws std::domain_error for rho <= 0.
ParameterSet scale_params(const ParameterSet& params, double rho);

/// Equilibrium value -kc c0^2 / 2 of lambda at which the area coefficient of
/// the expanded functional vanishes.
inline double critical_lambda(const ParameterSet& params) {
  return -params.kc * params.c0 * params.c0 / 2.0;
}

} // namespace helfrich
