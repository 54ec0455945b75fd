#include "helfrich/sphere_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helfrich {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_radius(double r, const char* who) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::domain_error(std::string(who) + ": radius must be positive");
}

// lambda == -kc c0^2/2 up to root_eps, relative to the magnitudes involved.
bool at_critical_lambda(const ParameterSet& params, const Tolerances& tol) {
  const double crit = critical_lambda(params);
  const double scale = std::max({1.0, std::abs(crit), std::abs(params.lambda)});
  return std::abs(params.lambda - crit) <= tol.root_eps * scale;
}

SphericalSolutionSet make_set(SphereVerdict verdict, std::vector<double> radii) {
  SphericalSolutionSet s;
  s.verdict = verdict;
  std::sort(radii.begin(), radii.end());
  s.radii = std::move(radii);
  return s;
}

SphericalSolutionSet from_radii(std::vector<double> radii) {
  if (radii.empty()) return make_set(SphereVerdict::NoSphere, {});
  if (radii.size() == 1) return make_set(SphereVerdict::Unique, std::move(radii));
  return make_set(SphereVerdict::TwoRadii, std::move(radii));
}

bool same_solutions(const SphericalSolutionSet& a, const SphericalSolutionSet& b) {
  if (a.verdict != b.verdict || a.radii.size() != b.radii.size()) return false;
  for (std::size_t i = 0; i < a.radii.size(); ++i) {
    const double scale = std::max(std::abs(a.radii[i]), std::abs(b.radii[i]));
    if (std::abs(a.radii[i] - b.radii[i]) > 1e-9 * scale) return false;
  }
  return true;
}

double x_of(const ParameterSet& params) {
  return params.lambda / (params.kc * params.c0) + params.c0 / 2.0;
}

// x^2 + 2p/(kc c0) with near-zero values snapped to an exact double root.
double discriminant_of(const ParameterSet& params, double x, const Tolerances& tol) {
  const double shift = 2.0 * params.p / (params.kc * params.c0);
  const double disc = x * x + shift;
  if (std::abs(disc) <= tol.root_eps * (x * x + std::abs(shift))) return 0.0;
  return disc;
}

} // namespace

std::string_view to_string(Boundedness b) {
  switch (b) {
  case Boundedness::Plausible: return "Plausible";
  case Boundedness::UnboundedFlattening: return "UnboundedFlattening";
  case Boundedness::UnboundedInflation: return "UnboundedInflation";
  }
  return "?";
}

std::string_view to_string(SphereVerdict v) {
  switch (v) {
  case SphereVerdict::AnyRadius: return "AnyRadius";
  case SphereVerdict::Unique: return "Unique";
  case SphereVerdict::TwoRadii: return "TwoRadii";
  case SphereVerdict::NoSphere: return "NoSphere";
  }
  return "?";
}

double el_sphere_residual(double r, const ParameterSet& params) {
  require_positive_radius(r, "el_sphere_residual");
  const double u = 1.0 / r;
  const double kc = params.kc, c0 = params.c0;
  return 2.0 * kc * c0 * u * u - (kc * c0 * c0 / 2.0 + params.lambda) * 2.0 * u - params.p;
}

double el_sphere_residual_scale(double r, const ParameterSet& params) {
  require_positive_radius(r, "el_sphere_residual_scale");
  const double u = 1.0 / r;
  const double kc = params.kc, c0 = params.c0;
  return std::abs(2.0 * kc * c0) * u * u +
         std::abs(kc * c0 * c0 / 2.0 + params.lambda) * 2.0 * u + std::abs(params.p) + 1.0;
}

SphereEquationRoots quadratic_roots(const ParameterSet& params) {
  SphereEquationRoots out;
  if (params.c0 == 0.0) {
    out.degenerate_linear = true;
    if (params.lambda != 0.0) {
      out.roots.push_back(-params.p / (2.0 * params.lambda));
    } else if (params.p == 0.0) {
      out.every_u = true;
    }
    return out;
  }
  // u^2 + b u + c = 0 with b = -x, c = -p/(2 kc c0); cancellation-free form.
  const double b = -x_of(params);
  const double c = -params.p / (2.0 * params.kc * params.c0);
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) return out;
  if (disc == 0.0) {
    out.roots.push_back(-b / 2.0);
    return out;
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b == 0.0 ? 1.0 : b));
  if (q == 0.0) {
    out.roots = {0.0, 0.0};
  } else {
    out.roots = {q, c / q};
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

Boundedness boundedness_verdict(const ParameterSet& params, const Tolerances& tol) {
  if (at_critical_lambda(params, tol)) {
    return params.p < 0.0 ? Boundedness::UnboundedInflation : Boundedness::Plausible;
  }
  if (params.lambda < critical_lambda(params)) return Boundedness::UnboundedFlattening;
  return Boundedness::Plausible;
}

SphericalSolutionSet classify_spheres(const ParameterSet& params, const Tolerances& tol) {
  const Boundedness bound = boundedness_verdict(params, tol);
  SphericalSolutionSet result;

  if (bound != Boundedness::Plausible) {
    result = make_set(SphereVerdict::NoSphere, {});
  } else if (params.c0 == 0.0) {
    // Linear case: 2 lambda / r + p = 0.
    if (params.lambda == 0.0 && params.p == 0.0) {
      result = make_set(SphereVerdict::AnyRadius, {});
    } else if (params.lambda > 0.0 && params.p < 0.0) {
      result = make_set(SphereVerdict::Unique, {-2.0 * params.lambda / params.p});
    } else {
      result = make_set(SphereVerdict::NoSphere, {});
    }
  } else if (at_critical_lambda(params, tol)) {
    // 2 kc c0 r^-2 = p; p == 0 leaves r^-2 = 0.
    if (params.c0 > 0.0 && params.p > 0.0) {
      result = make_set(SphereVerdict::Unique,
                        {std::sqrt(2.0 * params.kc * params.c0 / params.p)});
    } else {
      result = make_set(SphereVerdict::NoSphere, {});
    }
  } else {
    // 2/r = x +- sqrt(x^2 + 2p/(kc c0)); keep the strictly positive branches.
    const double x = x_of(params);
    const double disc = discriminant_of(params, x, tol);
    std::vector<double> radii;
    if (disc == 0.0) {
      if (x > 0.0) radii.push_back(2.0 / x);
    } else if (disc > 0.0) {
      const double root = std::sqrt(disc);
      for (double denom : {x + root, x - root}) {
        if (denom > 0.0) radii.push_back(2.0 / denom);
      }
    }
    result = from_radii(std::move(radii));
  }

  if (params.c0 != 0.0) result.x = x_of(params);
  result.boundedness = bound;
  result.literal_theorem_agrees = same_solutions(result, literal_theorem_prediction(params, tol));
  return result;
}

SphericalSolutionSet literal_theorem_prediction(const ParameterSet& params,
                                                const Tolerances& tol) {
  const double kc = params.kc, c0 = params.c0, lambda = params.lambda, p = params.p;
  const bool crit = at_critical_lambda(params, tol);
  const bool above = !crit && lambda > critical_lambda(params);

  // (i)
  if (c0 == 0.0 && lambda == 0.0 && p == 0.0) return make_set(SphereVerdict::AnyRadius, {});
  // (ii)
  if (c0 == 0.0 && lambda > 0.0 && p < 0.0) return make_set(SphereVerdict::Unique, {-2.0 * lambda / p});
  // (iii)
  if (c0 > 0.0 && crit && p > 0.0) return make_set(SphereVerdict::Unique, {std::sqrt(2.0 * kc * c0 / p)});
  if (c0 == 0.0 || !above) return make_set(SphereVerdict::NoSphere, {});

  const double x = x_of(params);
  const double lower = -kc * c0 * x * x / 2.0;
  const double disc = discriminant_of(params, x, tol);
  const bool on_lower = disc == 0.0;
  const auto plus_branch = [&] { return 2.0 / (x + std::sqrt(std::max(disc, 0.0))); };

  // (iv)(a)
  if (c0 > 0.0 && (p >= 0.0 || on_lower)) return make_set(SphereVerdict::Unique, {plus_branch()});
  // (iv)(b): for c0 < 0 the printed interval lower < p < 0 has lower > 0.
  if (c0 < 0.0 && lower < p && p < 0.0) return make_set(SphereVerdict::Unique, {plus_branch()});
  // (v)
  if (c0 > 0.0 && lower < p && p < 0.0) {
    const double root = std::sqrt(disc);
    return make_set(SphereVerdict::TwoRadii, {2.0 / (x + root), 2.0 / (x - root)});
  }
  return make_set(SphereVerdict::NoSphere, {});
}

double sphere_energy_closed_form(double r, const ParameterSet& params) {
  require_positive_radius(r, "sphere_energy_closed_form");
  const double kc = params.kc, c0 = params.c0;
  return r * r * r * (4.0 * params.p * kPi / 3.0) +
         r * r * (2.0 * kPi * kc * c0 * c0 + 4.0 * kPi * params.lambda) +
         r * (-8.0 * kPi * kc * c0) + 4.0 * params.kbar * kPi + 8.0 * kc * kPi;
}

std::vector<WitnessPoint> unboundedness_witness(const ParameterSet& params, int n) {
  if (boundedness_verdict(params) != Boundedness::UnboundedInflation)
    throw std::logic_error(
        "unboundedness_witness: requires UnboundedInflation parameters "
        "(lambda = -kc c0^2/2 and p < 0); no sphere sequence witnesses flattening");
  if (n < 2) throw std::invalid_argument("unboundedness_witness: need n >= 2");

  std::vector<WitnessPoint> points;
  points.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double r = std::ldexp(1.0, k);
    points.push_back({r, sphere_energy_closed_form(r, params)});
  }
  // The tail must be strictly decreasing over at least its last two points.
  std::size_t tail = points.size() - 1;
  while (tail > 0 && points[tail].energy < points[tail - 1].energy) --tail;
  if (tail == points.size() - 1 || !(points.back().energy < points.front().energy))
    throw std::runtime_error("unboundedness_witness: sphere energies not yet decreasing; increase n");
  return points;
}

} // namespace helfrich
