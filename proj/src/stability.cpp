#include "helfrich/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "helfrich/sphere_fit.hpp"

namespace helfrich {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_mode(int l, int m) {
  if (l < 0 || l > 127 || std::abs(m) > l)
    throw std::domain_error("harmonic mode needs 0 <= |m| <= l <= 127");
}

// Unnormalized real harmonic. std::assoc_legendre omits the Condon-Shortley
// phase, which only flips signs and is irrelevant after normalization.
double raw_harmonic(int l, int m, double theta, double phi) {
  const unsigned am = static_cast<unsigned>(std::abs(m));
  const double x = std::clamp(std::cos(theta), -1.0, 1.0);
  const double leg = std::assoc_legendre(static_cast<unsigned>(l), am, x);
  if (m > 0) return leg * std::cos(am * phi);
  if (m < 0) return leg * std::sin(am * phi);
  return leg;
}

// max over theta of |P_l^m(cos theta)|; the azimuthal factor peaks at 1.
double compute_harmonic_norm(int l, int m) {
  const unsigned am = static_cast<unsigned>(std::abs(m));
  auto f = [&](double t) { return std::abs(std::assoc_legendre(static_cast<unsigned>(l), am, std::cos(t))); };
  constexpr int n = 4000;
  const double h = std::numbers::pi / n;
  int best = 0;
  double best_val = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double v = f(k * h);
    if (v > best_val) best_val = v, best = k;
  }
  // golden-section refinement around the best sample
  double lo = std::max(0.0, (best - 1) * h), hi = std::min(std::numbers::pi, (best + 1) * h);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (f(a) > f(b)) hi = b;
    else lo = a;
  }
  return std::max(best_val, f(0.5 * (lo + hi)));
}

double harmonic_norm(int l, int m) {
  if (m == 0) return 1.0;
  static std::mutex mutex;
  static std::map<std::pair<int, int>, double> cache;
  const std::pair<int, int> key{l, std::abs(m)};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_harmonic_norm(l, m)).first;
  return it->second;
}

double max_ao2(const CurvatureField& field) {
  double m = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!field.degenerate[i]) m = std::max(m, field.Ao2[i]);
  return m;
}

double discriminant(const ParabolaCoefficients& q) { return q.b * q.b - 4.0 * q.a * q.c; }

} // namespace

double real_harmonic(int l, int m, double theta, double phi) {
  check_mode(l, m);
  return raw_harmonic(l, m, theta, phi) / harmonic_norm(l, m);
}

TriMesh perturb_sphere(const PerturbationSpec& spec, const Vec3& center) {
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius))
    throw std::domain_error("perturbation: radius must be positive");
  double total = 0.0;
  std::vector<double> norms;
  for (const auto& mode : spec.modes) {
    check_mode(mode.l, mode.m);
    if (!std::isfinite(mode.amplitude)) throw std::domain_error("perturbation: amplitude must be finite");
    total += std::abs(mode.amplitude);
    norms.push_back(harmonic_norm(mode.l, mode.m));
  }
  if (!(total < spec.radius))
    throw std::domain_error("perturbation: sum of |amplitude| must stay below the radius");

  const TriMesh base = make_icosphere(spec.subdivisions, 1.0);
  std::vector<Vec3> v = base.vertices();
  for (auto& x : v) {
    const Vec3 n = x.normalized();
    const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
    const double phi = std::atan2(n.y(), n.x());
    double psi = 0.0;
    for (std::size_t k = 0; k < spec.modes.size(); ++k) {
      const auto& mode = spec.modes[k];
      psi += mode.amplitude * raw_harmonic(mode.l, mode.m, theta, phi) / norms[k];
    }
    x = center + (spec.radius + psi) * n;
  }
  return TriMesh(std::move(v), base.faces());
}

double average_mean_curvature(const TriMesh& mesh) { return average_mean_curvature(curvature_field(mesh)); }

std::string_view to_string(MildClass c) {
  switch (c) {
    case MildClass::I: return "I";
    case MildClass::II: return "II";
    case MildClass::III: return "III";
    case MildClass::IV: return "IV";
    case MildClass::None: return "None";
  }
  return "?";
}

MildnessInput mildness_input(const TriMesh& mesh, const ParameterSet& params, std::optional<double> a0,
                             const Tolerances& tol) {
  const CurvatureField field = curvature_field(mesh);
  MildnessInput in;
  in.params = params;
  in.a0 = a0;
  in.avg_h = average_mean_curvature(field);
  in.max_ao2 = max_ao2(field);
  in.weakly_convex = is_weakly_convex(field, tol);
  in.weakly_mean_convex = is_weakly_mean_convex(field, tol);
  return in;
}

ClassCheck check_class(MildClass c, const MildnessInput& in, const Tolerances& tol) {
  ClassCheck out;
  const ParameterSet& P = in.params;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) out.failures.push_back(what);
  };
  const double crit = critical_lambda(P);
  switch (c) {
    case MildClass::I:
      need(P.c0 == 0.0, "c0 = 0 fails (c0 = " + fmt(P.c0) + ")");
      need(P.lambda == 0.0, "lambda = 0 fails (lambda = " + fmt(P.lambda) + ")");
      need(P.p == 0.0, "p = 0 fails (p = " + fmt(P.p) + ")");
      need(in.weakly_mean_convex, "surface is not weakly mean convex");
      break;
    case MildClass::II:
      need(P.c0 == 0.0, "c0 = 0 fails (c0 = " + fmt(P.c0) + ")");
      need(in.weakly_mean_convex, "surface is not weakly mean convex");
      if (P.lambda == 0.0) {
        need(false, "lambda = 0 leaves -p/lambda undefined");
      } else {
        const double target = -P.p / P.lambda;
        need(std::abs(in.avg_h - target) <= tol.geom_eps * std::abs(in.avg_h),
             "average H = " + fmt(in.avg_h) + " differs from -p/lambda = " + fmt(target));
      }
      break;
    case MildClass::III:
      need(P.c0 >= 0.0, "c0 >= 0 fails (c0 = " + fmt(P.c0) + ")");
      need(P.lambda >= crit, "lambda >= -kc c0^2/2 fails (" + fmt(P.lambda) + " < " + fmt(crit) + ")");
      need(P.p <= 0.0, "p <= 0 fails (p = " + fmt(P.p) + ")");
      need(in.weakly_convex, "surface is not weakly convex");
      out.notes.push_back("sign of p taken as p <= 0, the condition the weak-convexity argument uses; "
                          "the summary statement of this case reads p > 0");
      break;
    case MildClass::IV:
      if (!in.a0) {
        need(false, "no a0 supplied");
        break;
      }
      {
        const double a0 = *in.a0;
        need(a0 > 0.0, "a0 > 0 fails");
        need(P.c0 >= 0.0, "c0 >= 0 fails (c0 = " + fmt(P.c0) + ")");
        need(P.lambda >= crit, "lambda >= -kc c0^2/2 fails (" + fmt(P.lambda) + " < " + fmt(crit) + ")");
        need(P.p <= -P.kc * a0 * a0, "p <= -kc a0^2 fails (" + fmt(P.p) + " > " + fmt(-P.kc * a0 * a0) + ")");
        need(in.weakly_mean_convex, "surface is not weakly mean convex");
        need(in.max_ao2 <= a0 * a0, "max |A°|^2 = " + fmt(in.max_ao2) + " exceeds a0^2 = " + fmt(a0 * a0));
      }
      break;
    case MildClass::None:
      break;
  }
  out.holds = c != MildClass::None && out.failures.empty();
  return out;
}

MildnessVerdict mildness_class(const TriMesh& mesh, const ParameterSet& params, std::optional<double> a0,
                               const Tolerances& tol) {
  MildnessVerdict v;
  v.input = mildness_input(mesh, params, a0, tol);
  for (MildClass c : {MildClass::I, MildClass::II, MildClass::III, MildClass::IV}) {
    ClassCheck check = check_class(c, v.input, tol);
    const std::string tag = "class " + std::string(to_string(c)) + ": ";
    if (check.holds) {
      v.matched_class = c;
      for (auto& n : check.notes) v.details.push_back(tag + n);
      return v;
    }
    for (auto& f : check.failures) v.details.push_back(tag + f);
  }
  return v;
}

ParabolaCoefficients parabola_coefficients(const ParameterSet& params, double s) {
  if (!(s >= 0.0)) throw std::domain_error("parabola_coefficients: s must be >= 0");
  return {params.c0 / 2.0, s - params.c0 * params.c0 / 2.0 - params.lambda / params.kc,
          -params.p / params.kc - params.c0 * s};
}

std::optional<double> lower_root(const ParabolaCoefficients& q) {
  if (q.a == 0.0) {
    if (q.b == 0.0) return std::nullopt;
    return -q.c / q.b;
  }
  const double d = discriminant(q);
  if (d < 0.0) return std::nullopt;
  const double sq = std::sqrt(d);
  // Avoid cancellation in -b - sqrt(d) when b < 0 and a > 0.
  if (q.a > 0.0 && q.b < 0.0) return 2.0 * q.c / (-q.b + sq);
  const double r1 = (-q.b - sq) / (2.0 * q.a), r2 = (-q.b + sq) / (2.0 * q.a);
  return std::min(r1, r2);
}

bool stated_certificate_hypotheses(const ParameterSet& P, double a0) {
  return a0 > 0.0 && P.c0 > 0.0 && P.lambda >= P.kc * (a0 * a0 - P.c0 / 2.0) && P.p < -P.c0 * P.kc * a0 * a0;
}

void certificate_gate(const ParameterSet& P, double a0) {
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw CertificateGateError("a0 > 0", "certificate: a0 must be positive");
  if (!(P.c0 > 0.0)) throw CertificateGateError("c0 > 0", "certificate: c0 > 0 fails (c0 = " + fmt(P.c0) + ")");
  const double lam1 = P.kc * (a0 * a0 - P.c0 / 2.0);
  if (!(P.lambda >= lam1))
    throw CertificateGateError("lambda >= kc(a0^2 - c0/2)", "certificate: lambda >= kc(a0^2 - c0/2) fails (" +
                                                               fmt(P.lambda) + " < " + fmt(lam1) + ")");
  const double lam2 = P.kc * (a0 * a0 - P.c0 * P.c0 / 2.0);
  if (!(P.lambda >= lam2))
    throw CertificateGateError("lambda >= kc(a0^2 - c0^2/2)",
                               "certificate: lambda >= kc(a0^2 - c0^2/2) fails (" + fmt(P.lambda) + " < " +
                                   fmt(lam2) + "); without it b(s) <= 0 is not guaranteed when c0 < 1");
  const double pmax = -P.c0 * P.kc * a0 * a0;
  if (!(P.p < pmax))
    throw CertificateGateError("p < -c0 kc a0^2", "certificate: p < -c0 kc a0^2 fails (" + fmt(P.p) +
                                                       " >= " + fmt(pmax) + ")");
}

std::string_view to_string(CertificateKind k) {
  return k == CertificateKind::PositiveLowerBound ? "PositiveLowerBound" : "Vacuous";
}

ConvexityCertificate mean_convexity_certificate(const ParameterSet& params, double a0, int grid_points) {
  certificate_gate(params, a0);
  if (grid_points < 3) throw std::invalid_argument("certificate: grid needs at least 3 points");
  const double smax = a0 * a0;

  // D(s) = s^2 + 2(B0 + c0^2) s + B0^2 - 2 c0 C0 with b = s + B0, c = C0 - c0 s.
  const double B0 = -params.c0 * params.c0 / 2.0 - params.lambda / params.kc;
  const double C0 = -params.p / params.kc;
  std::vector<double> root_candidates;
  {
    const double beta = B0 + params.c0 * params.c0, gamma = B0 * B0 - 2.0 * params.c0 * C0;
    const double disc = beta * beta - gamma;
    if (disc >= 0.0) {
      const double q = -(beta + std::copysign(std::sqrt(disc), beta));
      for (double s : {q, q != 0.0 ? gamma / q : 0.0})
        if (s >= 0.0 && s <= smax) root_candidates.push_back(s);
    }
  }

  auto h1_at = [&](double s, bool on_root) -> std::optional<double> {
    ParabolaCoefficients q = parabola_coefficients(params, s);
    if (on_root && discriminant(q) < 0.0) return -q.b / (2.0 * q.a);
    return lower_root(q);
  };

  auto minimize = [&](int stride, double& s_best) -> std::optional<double> {
    std::optional<double> best;
    auto consider = [&](double s, bool on_root) {
      if (auto h = h1_at(s, on_root); h && (!best || *h < *best)) best = h, s_best = s;
    };
    for (int k = 0; k < grid_points; k += stride) consider(smax * k / (grid_points - 1), false);
    consider(smax, false);
    for (double s : root_candidates) consider(s, true);
    return best;
  };

  ConvexityCertificate cert;
  cert.grid_points = grid_points;
  double s_full = 0.0, s_half = 0.0;
  const auto full = minimize(1, s_full);
  const auto half = minimize(2, s_half);
  if (full) {
    cert.kind = CertificateKind::PositiveLowerBound;
    cert.h1_min = *full;
    cert.s_at_min = s_full;
    cert.grid_self_check = std::abs(*full - *half);
  } else {
    cert.kind = CertificateKind::Vacuous;
    cert.h1_min = std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> report_s{0.0, 0.25 * smax, 0.5 * smax, 0.75 * smax, smax};
  if (full) report_s.push_back(s_full);
  for (double s : report_s) {
    CoefficientSample cs;
    cs.s = s;
    cs.coeffs = parabola_coefficients(params, s);
    cs.discriminant = discriminant(cs.coeffs);
    cs.h1 = lower_root(cs.coeffs);
    cert.trace.push_back(cs);
  }
  return cert;
}

ConsistencyReport certificate_consistency_probe(const TriMesh& mesh, const ParameterSet& params, double a0,
                                                const FlowConfig& config) {
  const CurvatureField start = curvature_field(mesh);
  if (max_ao2(start) > a0 * a0)
    throw std::invalid_argument("probe: max |A°|^2 = " + fmt(max_ao2(start)) + " exceeds a0^2 on the input mesh");
  const ConvexityCertificate cert = mean_convexity_certificate(params, a0);

  const FlowResult flow = run_flow(mesh, params, config);
  const CurvatureField end = curvature_field(flow.mesh);
  ConsistencyReport r;
  r.termination = flow.termination;
  r.h1_min = cert.h1_min;
  r.vacuous = cert.kind == CertificateKind::Vacuous;
  r.min_h = *std::min_element(end.H.begin(), end.H.end());
  r.band = 0.05 * curvature_scale(end);
  r.final_max_ao2 = max_ao2(end);
  r.fitted_radius = sphere_fit(flow.mesh).radius;
  r.assessed = flow.termination == FlowTermination::Converged && r.final_max_ao2 <= a0 * a0;
  r.consistent = r.assessed && !r.vacuous && r.min_h >= r.h1_min - r.band;
  return r;
}

} // namespace helfrich
