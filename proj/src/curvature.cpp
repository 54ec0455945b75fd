#include "helfrich/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "face_kernel.hpp"

namespace helfrich {

CurvatureField curvature_field(const TriMesh& mesh) {
  const std::size_t n = mesh.num_vertices();
  const auto& x = mesh.vertices();
  std::vector<Vec3> cotan(n, Vec3::Zero()), weighted_normal(n, Vec3::Zero());
  std::vector<double> area(n, 0.0), angle_sum(n, 0.0);

  for (const Face& t : mesh.faces()) {
    const auto q = detail::face_quantities<double>(x[t[0]], x[t[1]], x[t[2]]);
    for (int i = 0; i < 3; ++i) {
      cotan[t[i]] += q.cotan_vec[i];
      weighted_normal[t[i]] += q.half_cross;
      area[t[i]] += q.mixed_area[i];
      const Vec3 a = x[t[(i + 1) % 3]] - x[t[i]];
      const Vec3 b = x[t[(i + 2) % 3]] - x[t[i]];
      angle_sum[t[i]] += std::atan2(a.cross(b).norm(), a.dot(b));
    }
  }

  CurvatureField field;
  field.H.resize(n);
  field.K.resize(n);
  field.Ao2.resize(n);
  field.kappa_minus.resize(n);
  field.kappa_plus.resize(n);
  field.area = area;
  field.normal.resize(n);
  field.degenerate.assign(n, false);
  field.clamped.assign(n, false);

  for (std::size_t i = 0; i < n; ++i) {
    const double len = weighted_normal[i].norm();
    if (!(area[i] > 0.0) || !(len > 0.0)) {
      field.degenerate[i] = true;
      field.normal[i] = Vec3::Zero();
      field.H[i] = field.K[i] = field.Ao2[i] = field.kappa_minus[i] = field.kappa_plus[i] = 0.0;
      continue;
    }
    const Vec3 nu = weighted_normal[i] / len;
    field.normal[i] = nu;
    const double H = -cotan[i].dot(nu) / area[i];
    const double K = (2.0 * std::numbers::pi - angle_sum[i]) / area[i];
    const double ao2 = H * H / 2.0 - 2.0 * K;
    field.H[i] = H;
    field.K[i] = K;
    field.clamped[i] = ao2 < 0.0;
    field.Ao2[i] = std::max(ao2, 0.0);
    const double spread = std::sqrt(field.Ao2[i] / 2.0);
    field.kappa_minus[i] = H / 2.0 - spread;
    field.kappa_plus[i] = H / 2.0 + spread;
  }
  return field;
}

std::vector<double> laplace_beltrami_apply(const TriMesh& mesh, std::span<const double> u) {
  const std::size_t n = mesh.num_vertices();
  if (u.size() != n) throw std::invalid_argument("laplace_beltrami_apply: field length != vertex count");
  const auto& x = mesh.vertices();
  std::vector<double> out(n, 0.0), area(n, 0.0);
  for (const Face& t : mesh.faces()) {
    const auto q = detail::face_quantities<double>(x[t[0]], x[t[1]], x[t[2]]);
    for (int k = 0; k < 3; ++k) {
      const int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
      const double flux = 0.5 * q.cot[k] * (u[j] - u[i]);
      out[i] += flux;
      out[j] -= flux;
      area[t[k]] += q.mixed_area[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = area[i] > 0.0 ? out[i] / area[i] : 0.0;
  return out;
}

double total_gauss_curvature(const CurvatureField& field) {
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += field.K[i] * field.area[i];
  return s;
}

double average_mean_curvature(const CurvatureField& field) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    num += field.H[i] * field.area[i];
    den += field.area[i];
  }
  return num / den;
}

std::string_view to_string(ConvexityClass c) {
  switch (c) {
  case ConvexityClass::WeaklyConvex: return "WeaklyConvex";
  case ConvexityClass::StrictlyMeanConvex: return "StrictlyMeanConvex";
  case ConvexityClass::WeaklyMeanConvex: return "WeaklyMeanConvex";
  case ConvexityClass::NotMeanConvex: return "NotMeanConvex";
  }
  return "?";
}

double curvature_scale(const CurvatureField& field) {
  std::vector<double> absH;
  absH.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!field.degenerate[i]) absH.push_back(std::abs(field.H[i]));
  }
  if (absH.empty()) return 0.0;
  auto mid = absH.begin() + static_cast<std::ptrdiff_t>(absH.size() / 2);
  std::nth_element(absH.begin(), mid, absH.end());
  return *mid;
}

namespace {
double min_over(const CurvatureField& field, const std::vector<double>& values) {
  double m = INFINITY;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!field.degenerate[i]) m = std::min(m, values[i]);
  }
  return m;
}
} // namespace

bool is_weakly_convex(const CurvatureField& field, const Tolerances& tol) {
  return min_over(field, field.kappa_minus) >= -tol.geom_eps * curvature_scale(field);
}

bool is_strictly_mean_convex(const CurvatureField& field, const Tolerances& tol) {
  return min_over(field, field.H) > tol.geom_eps * curvature_scale(field);
}

bool is_weakly_mean_convex(const CurvatureField& field, const Tolerances& tol) {
  return min_over(field, field.H) >= -tol.geom_eps * curvature_scale(field);
}

ConvexityClass convexity_class(const CurvatureField& field, const Tolerances& tol) {
  if (is_weakly_convex(field, tol)) return ConvexityClass::WeaklyConvex;
  if (is_strictly_mean_convex(field, tol)) return ConvexityClass::StrictlyMeanConvex;
  if (is_weakly_mean_convex(field, tol)) return ConvexityClass::WeaklyMeanConvex;
  return ConvexityClass::NotMeanConvex;
}

double winding_number(const TriMesh& mesh, const Vec3& point) {
  // Van Oosterom-Strackee solid angle per triangle.
  const auto& x = mesh.vertices();
  double total = 0.0;
  for (const Face& t : mesh.faces()) {
    const Vec3 a = x[t[0]] - point, b = x[t[1]] - point, c = x[t[2]] - point;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

MaxHeightCheck max_height_point_check(const TriMesh& mesh) {
  const double w = winding_number(mesh, Vec3::Zero());
  if (std::abs(w - 1.0) > 0.5)
    throw std::invalid_argument("max_height_point_check: origin is not enclosed by the mesh "
                                "(winding number " + std::to_string(w) +
                                "); translate the mesh so the origin lies inside");
  const auto& x = mesh.vertices();
  MaxHeightCheck out;
  double best = -1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].squaredNorm() > best) {
      best = x[i].squaredNorm();
      out.vertex = static_cast<int>(i);
    }
  }
  const CurvatureField field = curvature_field(mesh);
  out.H = field.H[out.vertex];
  out.support = x[out.vertex].dot(field.normal[out.vertex]);
  out.bound = 4.0 / out.support;
  out.sharp_bound = 2.0 / out.support;
  return out;
}

} // namespace helfrich
