#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "helfrich/mesh.hpp"
#include "helfrich/params.hpp"

namespace helfrich {

/// Per-vertex discrete curvature. Sign convention: Delta f = -H nu with
/// outward nu, so a round sphere of radius r has H = 2/r.
struct CurvatureField {
  std::vector<double> H;           ///< mean curvature, kappa1 + kappa2
  std::vector<double> K;           ///< Gauss curvature (angle defect / area)
  std::vector<double> Ao2;         ///< |A°|^2 = H^2/2 - 2K, clamped at 0
  std::vector<double> kappa_minus; ///< H/2 - sqrt(Ao2/2)
  std::vector<double> kappa_plus;  ///< H/2 + sqrt(Ao2/2)
  std::vector<double> area;        ///< mixed Voronoi area
  std::vector<Vec3> normal;        ///< outward unit normal (area weighted)
  std::vector<bool> degenerate;    ///< one-ring unusable (zero area/normal)
  std::vector<bool> clamped;       ///< Ao2 was negative before clamping

  std::size_t size() const { return H.size(); }
};

CurvatureField curvature_field(const TriMesh& mesh);

/// Cotangent Laplace-Beltrami operator normalized by mixed areas.
std::vector<double> laplace_beltrami_apply(const TriMesh& mesh, std::span<const double> u);

/// Sum of K_i * area_i; equals 2 pi chi exactly for the angle-defect scheme.
double total_gauss_curvature(const CurvatureField& field);

/// Integral of H over the area, divided by the area.
double average_mean_curvature(const CurvatureField& field);

enum class ConvexityClass { WeaklyConvex, StrictlyMeanConvex, WeaklyMeanConvex, NotMeanConvex };
std::string_view to_string(ConvexityClass c);

/// Median of |H|: the curvature scale relative tolerances refer to.
double curvature_scale(const CurvatureField& field);

bool is_weakly_convex(const CurvatureField& field, const Tolerances& tol = {});
bool is_strictly_mean_convex(const CurvatureField& field, const Tolerances& tol = {});
bool is_weakly_mean_convex(const CurvatureField& field, const Tolerances& tol = {});

/// Strongest class that holds, checked in the enum's order.
ConvexityClass convexity_class(const CurvatureField& field, const Tolerances& tol = {});

/// Generalized winding number of the closed mesh around a point.
double winding_number(const TriMesh& mesh, const Vec3& point);

struct MaxHeightCheck {
  int vertex = -1;
  double H = 0.0;
  double support = 0.0; ///< <f, nu> at that vertex
  double bound = 0.0;   ///< 4 / <f, nu>, the bound in its customary form
  /// 2 / <f, nu>. Tracing Hess |f|^2 = 2g + 2<f, D^2 f> gives
  /// Delta |f|^2 = 4 - 2 H <f, nu>, so at the maximum H >= 2/<f, nu>; the
  /// unit sphere (H = 2, <f, nu> = 1) attains it and violates 4/<f, nu>.
  double sharp_bound = 0.0;
};

/// Mean curvature at the vertex farthest from the origin. The origin must be
/// enclosed (winding number ~ 1), otherwise std::invalid_argument asks the
/// caller to translate the mesh.
MaxHeightCheck max_height_point_check(const TriMesh& mesh);

} // namespace helfrich
