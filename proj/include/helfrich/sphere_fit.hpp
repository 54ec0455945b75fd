#pragma once

#include <span>

#include "helfrich/mesh.hpp"

namespace helfrich {

struct SphereFit {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double rms = 0.0; ///< root-mean-square of |v - center| - radius
};

/// Algebraic least-squares sphere: solves |v|^2 = 2 c.v + d linearly.
/// Throws std::invalid_argument for fewer than 4 points or coplanar input.
SphereFit sphere_fit(std::span<const Vec3> points);
SphereFit sphere_fit(const TriMesh& mesh);

} // namespace helfrich
