#include "helfrich/sphere_fit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace helfrich {

SphereFit sphere_fit(std::span<const Vec3> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 4) throw std::invalid_argument("sphere_fit: need at least 4 points");

  // Work relative to the centroid and normalized scale for conditioning.
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (const Vec3& p : points) spread = std::max(spread, (p - mean).norm());
  if (!(spread > 0.0)) throw std::invalid_argument("sphere_fit: all points coincide");

  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 q = (points[i] - mean) / spread;
    A.row(i) << 2.0 * q.x(), 2.0 * q.y(), 2.0 * q.z(), 1.0;
    b(i) = q.squaredNorm();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) throw std::invalid_argument("sphere_fit: points are coplanar or degenerate");
  const Eigen::Vector4d sol = qr.solve(b);

  const Vec3 c = sol.head<3>();
  const double r2 = sol(3) + c.squaredNorm();
  if (!(r2 > 0.0)) throw std::invalid_argument("sphere_fit: no real sphere fits the points");

  SphereFit fit;
  fit.center = mean + spread * c;
  fit.radius = spread * std::sqrt(r2);
  double ss = 0.0;
  for (const Vec3& p : points) {
    const double d = (p - fit.center).norm() - fit.radius;
    ss += d * d;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

SphereFit sphere_fit(const TriMesh& mesh) { return sphere_fit(std::span<const Vec3>(mesh.vertices())); }

} // namespace helfrich
