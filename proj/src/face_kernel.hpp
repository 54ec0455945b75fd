#pragma once

// Per-triangle quantities of the cotangent discretization, templated on the
// scalar so the same code serves plain evaluation and forward-mode
// differentiation.

#include <cmath>

#include <Eigen/Core>

namespace helfrich::detail {

template <class T>
using V3 = Eigen::Matrix<T, 3, 1>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const T& x) {
  return x.value();
}

template <class T>
struct FaceQuantities {
  V3<T> cotan_vec[3];  ///< contribution to C_i = 1/2 sum (cot a + cot b)(x_j - x_i)
  V3<T> half_cross;    ///< (x1 - x0) x (x2 - x0) / 2, area-weighted normal
  T mixed_area[3];     ///< mixed Voronoi area share of each corner
  T area;
  T volume;            ///< signed tetrahedron volume with the origin
  T cot[3];            ///< cotangent of the angle at each corner
};

template <class T>
FaceQuantities<T> face_quantities(const V3<T>& p0, const V3<T>& p1, const V3<T>& p2) {
  using std::sqrt;
  FaceQuantities<T> q;
  const V3<T> p[3] = {p0, p1, p2};
  const V3<T> cross = (p1 - p0).cross(p2 - p0);
  const T twice_area = sqrt(cross.squaredNorm());
  q.half_cross = cross * T(0.5);
  q.area = twice_area * T(0.5);
  q.volume = p0.dot(p1.cross(p2)) / T(6.0);

  T dots[3];
  for (int i = 0; i < 3; ++i) {
    const V3<T> a = p[(i + 1) % 3] - p[i];
    const V3<T> b = p[(i + 2) % 3] - p[i];
    dots[i] = a.dot(b);
    q.cot[i] = dots[i] / twice_area;
  }

  for (int i = 0; i < 3; ++i) q.cotan_vec[i].setZero();
  for (int k = 0; k < 3; ++k) {
    // Edge (i, j) is opposite corner k.
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    const T w = q.cot[k] * T(0.5);
    const V3<T> e = p[j] - p[i];
    q.cotan_vec[i] += w * e;
    q.cotan_vec[j] -= w * e;
  }

  int obtuse = -1;
  for (int i = 0; i < 3; ++i) {
    if (value_of(dots[i]) < 0.0) obtuse = i;
  }
  if (obtuse < 0) {
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      // Edge (i, j) sees corner k, edge (i, k) sees corner j.
      q.mixed_area[i] = ((p[j] - p[i]).squaredNorm() * q.cot[k] +
                         (p[k] - p[i]).squaredNorm() * q.cot[j]) /
                        T(8.0);
    }
  } else {
    for (int i = 0; i < 3; ++i) q.mixed_area[i] = q.area * T(i == obtuse ? 0.5 : 0.25);
  }
  return q;
}

} // namespace helfrich::detail
