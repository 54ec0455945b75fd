#include "helfrich/energy.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/AutoDiff>

#include "face_kernel.hpp"

namespace helfrich {

namespace {

constexpr double kPi = std::numbers::pi;

void require_sphere_topology(const TriMesh& mesh) {
  if (mesh.euler_characteristic() != 2)
    throw MeshError(MeshError::Kind::Topology, "helfrich_energy: chi != 2");
}

// Vertex accumulators of the cotangent scheme.
struct VertexSums {
  std::vector<Vec3> cotan;
  std::vector<Vec3> weighted_normal;
  std::vector<double> area;
  double face_area = 0.0;
  double volume = 0.0;
};

VertexSums accumulate(const TriMesh& mesh) {
  const std::size_t n = mesh.num_vertices();
  const auto& x = mesh.vertices();
  VertexSums s{std::vector<Vec3>(n, Vec3::Zero()), std::vector<Vec3>(n, Vec3::Zero()),
               std::vector<double>(n, 0.0)};
  for (const Face& t : mesh.faces()) {
    const auto q = detail::face_quantities<double>(x[t[0]], x[t[1]], x[t[2]]);
    for (int i = 0; i < 3; ++i) {
      s.cotan[t[i]] += q.cotan_vec[i];
      s.weighted_normal[t[i]] += q.half_cross;
      s.area[t[i]] += q.mixed_area[i];
    }
    s.face_area += q.area;
    s.volume += q.volume;
  }
  return s;
}

EnergyBreakdown assemble(const VertexSums& s, const std::vector<double>& H,
                         const ParameterSet& params, int chi) {
  EnergyBreakdown e;
  double bend = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    const double d = H[i] - params.c0;
    bend += d * d * s.area[i];
  }
  e.bending = 0.5 * params.kc * bend;
  e.area_term = params.lambda * s.face_area;
  e.volume_term = params.p * s.volume;
  e.topological = 2.0 * params.kbar * kPi * chi;
  e.total = e.bending + e.area_term + e.volume_term + e.topological;
  return e;
}

std::vector<double> mean_curvature(const VertexSums& s) {
  std::vector<double> H(s.area.size());
  for (std::size_t i = 0; i < H.size(); ++i)
    H[i] = -s.cotan[i].dot(s.weighted_normal[i].normalized()) / s.area[i];
  return H;
}

} // namespace

EnergyBreakdown helfrich_energy(const TriMesh& mesh, const ParameterSet& params) {
  require_sphere_topology(mesh);
  const VertexSums s = accumulate(mesh);
  return assemble(s, mean_curvature(s), params, mesh.euler_characteristic());
}

double tilde_equivalence_check(const TriMesh& mesh, const ParameterSet& params) {
  const EnergyBreakdown e = helfrich_energy(mesh, params);
  const VertexSums s = accumulate(mesh);
  const std::vector<double> H = mean_curvature(s);
  double integral = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    const double d = H[i] - params.c0;
    integral += d * d * s.area[i];
  }
  const double l1 = params.lambda / (2.0 * params.kc);
  const double l2 = params.p / (2.0 * params.kc);
  const double tilde = 0.25 * integral + l1 * s.face_area + l2 * s.volume;
  return e.total - (2.0 * params.kc * tilde + 4.0 * params.kbar * kPi);
}

ResidualField el_residual_field(const TriMesh& mesh, const ParameterSet& params) {
  const CurvatureField f = curvature_field(mesh);
  const std::vector<double> lapH = laplace_beltrami_apply(mesh, f.H);
  const double kc = params.kc, c0 = params.c0;
  ResidualField r;
  r.values.resize(f.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = kc * (lapH[i] + f.H[i] * f.Ao2[i]) + 2.0 * kc * c0 * f.K[i] -
                     (kc * c0 * c0 / 2.0 + params.lambda) * f.H[i] - params.p;
    r.values[i] = v;
    r.sup = std::max(r.sup, std::abs(v));
    ss += f.area[i] * v * v;
  }
  r.l2 = std::sqrt(ss);
  return r;
}

EnergyBreakdown energy_and_gradient(const TriMesh& mesh, const ParameterSet& params,
                                    std::vector<Vec3>& gradient) {
  using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;
  require_sphere_topology(mesh);
  const VertexSums s = accumulate(mesh);
  const std::vector<double> H = mean_curvature(s);
  const std::size_t n = mesh.num_vertices();
  const double kc = params.kc, c0 = params.c0;

  // Adjoints of the bending energy with respect to the vertex sums, from
  // H_i = -<C_i, N_i/|N_i|> / A_i.
  std::vector<Vec3> adj_cotan(n), adj_normal(n);
  std::vector<double> adj_area(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double len = s.weighted_normal[i].norm();
    const Vec3 nu = s.weighted_normal[i] / len;
    const double d = H[i] - c0;
    adj_cotan[i] = -kc * d * nu;
    adj_normal[i] = -kc * d * (s.cotan[i] - s.cotan[i].dot(nu) * nu) / len;
    adj_area[i] = 0.5 * kc * d * d - kc * d * H[i];
  }

  gradient.assign(n, Vec3::Zero());
  const auto& x = mesh.vertices();
  for (const Face& t : mesh.faces()) {
    detail::V3<AD> p[3];
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 3; ++d) p[k](d) = AD(x[t[k]](d), 9, 3 * k + d);
    const auto q = detail::face_quantities<AD>(p[0], p[1], p[2]);
    AD local = params.lambda * q.area + params.p * q.volume;
    for (int k = 0; k < 3; ++k) {
      const int v = t[k];
      for (int d = 0; d < 3; ++d)
        local += adj_cotan[v](d) * q.cotan_vec[k](d) + adj_normal[v](d) * q.half_cross(d);
      local += adj_area[v] * q.mixed_area[k];
    }
    const auto& der = local.derivatives();
    for (int k = 0; k < 3; ++k) gradient[t[k]] += Vec3(der(3 * k), der(3 * k + 1), der(3 * k + 2));
  }
  return assemble(s, H, params, mesh.euler_characteristic());
}

std::vector<Vec3> energy_gradient(const TriMesh& mesh, const ParameterSet& params) {
  std::vector<Vec3> g;
  energy_and_gradient(mesh, params, g);
  return g;
}

double area_weighted_norm(const std::vector<Vec3>& gradient, const std::vector<double>& area) {
  double ss = 0.0;
  for (std::size_t i = 0; i < gradient.size(); ++i) ss += gradient[i].squaredNorm() / area[i];
  return std::sqrt(ss);
}

double fd_gradient_check(const TriMesh& mesh, const ParameterSet& params, double h, int sample,
                         std::uint64_t seed) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient_check: h must be positive");
  std::vector<Vec3> g;
  const double energy = energy_and_gradient(mesh, params, g).total;
  const std::size_t n = mesh.num_vertices();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  double worst = 0.0;
  for (int s = 0; s < sample; ++s) {
    std::vector<Vec3> dir(n);
    double len2 = 0.0;
    for (Vec3& d : dir) {
      d = Vec3(normal(rng), normal(rng), normal(rng));
      len2 += d.squaredNorm();
    }
    const double inv = 1.0 / std::sqrt(len2);
    double analytic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] *= inv;
      analytic += g[i].dot(dir[i]);
    }
    const auto energy_at = [&](double t) {
      std::vector<Vec3> moved = mesh.vertices();
      for (std::size_t i = 0; i < n; ++i) moved[i] += t * dir[i];
      return helfrich_energy(mesh.with_vertices(std::move(moved)), params).total;
    };
    // Fourth-order central stencil.
    const double fd = (-energy_at(2.0 * h) + 8.0 * energy_at(h) - 8.0 * energy_at(-h) +
                       energy_at(-2.0 * h)) /
                      (12.0 * h);
    const double denom =
        std::max({std::abs(analytic), std::abs(fd), 1e-8 * (1.0 + std::abs(energy))});
    worst = std::max(worst, std::abs(fd - analytic) / denom);
  }
  return worst;
}

} // namespace helfrich
