#include "helfrich/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace helfrich {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::shared_ptr<const MeshTopology> build_topology(std::size_t num_vertices,
                                                   std::vector<Face> faces) {
  using K = MeshError::Kind;
  if (faces.empty()) throw MeshError(K::Topology, "mesh has no faces");
  const int nv = static_cast<int>(num_vertices);

  auto topo = std::make_shared<MeshTopology>();
  topo->num_vertices = num_vertices;
  topo->vertex_faces.assign(num_vertices, {});
  topo->neighbors.assign(num_vertices, {});

  // Every directed edge must appear once and its reverse once.
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(faces.size() * 3);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (a < 0 || a >= nv) throw MeshError(K::Topology, "face references vertex out of range");
      if (a == b) throw MeshError(K::Topology, "face repeats a vertex");
      if (!directed.emplace(edge_key(a, b), static_cast<int>(f)).second)
        throw MeshError(K::Topology, "non-manifold or inconsistently oriented edge (" +
                                         std::to_string(a) + "," + std::to_string(b) + ")");
      topo->vertex_faces[a].push_back(static_cast<int>(f));
    }
  }
  for (const auto& [key, f] : directed) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (!directed.count(edge_key(b, a)))
      throw MeshError(K::Topology, "boundary edge (" + std::to_string(a) + "," +
                                       std::to_string(b) + "): mesh is not closed");
    if (a < b) topo->edges.push_back({a, b});
  }
  std::sort(topo->edges.begin(), topo->edges.end());
  for (const auto& [a, b] : topo->edges) {
    topo->neighbors[a].push_back(b);
    topo->neighbors[b].push_back(a);
  }
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (topo->vertex_faces[v].empty())
      throw MeshError(K::Topology, "isolated vertex " + std::to_string(v));
    std::sort(topo->neighbors[v].begin(), topo->neighbors[v].end());
    // Necessary for a closed fan: as many neighbours as incident faces.
    if (topo->neighbors[v].size() != topo->vertex_faces[v].size())
      throw MeshError(K::Topology, "non-manifold vertex " + std::to_string(v));
  }
  topo->faces = std::move(faces);
  const long chi = static_cast<long>(num_vertices) - static_cast<long>(topo->edges.size()) +
                   static_cast<long>(topo->faces.size());
  if (chi != 2)
    throw MeshError(K::Topology,
                    "Euler characteristic " + std::to_string(chi) + " != 2 (genus-0 required)");
  return topo;
}

} // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : topo_(build_topology(vertices.size(), std::move(faces))), vertices_(std::move(vertices)) {
  check_faces_nondegenerate();
}

TriMesh::TriMesh(std::shared_ptr<const MeshTopology> topo, std::vector<Vec3> vertices)
    : topo_(std::move(topo)), vertices_(std::move(vertices)) {
  check_faces_nondegenerate();
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size())
    throw MeshError(MeshError::Kind::Topology, "with_vertices: vertex count mismatch");
  return TriMesh(topo_, std::move(vertices));
}

void TriMesh::check_faces_nondegenerate() const {
  for (const Vec3& v : vertices_) {
    if (!v.allFinite()) throw MeshError(MeshError::Kind::Degenerate, "non-finite vertex position");
  }
  double total = 0.0;
  double smallest = INFINITY;
  for (std::size_t f = 0; f < num_faces(); ++f) {
    const double a = face_area(static_cast<int>(f));
    total += a;
    smallest = std::min(smallest, a);
  }
  const double mean = total / static_cast<double>(num_faces());
  if (!(smallest > kDegenerateAreaRatio * mean))
    throw MeshError(MeshError::Kind::Degenerate, "degenerate face: area " +
                                                     std::to_string(smallest) + " vs mean " +
                                                     std::to_string(mean));
}

double TriMesh::face_area(int f) const {
  const Face& t = faces()[f];
  return 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
}

Vec3 TriMesh::face_normal(int f) const {
  const Face& t = faces()[f];
  return (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).normalized();
}

double TriMesh::mean_edge_length() const {
  double sum = 0.0;
  for (const auto& [a, b] : edges()) sum += (vertices_[a] - vertices_[b]).norm();
  return sum / static_cast<double>(num_edges());
}

double TriMesh::bounding_box_diagonal() const {
  Vec3 lo = vertices_.front(), hi = vertices_.front();
  for (const Vec3& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

double signed_volume(const TriMesh& mesh) {
  const auto& x = mesh.vertices();
  double vol = 0.0;
  for (const Face& t : mesh.faces()) vol += x[t[0]].dot(x[t[1]].cross(x[t[2]]));
  return vol / 6.0;
}

MeshMeasures measures(const TriMesh& mesh) {
  MeshMeasures m;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) m.area += mesh.face_area(static_cast<int>(f));
  m.volume = signed_volume(mesh);
  m.chi = mesh.euler_characteristic();
  if (m.volume < 0.0)
    throw MeshError(MeshError::Kind::Orientation,
                    "negative enclosed volume: faces are oriented inward");
  return m;
}

TriMesh make_icosphere(int subdivisions, double r, const Vec3& center) {
  if (subdivisions < 0 || subdivisions > 8)
    throw std::invalid_argument("make_icosphere: subdivisions must be in [0, 8]");
  if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("make_icosphere: radius must be positive");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> dirs = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
  };
  for (Vec3& d : dirs) d.normalize();
  std::vector<Face> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1},
  };

  for (int level = 0; level < subdivisions; ++level) {
    std::unordered_map<std::uint64_t, int> midpoint;
    midpoint.reserve(faces.size() * 2);
    const auto mid = [&](int a, int b) {
      const std::uint64_t key = edge_key(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      dirs.push_back((dirs[a] + dirs[b]).normalized());
      const int idx = static_cast<int>(dirs.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  std::vector<Vec3> verts;
  verts.reserve(dirs.size());
  for (const Vec3& d : dirs) verts.push_back(center + r * d);
  return TriMesh(std::move(verts), std::move(faces));
}

TriMesh make_cube(double side, const Vec3& center, int divisions) {
  if (!(side > 0.0)) throw std::domain_error("make_cube: side must be positive");
  if (divisions < 1 || divisions > 256) throw std::invalid_argument("make_cube: divisions must be in [1, 256]");
  const int n = divisions;
  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> v;
  auto vertex = [&](std::array<int, 3> g) {
    auto [it, fresh] = index.try_emplace(g, static_cast<int>(v.size()));
    if (fresh) v.push_back(center + side * (Vec3(g[0], g[1], g[2]) / n - Vec3::Constant(0.5)));
    return it->second;
  };
  std::vector<Face> f;
  // Axes (a, u, v) are cyclic so e_u x e_v = e_a.
  for (int a = 0; a < 3; ++a) {
    const int u = (a + 1) % 3, w = (a + 2) % 3;
    for (int layer : {0, n}) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto at = [&](int di, int dj) {
            std::array<int, 3> g{};
            g[a] = layer, g[u] = i + di, g[w] = j + dj;
            return vertex(g);
          };
          const int p00 = at(0, 0), p10 = at(1, 0), p11 = at(1, 1), p01 = at(0, 1);
          if (layer == n) {
            f.push_back({p00, p10, p11});
            f.push_back({p00, p11, p01});
          } else {
            f.push_back({p00, p11, p10});
            f.push_back({p00, p01, p11});
          }
        }
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& linear, const Vec3& translation) {
  std::vector<Vec3> v;
  v.reserve(mesh.num_vertices());
  for (const Vec3& x : mesh.vertices()) v.push_back(linear * x + translation);
  return mesh.with_vertices(std::move(v));
}

double min_face_quality(const TriMesh& mesh) {
  const auto& x = mesh.vertices();
  double q = INFINITY;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces()[f];
    const double l2 = (x[t[0]] - x[t[1]]).squaredNorm() + (x[t[1]] - x[t[2]]).squaredNorm() +
                      (x[t[2]] - x[t[0]]).squaredNorm();
    q = std::min(q, 4.0 * std::sqrt(3.0) * mesh.face_area(static_cast<int>(f)) / l2);
  }
  return q;
}

double min_face_angle(const TriMesh& mesh) {
  const auto& x = mesh.vertices();
  double best = INFINITY;
  for (const Face& t : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = x[t[(k + 1) % 3]] - x[t[k]];
      const Vec3 b = x[t[(k + 2) % 3]] - x[t[k]];
      best = std::min(best, std::atan2(a.cross(b).norm(), a.dot(b)));
    }
  }
  return best;
}

} // namespace helfrich
