#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace helfrich {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

class MeshError : public std::runtime_error {
public:
  enum class Kind { Topology, Degenerate, Orientation, Io };
  MeshError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// Connectivity shared between meshes that differ only in vertex positions.
struct MeshTopology {
  std::size_t num_vertices = 0;
  std::vector<Face> faces;
  std::vector<std::array<int, 2>> edges;       ///< undirected, (lo, hi)
  std::vector<std::vector<int>> vertex_faces;  ///< incident faces per vertex
  std::vector<std::vector<int>> neighbors;     ///< one-ring vertices, sorted
};

/// Closed, consistently oriented, genus-0 triangle mesh. Construction
/// validates the manifold structure, Euler characteristic 2 and the absence
/// of degenerate faces; the mesh is immutable afterwards.
class TriMesh {
public:
  /// Faces smaller than this fraction of the mean face area are degenerate.
  static constexpr double kDegenerateAreaRatio = 1e-3;

  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return topo_->faces; }
  const std::vector<std::array<int, 2>>& edges() const { return topo_->edges; }
  const std::vector<std::vector<int>>& vertex_faces() const { return topo_->vertex_faces; }
  const std::vector<std::vector<int>>& neighbors() const { return topo_->neighbors; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return topo_->faces.size(); }
  std::size_t num_edges() const { return topo_->edges.size(); }
  int euler_characteristic() const {
    return static_cast<int>(num_vertices()) - static_cast<int>(num_edges()) +
           static_cast<int>(num_faces());
  }

  /// Same connectivity, new positions. Rejects degenerate faces.
  TriMesh with_vertices(std::vector<Vec3> vertices) const;

  double face_area(int f) const;
  Vec3 face_normal(int f) const; ///< unit normal, right-hand rule
  double mean_edge_length() const;
  double bounding_box_diagonal() const;

private:
  TriMesh(std::shared_ptr<const MeshTopology> topo, std::vector<Vec3> vertices);
  void check_faces_nondegenerate() const;

  std::shared_ptr<const MeshTopology> topo_;
  std::vector<Vec3> vertices_;
};

struct MeshMeasures {
  double area = 0.0;
  double volume = 0.0;
  int chi = 0;
};

/// Area, enclosed volume (divergence theorem) and Euler characteristic.
/// Throws MeshError(Orientation) when the enclosed volume is negative.
MeshMeasures measures(const TriMesh& mesh);

/// Signed enclosed volume, positive for outward orientation.
double signed_volume(const TriMesh& mesh);

/// Icosahedron subdivided s times with every vertex projected onto the
/// sphere of radius r about center. V = 10 * 4^s + 2.
TriMesh make_icosphere(int subdivisions, double r, const Vec3& center = Vec3::Zero());

/// Axis-aligned cube surface; each face is a divisions x divisions grid of
/// split squares (12 triangles for divisions = 1).
TriMesh make_cube(double side = 1.0, const Vec3& center = Vec3(0.5, 0.5, 0.5), int divisions = 1);

/// Applies x -> linear * x + translation to every vertex. A reflection flips
/// the orientation, which callers must undo if they need outward normals.
TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& linear,
                    const Vec3& translation = Vec3::Zero());

/// Minimum over faces of 4 sqrt(3) A / (l0^2 + l1^2 + l2^2); 1 for an
/// equilateral triangle, 0 for a degenerate one.
double min_face_quality(const TriMesh& mesh);

/// Smallest interior angle over all faces, in radians.
double min_face_angle(const TriMesh& mesh);

} // namespace helfrich
