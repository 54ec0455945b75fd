#pragma once

#include <filesystem>
#include <iosfwd>

#include "helfrich/mesh.hpp"

namespace helfrich {

// ASCII Wavefront OBJ, triangles only. Coordinates are written with 17
// significant digits so a write/read cycle reproduces the mesh exactly.
TriMesh read_obj(std::istream& in);
TriMesh read_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const TriMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

// PLY. Writing always produces binary_little_endian with double coordinates;
// reading accepts ascii and binary_little_endian with float/double vertices.
TriMesh read_ply(std::istream& in);
TriMesh read_ply(const std::filesystem::path& path);
void write_ply(std::ostream& out, const TriMesh& mesh);
void write_ply(const std::filesystem::path& path, const TriMesh& mesh);

/// Dispatches on the .obj / .ply extension.
TriMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const TriMesh& mesh);

} // namespace helfrich
