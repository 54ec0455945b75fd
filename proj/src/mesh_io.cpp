#include "helfrich/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace helfrich {

namespace {

using K = MeshError::Kind;

static_assert(std::endian::native == std::endian::little,
              "binary PLY support assumes a little-endian host");

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError(K::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshError(K::Io, "cannot write " + path.string());
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// OBJ face tokens may be "i", "i/t", "i//n" or "i/t/n"; indices may be
// negative (relative to the end).
int parse_obj_index(const std::string& token, std::size_t num_vertices) {
  const std::string head = token.substr(0, token.find('/'));
  long idx = 0;
  try {
    idx = std::stol(head);
  } catch (const std::exception&) {
    throw MeshError(K::Io, "OBJ: bad face index '" + token + "'");
  }
  if (idx < 0) idx += static_cast<long>(num_vertices) + 1;
  if (idx < 1 || idx > static_cast<long>(num_vertices))
    throw MeshError(K::Io, "OBJ: face index out of range '" + token + "'");
  return static_cast<int>(idx - 1);
}

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

PlyType parse_ply_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::I8;
  if (s == "uchar" || s == "uint8") return PlyType::U8;
  if (s == "short" || s == "int16") return PlyType::I16;
  if (s == "ushort" || s == "uint16") return PlyType::U16;
  if (s == "int" || s == "int32") return PlyType::I32;
  if (s == "uint" || s == "uint32") return PlyType::U32;
  if (s == "float" || s == "float32") return PlyType::F32;
  if (s == "double" || s == "float64") return PlyType::F64;
  throw MeshError(K::Io, "PLY: unknown property type '" + s + "'");
}

template <class T>
double read_raw(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw MeshError(K::Io, "PLY: unexpected end of binary data");
  return static_cast<double>(v);
}

double read_ply_value(std::istream& in, PlyType t, bool binary) {
  if (!binary) {
    double v;
    if (!(in >> v)) throw MeshError(K::Io, "PLY: unexpected end of ascii data");
    return v;
  }
  switch (t) {
  case PlyType::I8: return read_raw<std::int8_t>(in);
  case PlyType::U8: return read_raw<std::uint8_t>(in);
  case PlyType::I16: return read_raw<std::int16_t>(in);
  case PlyType::U16: return read_raw<std::uint16_t>(in);
  case PlyType::I32: return read_raw<std::int32_t>(in);
  case PlyType::U32: return read_raw<std::uint32_t>(in);
  case PlyType::F32: return read_raw<float>(in);
  case PlyType::F64: return read_raw<double>(in);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::F64;
  bool is_list = false;
  PlyType count_type = PlyType::U8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

} // namespace

TriMesh read_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) throw MeshError(K::Io, "OBJ: malformed vertex line");
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(parse_obj_index(tok, verts.size()));
      if (idx.size() != 3) throw MeshError(K::Io, "OBJ: only triangular faces are supported");
      faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
  return TriMesh(std::move(verts), std::move(faces));
}

TriMesh read_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_obj(in);
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
  for (const Vec3& v : mesh.vertices())
    out << "v " << fmt17(v.x()) << ' ' << fmt17(v.y()) << ' ' << fmt17(v.z()) << '\n';
  for (const Face& f : mesh.faces())
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  auto out = open_out(path);
  write_obj(out, mesh);
  if (!out) throw MeshError(K::Io, "failed writing " + path.string());
}

TriMesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw MeshError(K::Io, "PLY: missing magic");
  bool binary = false;
  std::vector<PlyElement> elements;
  while (true) {
    if (!std::getline(in, line)) throw MeshError(K::Io, "PLY: unterminated header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end_header") break;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") binary = true;
      else if (fmt != "ascii") throw MeshError(K::Io, "PLY: unsupported format " + fmt);
    } else if (key == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) throw MeshError(K::Io, "PLY: property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        p.is_list = true;
        p.count_type = parse_ply_type(ct);
        p.type = parse_ply_type(it);
      } else {
        p.type = parse_ply_type(type);
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    }
  }

  std::vector<Vec3> verts;
  std::vector<Face> faces;
  for (const PlyElement& e : elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      Vec3 v = Vec3::Zero();
      for (const PlyProperty& p : e.props) {
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(read_ply_value(in, p.count_type, binary));
          std::vector<int> idx(n);
          for (auto& k : idx) k = static_cast<int>(read_ply_value(in, p.type, binary));
          if (e.name == "face" && (p.name == "vertex_indices" || p.name == "vertex_index")) {
            if (n != 3) throw MeshError(K::Io, "PLY: only triangular faces are supported");
            faces.push_back({idx[0], idx[1], idx[2]});
          }
        } else {
          const double value = read_ply_value(in, p.type, binary);
          if (e.name == "vertex") {
            if (p.name == "x") v.x() = value;
            else if (p.name == "y") v.y() = value;
            else if (p.name == "z") v.z() = value;
          }
        }
      }
      if (e.name == "vertex") verts.push_back(v);
    }
  }
  return TriMesh(std::move(verts), std::move(faces));
}

TriMesh read_ply(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_ply(in);
}

void write_ply(std::ostream& out, const TriMesh& mesh) {
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.num_vertices() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.num_faces() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (const Vec3& v : mesh.vertices()) {
    const double xyz[3] = {v.x(), v.y(), v.z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
  }
  for (const Face& f : mesh.faces()) {
    const std::uint8_t n = 3;
    const std::int32_t idx[3] = {f[0], f[1], f[2]};
    out.write(reinterpret_cast<const char*>(&n), 1);
    out.write(reinterpret_cast<const char*>(idx), sizeof idx);
  }
}

void write_ply(const std::filesystem::path& path, const TriMesh& mesh) {
  auto out = open_out(path);
  write_ply(out, mesh);
  if (!out) throw MeshError(K::Io, "failed writing " + path.string());
}

namespace {
std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}
} // namespace

TriMesh read_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".obj") return read_obj(path);
  if (ext == ".ply") return read_ply(path);
  throw MeshError(K::Io, "unsupported mesh extension '" + ext + "' (use .obj or .ply)");
}

void write_mesh(const std::filesystem::path& path, const TriMesh& mesh) {
  const std::string ext = lower_ext(path);
  if (ext == ".obj") return write_obj(path, mesh);
  if (ext == ".ply") return write_ply(path, mesh);
  throw MeshError(K::Io, "unsupported mesh extension '" + ext + "' (use .obj or .ply)");
}

} // namespace helfrich
