#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ballharm/coords.hpp"
#include "ballharm/error.hpp"

namespace ballharm {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::size_t, 3>> faces;

  bool empty() const { return faces.empty(); }
};

struct PointCloud {
  std::vector<Vec3> points;
  bool normalized = false;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

namespace detail {

// Next line that is neither blank nor a comment. Returns false at end of input.
inline bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

}  // namespace detail

// OFF reader. Accepts the ModelNet variant where the counts follow "OFF" on the
// same line ("OFF3 1 0" or "OFF 3 1 0"). Polygons are fan-triangulated and faces
// with a repeated vertex index are dropped.
inline TriangleMesh parse_off(std::istream& in, const std::string& source = "<off>") {
  std::string line;
  std::size_t lineno = 0;
  if (!detail::next_content_line(in, line, lineno)) throw ParseError(source, lineno, "empty file");

  const auto start = line.find_first_not_of(" \t");
  if (line.compare(start, 3, "OFF") != 0) throw ParseError(source, lineno, "missing OFF header");
  std::string counts = line.substr(start + 3);
  if (counts.find_first_not_of(" \t\r") == std::string::npos) {
    if (!detail::next_content_line(in, line, lineno))
      throw ParseError(source, lineno, "missing element counts");
    counts = line;
  }

  long long nv = -1, nf = -1, ne = 0;
  {
    std::istringstream ss(counts);
    if (!(ss >> nv >> nf) || nv < 0 || nf < 0)
      throw ParseError(source, lineno, "malformed element counts");
    ss >> ne;
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (!detail::next_content_line(in, line, lineno))
      throw ParseError(source, lineno, "unexpected end of file in vertex list");
    std::istringstream ss(line);
    Vec3 v;
    if (!(ss >> v.x >> v.y >> v.z)) throw ParseError(source, lineno, "malformed vertex");
    mesh.vertices.push_back(v);
  }

  mesh.faces.reserve(static_cast<std::size_t>(nf));
  for (long long f = 0; f < nf; ++f) {
    if (!detail::next_content_line(in, line, lineno))
      throw ParseError(source, lineno, "unexpected end of file in face list");
    std::istringstream ss(line);
    long long k = 0;
    if (!(ss >> k)) throw ParseError(source, lineno, "malformed face");
    if (k < 3) throw ParseError(source, lineno, "face with fewer than 3 vertices");
    std::vector<std::size_t> idx(static_cast<std::size_t>(k));
    for (auto& v : idx) {
      long long raw = -1;
      if (!(ss >> raw)) throw ParseError(source, lineno, "face has too few indices");
      if (raw < 0 || raw >= nv)
        throw ParseError(source, lineno,
                         "vertex index " + std::to_string(raw) + " out of range (" +
                             std::to_string(nv) + " vertices)");
      v = static_cast<std::size_t>(raw);
    }
    for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
      const std::array<std::size_t, 3> tri{idx[0], idx[j], idx[j + 1]};
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
      mesh.faces.push_back(tri);
    }
  }
  return mesh;
}

inline TriangleMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_off(in, path);
}

// One "x y z" triple per line; blank lines and '#' comments are skipped.
inline PointCloud parse_xyz(std::istream& in, const std::string& source = "<xyz>") {
  PointCloud pc;
  std::string line;
  std::size_t lineno = 0;
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream ss(line);
    Vec3 v;
    if (!(ss >> v.x >> v.y >> v.z)) throw ParseError(source, lineno, "expected three coordinates");
    pc.points.push_back(v);
  }
  return pc;
}

inline PointCloud load_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_xyz(in, path);
}

inline void write_xyz(std::ostream& out, const PointCloud& pc) {
  out << std::setprecision(17);
  for (const auto& p : pc.points) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
}

inline void save_xyz(const std::string& path, const PointCloud& pc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_xyz(out, pc);
}

// Area-weighted uniform sampling of the surface.
inline PointCloud mesh_to_points(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
  if (mesh.empty()) throw DegenerateInputError("mesh_to_points: mesh has no faces");
  if (count < 1) throw ConfigError("mesh_to_points: count must be at least 1");

  std::vector<double> areas(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    for (auto i : t)
      if (i >= mesh.vertices.size()) throw DomainError("mesh_to_points: face index out of range");
    areas[f] = detail::triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    total += areas[f];
  }
  if (!(total > 0.0)) throw DegenerateInputError("mesh_to_points: mesh has zero surface area");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);

  PointCloud pc;
  pc.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& t = mesh.faces[pick(rng)];
    const Vec3 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    const double s = std::sqrt(u(rng)), w = u(rng);
    pc.points.push_back((1.0 - s) * a + (s * (1.0 - w)) * b + (s * w) * c);
  }
  return pc;
}

}  // namespace ballharm
