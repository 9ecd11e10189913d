#pragma once

// Small synthetic meshes used as a stand-in for ModelNet objects.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ballharm/coords.hpp"
#include "ballharm/mesh.hpp"

namespace ballharm::shapes {

inline void append(TriangleMesh& dst, const TriangleMesh& src) {
  const std::size_t base = dst.vertices.size();
  dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
  for (auto f : src.faces) dst.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
}

inline TriangleMesh translated(TriangleMesh m, Vec3 t) {
  for (auto& v : m.vertices) v = v + t;
  return m;
}

// Grid over (u, v) in [0,1]^2 mapped through fn; quads split into two triangles.
inline TriangleMesh param_surface(const std::function<Vec3(double, double)>& fn, int nu, int nv) {
  TriangleMesh m;
  for (int i = 0; i <= nu; ++i)
    for (int j = 0; j <= nv; ++j) m.vertices.push_back(fn(double(i) / nu, double(j) / nv));
  auto at = [nv](int i, int j) { return std::size_t(i * (nv + 1) + j); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      m.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  return m;
}

// Axis-aligned box centred at c with half extents h.
inline TriangleMesh box(Vec3 c, Vec3 h) {
  TriangleMesh m;
  for (int k = 0; k < 8; ++k)
    m.vertices.push_back(c + Vec3{(k & 1) ? h.x : -h.x, (k & 2) ? h.y : -h.y, (k & 4) ? h.z : -h.z});
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.faces.push_back({std::size_t(q[0]), std::size_t(q[1]), std::size_t(q[2])});
    m.faces.push_back({std::size_t(q[0]), std::size_t(q[2]), std::size_t(q[3])});
  }
  return m;
}

inline TriangleMesh disk(Vec3 c, double radius, int seg) {
  return param_surface(
      [=](double u, double v) {
        const double t = kTwoPi * v, s = radius * u;
        return c + Vec3{s * std::cos(t), 0.0, s * std::sin(t)};
      },
      4, seg);
}

// Frustum along y from y0 (radius r0) to y1 (radius r1), with caps.
inline TriangleMesh frustum(double y0, double r0, double y1, double r1, int seg = 32) {
  TriangleMesh m = param_surface(
      [=](double u, double v) {
        const double t = kTwoPi * v, r = r0 + (r1 - r0) * u;
        return Vec3{r * std::cos(t), y0 + (y1 - y0) * u, r * std::sin(t)};
      },
      8, seg);
  if (r0 > 0.0) append(m, disk({0, y0, 0}, r0, seg));
  if (r1 > 0.0) append(m, disk({0, y1, 0}, r1, seg));
  return m;
}

inline TriangleMesh ellipsoid(Vec3 c, Vec3 radii, int seg = 32) {
  return param_surface(
      [=](double u, double v) {
        const double p = kPi * u, t = kTwoPi * v;
        return c + Vec3{radii.x * std::sin(p) * std::cos(t), radii.y * std::cos(p), radii.z * std::sin(p) * std::sin(t)};
      },
      seg, seg);
}

// Torus in the x-z plane.
inline TriangleMesh torus(Vec3 c, double major, double minor, int seg = 32) {
  return param_surface(
      [=](double u, double v) {
        const double a = kTwoPi * u, b = kTwoPi * v;
        const double rr = major + minor * std::cos(b);
        return c + Vec3{rr * std::cos(a), minor * std::sin(b), rr * std::sin(a)};
      },
      seg, seg / 2);
}

struct NamedMesh {
  std::string name;
  TriangleMesh mesh;
};

// Twelve shapes of furniture and household scale, none of them spherically symmetric.
inline std::vector<NamedMesh> desk_set() {
  std::vector<NamedMesh> out;
  out.push_back({"box", box({0, 0, 0}, {0.9, 0.5, 0.3})});
  out.push_back({"cylinder", frustum(-0.8, 0.35, 0.8, 0.35)});
  out.push_back({"cone", frustum(-0.6, 0.6, 0.9, 0.0)});
  out.push_back({"ellipsoid", ellipsoid({0, 0, 0}, {0.9, 0.5, 0.35})});
  out.push_back({"torus", torus({0, 0, 0}, 0.7, 0.22)});
  {
    TriangleMesh t = box({0, 0.45, 0}, {0.8, 0.05, 0.5});
    for (double sx : {-0.7, 0.7})
      for (double sz : {-0.4, 0.4}) append(t, box({sx, 0.0, sz}, {0.05, 0.4, 0.05}));
    out.push_back({"table", t});
  }
  {
    TriangleMesh c = box({0, 0.0, 0}, {0.4, 0.05, 0.4});
    append(c, box({0, 0.5, -0.37}, {0.4, 0.45, 0.04}));
    for (double sx : {-0.35, 0.35})
      for (double sz : {-0.35, 0.35}) append(c, box({sx, -0.45, sz}, {0.04, 0.4, 0.04}));
    out.push_back({"chair", c});
  }
  {
    TriangleMesh l = frustum(-0.7, 0.4, -0.6, 0.4);
    append(l, frustum(-0.6, 0.05, 0.4, 0.05, 16));
    append(l, frustum(0.3, 0.2, 0.75, 0.45));
    out.push_back({"lamp", l});
  }
  {
    TriangleMesh b = frustum(-0.8, 0.3, 0.2, 0.3);
    append(b, frustum(0.2, 0.3, 0.55, 0.1));
    append(b, frustum(0.55, 0.1, 0.85, 0.1, 16));
    out.push_back({"bottle", b});
  }
  {
    TriangleMesh p = ellipsoid({0, 0, 0}, {1.0, 0.15, 0.15});
    append(p, box({0.05, 0, 0}, {0.2, 0.03, 0.9}));
    append(p, box({-0.85, 0.2, 0}, {0.08, 0.2, 0.03}));
    out.push_back({"airplane", p});
  }
  {
    TriangleMesh m = frustum(-0.5, 0.4, 0.5, 0.4);
    TriangleMesh handle = param_surface(
        [](double u, double v) {
          const double a = kTwoPi * u, b = kTwoPi * v;
          const double rr = 0.25 + 0.06 * std::cos(b);
          return Vec3{0.55 + rr * std::cos(a), rr * std::sin(a), 0.06 * std::sin(b)};
        },
        24, 12);
    append(m, handle);
    out.push_back({"mug", m});
  }
  {
    TriangleMesh s = box({0, -0.3, 0}, {0.9, 0.1, 0.35});
    append(s, box({0, 0.1, -0.3}, {0.9, 0.3, 0.05}));
    append(s, box({-0.85, -0.1, 0}, {0.05, 0.2, 0.35}));
    append(s, box({0.85, -0.1, 0}, {0.05, 0.2, 0.35}));
    out.push_back({"sofa", s});
  }
  return out;
}

}  // namespace ballharm::shapes
