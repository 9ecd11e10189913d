#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "ballharm/coords.hpp"
#include "ballharm/error.hpp"
#include "ballharm/mesh.hpp"
#include "ballharm/quadrature.hpp"

namespace ballharm {

// Centroid and scale applied by normalize_to_ball: p' = (p - centroid) * scale.
struct NormalizeInfo {
  Vec3 centroid;
  double scale = 1.0;
};

inline PointCloud normalize_to_ball(const PointCloud& pc, NormalizeInfo* info = nullptr) {
  if (pc.empty()) throw DegenerateInputError("normalize_to_ball: empty point cloud");
  Vec3 c;
  for (const auto& p : pc.points) c = c + p;
  c = (1.0 / double(pc.size())) * c;

  double rmax = 0.0;
  for (const auto& p : pc.points) rmax = std::max(rmax, norm(p - c));
  if (!(rmax > 0.0)) throw DegenerateInputError("normalize_to_ball: all points coincide");

  PointCloud out;
  out.normalized = true;
  out.points.reserve(pc.size());
  const double s = 1.0 / rmax;
  for (const auto& p : pc.points) out.points.push_back(s * (p - c));
  if (info) *info = {c, s};
  return out;
}

// (y > 0, y < 0). Points on the y = 0 plane go to neither set.
inline std::pair<PointCloud, PointCloud> split_hemispheres(const PointCloud& pc) {
  std::pair<PointCloud, PointCloud> out;
  out.first.normalized = out.second.normalized = pc.normalized;
  for (const auto& p : pc.points) {
    if (p.y > 0.0)
      out.first.points.push_back(p);
    else if (p.y < 0.0)
      out.second.points.push_back(p);
  }
  return out;
}

inline PointCloud rotate_points(const PointCloud& pc, const Rotation& rot) {
  PointCloud out;
  out.normalized = pc.normalized;
  out.points.reserve(pc.size());
  for (const auto& p : pc.points) out.points.push_back(rot.apply(p));
  return out;
}

// Applies R_y(alpha) R_z(beta) R_y(gamma).
inline PointCloud rotate_points(const PointCloud& pc, double alpha, double beta, double gamma) {
  return rotate_points(pc, Rotation::euler_yzy(alpha, beta, gamma));
}

// A real function sampled at the nodes of a quadrature.
struct ShapeFunction {
  std::shared_ptr<const BallQuadrature> quad;
  std::vector<double> values;

  ShapeFunction() = default;
  explicit ShapeFunction(std::shared_ptr<const BallQuadrature> q)
      : quad(std::move(q)), values(quad ? quad->size() : 0, 0.0) {}

  std::size_t size() const { return values.size(); }

  std::size_t support_size() const {
    std::size_t n = 0;
    for (double v : values) n += (v != 0.0);
    return n;
  }
};

inline std::shared_ptr<const BallQuadrature> share(BallQuadrature q) {
  return std::make_shared<const BallQuadrature>(std::move(q));
}

inline ShapeFunction sample_function(std::shared_ptr<const BallQuadrature> quad,
                                     const std::function<double(const BallCoord&)>& fn) {
  if (!quad) throw ConfigError("sample_function: null quadrature");
  ShapeFunction f(quad);
  for (std::size_t i = 0; i < quad->size(); ++i) f.values[i] = fn(quad->node(i));
  return f;
}

// Surface occupancy on the quadrature grid: a node takes its own radius when some
// point's nearest node is that node, and 0 otherwise. A point is discarded when it
// lies further than tol times the local grid spacing from its nearest node along
// any axis. The default tol = 1 keeps every point inside the ball.
inline ShapeFunction rasterize(const PointCloud& pc, std::shared_ptr<const BallQuadrature> quad,
                               double tol = 1.0) {
  if (!quad || quad->empty()) throw ConfigError("rasterize: empty quadrature");
  if (!pc.normalized) throw PreconditionError("rasterize: point cloud is not normalized");
  if (!(tol > 0.0)) throw ConfigError("rasterize: tolerance must be positive");

  ShapeFunction f(quad);
  const auto& radii = quad->radii();
  const auto& phis = quad->phis();
  const double dtheta = kTwoPi / double(quad->thetas().size());
  // A little slack so points exactly on a cell boundary are not lost to rounding.
  const double slack = 1e-12;

  for (const auto& p : pc.points) {
    const BallCoord b = to_ball(p);
    if (b.r > 1.0 + 1e-9) throw PreconditionError("rasterize: point outside the unit ball");
    const std::size_t ir = quad->nearest_radius(b.r);
    const std::size_t ip = quad->nearest_polar(b.phi);
    const std::size_t it = quad->nearest_azimuth(b.theta);
    if (std::abs(b.r - radii[ir]) > tol * BallQuadrature::local_spacing(radii, ir) + slack) continue;
    if (std::abs(b.phi - phis[ip]) > tol * BallQuadrature::local_spacing(phis, ip) + slack) continue;
    double dt = std::abs(b.theta - quad->thetas()[it]);
    dt = std::min(dt, kTwoPi - dt);
    // Near the poles the azimuth carries no information.
    if (b.r > 0.0 && std::sin(b.phi) > 1e-12 && dt > tol * dtheta + slack) continue;
    const std::size_t k = quad->flat_index(ir, it, ip);
    f.values[k] = radii[ir];
  }
  return f;
}

inline ShapeFunction rasterize(const PointCloud& pc, const BallQuadrature& quad, double tol = 1.0) {
  return rasterize(pc, std::make_shared<const BallQuadrature>(quad), tol);
}

}  // namespace ballharm
