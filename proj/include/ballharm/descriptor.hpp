#pragma once

// Run configuration and the fixed-view descriptor: three orthogonal views, each
// split into hemispheres, each hemisphere convolved with a kernel bank and
// measured for axial symmetry. Segments are concatenated.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ballharm/conv.hpp"
#include "ballharm/io.hpp"
#include "ballharm/moments.hpp"
#include "ballharm/pointcloud.hpp"
#include "ballharm/symmetry.hpp"

namespace ballharm {

struct RunConfig {
  int n_max = 5;
  int pinv_iterations = 3;
  std::optional<double> alpha = 0.001;  // nullopt: auto
  QuadResolution quad{48, 48, 48};
  int axes = 4;
  std::uint64_t seed = 1;
  RadialConvention convention = RadialConvention::Orthogonalized;
  double empty_ratio = 1.0;    // empty nodes per occupied node in the lsq system
  int kernel_count = 4;        // size of the random kernel bank
  std::size_t points = 6000;   // surface samples drawn from a mesh
  double raster_tol = 1.0;
  ConvScaling scaling = ConvScaling::Exact;

  PinvOptions pinv() const { return {pinv_iterations, alpha, 0.0, 50}; }
};

inline json to_json(const RunConfig& c) {
  return {{"n_max", c.n_max},
          {"pinv_iterations", c.pinv_iterations},
          {"alpha", c.alpha ? json(*c.alpha) : json("auto")},
          {"quadrature", {c.quad.n_r, c.quad.n_theta, c.quad.n_phi}},
          {"axes", c.axes},
          {"seed", c.seed},
          {"convention", std::string(to_string(c.convention))},
          {"empty_ratio", c.empty_ratio},
          {"kernel_count", c.kernel_count},
          {"points", c.points},
          {"raster_tol", c.raster_tol},
          {"conv_scaling", std::string(to_string(c.scaling))}};
}

// Real packing of a real map: per l, Re c(l,0), then Re c(l,m), Im c(l,m) for m = 1..l.
inline std::vector<double> pack_real(const FeatureMap& fm) {
  std::vector<double> out;
  out.reserve(fm.size());
  for (int l = 0; l <= fm.l_max; ++l) {
    out.push_back(fm.at(l, 0).real());
    for (int m = 1; m <= l; ++m) {
      out.push_back(fm.at(l, m).real());
      out.push_back(fm.at(l, m).imag());
    }
  }
  return out;
}

// Identity, x onto y, z onto y.
inline std::array<Rotation, 3> fixed_views() {
  return {Rotation{}, Rotation::about_z(kPi / 2), Rotation::about_x(-kPi / 2)};
}

struct Descriptor {
  std::vector<std::pair<std::string, std::size_t>> layout;
  std::vector<double> values;
  std::vector<std::string> warnings;

  std::size_t expected_length() const {
    std::size_t n = 0;
    for (const auto& s : layout) n += s.second;
    return n;
  }
};

inline std::size_t descriptor_length(const RunConfig& c) {
  const std::size_t map = std::size_t((c.n_max + 1) * (c.n_max + 1));
  return 3 * 2 * (std::size_t(c.kernel_count) * map + std::size_t(c.axes));
}

inline Descriptor compute_descriptor(const PointCloud& pc, const std::vector<AxialKernel>& kernels, const RunConfig& cfg,
                                     std::shared_ptr<const BallQuadrature> quad) {
  if (!pc.normalized) throw PreconditionError("descriptor: point cloud is not normalized");
  if (kernels.empty()) throw ConfigError("descriptor: empty kernel bank");
  for (const auto& g : kernels)
    if (g.n_max() != cfg.n_max || g.convention() != cfg.convention)
      throw ConfigError("descriptor: kernel n_max or convention does not match the run configuration");
  const AxisSet axes = default_axes(cfg.axes);
  const std::size_t map = std::size_t((cfg.n_max + 1) * (cfg.n_max + 1));
  const char* side[2] = {"upper", "lower"};

  Descriptor d;
  const auto views = fixed_views();
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto halves = split_hemispheres(rotate_points(pc, views[v]));
    for (int h = 0; h < 2; ++h) {
      const PointCloud& part = h == 0 ? halves.first : halves.second;
      const std::string tag = "view" + std::to_string(v) + "/" + side[h];
      d.layout.emplace_back(tag + "/conv", kernels.size() * map);
      d.layout.emplace_back(tag + "/symmetry", axes.size());
      ShapeFunction f;
      if (!part.empty()) f = rasterize(part, quad, cfg.raster_tol);
      if (part.empty() || f.support_size() == 0) {
        d.warnings.push_back(tag + ": empty hemisphere, segment zero-filled");
        d.values.insert(d.values.end(), kernels.size() * map + axes.size(), 0.0);
        continue;
      }
      const auto m = moments_lsq(f, cfg.n_max, cfg.pinv(), cfg.convention, cfg.empty_ratio, cfg.seed);
      for (const auto& g : kernels) {
        const auto packed = pack_real(vol_conv(m, g, cfg.scaling));
        d.values.insert(d.values.end(), packed.begin(), packed.end());
      }
      const auto sym = symmetry_descriptor(m, axes);
      d.values.insert(d.values.end(), sym.begin(), sym.end());
    }
  }
  return d;
}

inline json to_json(const Descriptor& d) {
  json layout = json::array();
  for (const auto& [name, len] : d.layout) layout.push_back({{"segment", name}, {"length", len}});
  return {{"layout", std::move(layout)}, {"values", d.values}, {"warnings", d.warnings}};
}

// Drops a seeded random fraction of the points.
inline PointCloud drop_points(const PointCloud& pc, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("dropout fraction must be in [0, 1)");
  std::vector<std::size_t> idx(pc.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto keep = pc.size() - static_cast<std::size_t>(std::floor(fraction * double(pc.size())));
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  PointCloud out;
  out.normalized = pc.normalized;
  for (auto i : idx) out.points.push_back(pc.points[i]);
  return out;
}

// ||d(dropped) - d|| / ||d||.
inline double relative_change(const std::vector<double>& base, const std::vector<double>& other) {
  if (base.size() != other.size()) throw ConfigError("descriptor lengths differ");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    num += (other[i] - base[i]) * (other[i] - base[i]);
    den += base[i] * base[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace ballharm
