#pragma once

// Axial symmetry power of a ball function about a given axis, and descriptors
// built from it.

#include <cmath>
#include <cstddef>
#include <vector>

#include "ballharm/basis.hpp"
#include "ballharm/coords.hpp"
#include "ballharm/error.hpp"
#include "ballharm/moments.hpp"

namespace ballharm {

struct AxisSet {
  std::vector<Direction> axes;  // theta = alpha (azimuth), phi = beta (polar)

  std::size_t size() const { return axes.size(); }
};

// Checks angle ranges and rejects repeated axes.
inline void validate(const AxisSet& s) {
  for (std::size_t i = 0; i < s.axes.size(); ++i) {
    const auto& a = s.axes[i];
    if (!(a.theta >= 0.0 && a.theta < kTwoPi && a.phi >= 0.0 && a.phi <= kPi))
      throw DomainError("axis " + std::to_string(i) + " has angles out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (angular_distance(to_cartesian(a), to_cartesian(s.axes[j])) <= 1e-9)
        throw DomainError("axes " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
  }
}

// sum_{n,l} |sum_m Omega_{n,l,m} Y_{l,m}(alpha, beta)|^2, constants dropped.
// For f symmetric about an axis u each (n, l) term peaks at u and -u.
inline double axial_symmetry(const MomentVector& m, double alpha, double beta) {
  std::vector<cplx> y;
  y.reserve(std::size_t((m.n_max + 1) * (m.n_max + 1)));
  for (int l = 0; l <= m.n_max; ++l)
    for (int k = -l; k <= l; ++k) y.push_back(spherical_harmonic(l, k, alpha, beta));
  double total = 0.0;
  std::size_t pos = 0;
  for (int n = 0; n <= m.n_max; ++n)
    for (int l = n % 2; l <= n; l += 2) {
      cplx acc = 0.0;
      for (int k = -l; k <= l; ++k) acc += m.coeffs[pos + std::size_t(k + l)] * y[std::size_t(l * l + l + k)];
      total += std::norm(acc);
      pos += std::size_t(2 * l + 1);
    }
  return total;
}

// k axes on the upper hemisphere: cos(beta_i) = 1 - i / k, alpha_i = i times the
// golden angle. Axis 0 is the north pole.
inline AxisSet default_axes(int k) {
  if (k < 1) throw ConfigError("default_axes: need at least one axis");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  AxisSet s;
  for (int i = 0; i < k; ++i)
    s.axes.push_back({wrap_azimuth(golden * i), std::acos(1.0 - double(i) / double(k))});
  return s;
}

inline std::vector<double> symmetry_descriptor(const MomentVector& m, const AxisSet& axes) {
  std::vector<double> out;
  out.reserve(axes.size());
  for (const auto& a : axes.axes) out.push_back(axial_symmetry(m, a.theta, a.phi));
  return out;
}

// alpha_i = 2 pi i / n_alpha, beta_j = pi j / (n_beta - 1); both poles included.
struct AxisGrid {
  int n_alpha = 20;
  int n_beta = 20;

  Direction at(int i, int j) const { return {kTwoPi * i / n_alpha, kPi * j / (n_beta - 1)}; }
  double alpha_step() const { return kTwoPi / n_alpha; }
  double beta_step() const { return kPi / (n_beta - 1); }
};

struct GridMaximum {
  int i = 0, j = 0;
  Direction axis;
  double value = 0.0;
};

inline GridMaximum symmetry_argmax(const MomentVector& m, const AxisGrid& grid = {}) {
  if (grid.n_alpha < 1 || grid.n_beta < 2) throw ConfigError("symmetry_argmax: grid too small");
  GridMaximum best;
  best.value = -1.0;
  for (int j = 0; j < grid.n_beta; ++j)
    for (int i = 0; i < grid.n_alpha; ++i) {
      const Direction d = grid.at(i, j);
      const double v = axial_symmetry(m, d.theta, d.phi);
      if (v > best.value) best = {i, j, d, v};
    }
  return best;
}

}  // namespace ballharm
