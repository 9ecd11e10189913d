#pragma once

// Volumetric convolution of ball functions with axially symmetric kernels, and the
// spherical convolution it reduces to on S^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ballharm/basis.hpp"
#include "ballharm/error.hpp"
#include "ballharm/moments.hpp"
#include "ballharm/pointcloud.hpp"

namespace ballharm {

// Coefficients of a function on the sphere, indexed l^2 + l + m.
struct FeatureMap {
  int l_max = 0;
  std::vector<cplx> coeffs;

  FeatureMap() = default;
  explicit FeatureMap(int l) : l_max(l), coeffs(std::size_t((l + 1) * (l + 1))) {
    if (l < 0) throw ConfigError("l_max must be non-negative");
  }

  static std::size_t slot(int l, int m) { return std::size_t(l * l + l + m); }
  cplx& at(int l, int m) { return coeffs.at(slot(l, m)); }
  const cplx& at(int l, int m) const { return coeffs.at(slot(l, m)); }
  std::size_t size() const { return coeffs.size(); }
};

// Re sum_{l,m} c(l,m) Y_{l,m}(theta, phi).
inline double eval_feature_map(const FeatureMap& fm, double theta, double phi) {
  double acc = 0.0;
  for (int l = 0; l <= fm.l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      const cplx c = fm.at(l, m);
      if (c != cplx(0.0, 0.0)) acc += (c * spherical_harmonic(l, m, theta, phi)).real();
    }
  return acc;
}

inline double eval_feature_map(const FeatureMap& fm, const Direction& d) { return eval_feature_map(fm, d.theta, d.phi); }

// Kernel symmetric about the y axis: only the m = 0 moments are stored, so every
// other slot is zero by construction.
class AxialKernel {
 public:
  AxialKernel() = default;
  AxialKernel(int n_max, RadialConvention conv) : n_max_(n_max), conv_(conv) {
    if (n_max < 0) throw ConfigError("n_max must be non-negative");
    for (int n = 0; n <= n_max; ++n)
      for (int l = n % 2; l <= n; l += 2) ++pairs_;
    values_.assign(pairs_, 0.0);
  }

  int n_max() const { return n_max_; }
  RadialConvention convention() const { return conv_; }

  // Omega_{n,l,0}; real because the kernel is a real function.
  double operator()(int n, int l) const { return values_.at(pair_slot(n, l)); }
  double& operator()(int n, int l) { return values_.at(pair_slot(n, l)); }
  const std::vector<double>& values() const { return values_; }

  MomentVector moments() const {
    MomentVector m(n_max_, conv_);
    for (int n = 0; n <= n_max_; ++n)
      for (int l = n % 2; l <= n; l += 2) m[BasisIndex{n, l, 0}] = (*this)(n, l);
    return m;
  }

 private:
  std::size_t pair_slot(int n, int l) const {
    if (n < 0 || n > n_max_ || l < 0 || l > n || (n - l) % 2)
      throw DomainError("axial kernel has no (n,l) = (" + std::to_string(n) + "," + std::to_string(l) + ")");
    std::size_t k = 0;
    for (int a = 0; a < n; ++a) k += std::size_t(a / 2 + 1);
    return k + std::size_t(l / 2);
  }

  int n_max_ = 0;
  RadialConvention conv_ = RadialConvention::Orthogonalized;
  std::size_t pairs_ = 0;
  std::vector<double> values_;
};

// Keeps the m = 0 slice. The real part is taken: for moments of a real function
// Omega_{n,l,0} is real.
inline AxialKernel symmetrize_kernel(const MomentVector& m) {
  AxialKernel g(m.n_max, m.convention);
  for (int n = 0; n <= m.n_max; ++n)
    for (int l = n % 2; l <= n; l += 2) g(n, l) = m[BasisIndex{n, l, 0}].real();
  return g;
}

// Exact: the closed form equals the quadrature integral of f against the rotated
// kernel. PaperLiteral: the same sum without the per-degree sqrt(4 pi / (2l + 1)).
enum class ConvScaling { Exact, PaperLiteral };

inline std::string_view to_string(ConvScaling s) { return s == ConvScaling::Exact ? "exact" : "paper-literal"; }

inline ConvScaling parse_scaling(std::string_view s) {
  if (s == "exact") return ConvScaling::Exact;
  if (s == "paper-literal" || s == "paper") return ConvScaling::PaperLiteral;
  throw ConfigError("unknown convolution scaling '" + std::string(s) + "'");
}

// (f * g)(alpha, beta) as a map on the sphere: coefficient (l, m) is
// (4 pi / 3) sum_n Omega_{n,l,m}(f) Omega_{n,l,0}(g), times sqrt(4 pi / (2l + 1)) when exact.
inline FeatureMap vol_conv(const MomentVector& f, const AxialKernel& g, ConvScaling scaling = ConvScaling::Exact) {
  if (f.convention != g.convention()) throw ConfigError("vol_conv: f and g use different radial conventions");
  if (f.n_max != g.n_max()) throw ConfigError("vol_conv: f and g differ in n_max");
  FeatureMap out(f.n_max);
  for (int n = 0; n <= f.n_max; ++n)
    for (int l = n % 2; l <= n; l += 2) {
      const double gk = g(n, l);
      if (gk == 0.0) continue;
      for (int m = -l; m <= l; ++m) out.at(l, m) += f[BasisIndex{n, l, m}] * gk;
    }
  for (int l = 0; l <= out.l_max; ++l) {
    double s = kBallVolume;
    if (scaling == ConvScaling::Exact) s *= std::sqrt(4.0 * kPi / (2 * l + 1));
    for (int m = -l; m <= l; ++m) out.at(l, m) *= s;
  }
  return out;
}

// Largest deviation of g from its azimuthal average on each (r, phi) ring.
inline double axial_asymmetry(const ShapeFunction& g) {
  const auto& q = *g.quad;
  const std::size_t nr = q.radii().size(), nt = q.thetas().size(), np = q.phis().size();
  double worst = 0.0;
  for (std::size_t ir = 0; ir < nr; ++ir)
    for (std::size_t ip = 0; ip < np; ++ip) {
      double mean = 0.0;
      for (std::size_t it = 0; it < nt; ++it) mean += g.values[q.flat_index(ir, it, ip)];
      mean /= double(nt);
      for (std::size_t it = 0; it < nt; ++it)
        worst = std::max(worst, std::abs(g.values[q.flat_index(ir, it, ip)] - mean));
    }
  return worst;
}

// Quadrature value of the integral of f(x) g(tau^{-1} x) over the ball for each
// direction, tau = R_y(alpha) R_z(beta). g is resampled at the nearest node.
inline std::vector<double> brute_force_conv(const ShapeFunction& f, const ShapeFunction& g,
                                            std::span<const Direction> directions) {
  if (!f.quad || !g.quad) throw ConfigError("brute_force_conv: missing quadrature");
  if (f.quad != g.quad && f.quad->resolution() != g.quad->resolution())
    throw ConfigError("brute_force_conv: f and g are sampled on different quadratures");
  double gmax = 0.0;
  for (double v : g.values) gmax = std::max(gmax, std::abs(v));
  if (axial_asymmetry(g) > 1e-6 * std::max(1.0, gmax))
    throw PreconditionError("brute_force_conv: kernel is not symmetric about the y axis");

  const auto& q = *f.quad;
  std::vector<double> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    const Rotation inv = Rotation::aligning_pole(d.theta, d.phi).inverse();
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (f.values[i] == 0.0) continue;
      acc += q.weight(i) * f.values[i] * g.values[q.nearest_node(inv.apply(q.node(i)))];
    }
    out.push_back(acc);
  }
  return out;
}

// out(l, m) = sqrt(4 pi / (2l + 1)) f(l, m) conj(g(l, 0)).
inline FeatureMap sph_conv(const FeatureMap& f, const FeatureMap& g) {
  if (f.l_max != g.l_max) throw ConfigError("sph_conv: l_max mismatch");
  FeatureMap out(f.l_max);
  for (int l = 0; l <= f.l_max; ++l) {
    const cplx gl = std::conj(g.at(l, 0)) * std::sqrt(4.0 * kPi / (2 * l + 1));
    for (int m = -l; m <= l; ++m) out.at(l, m) = f.at(l, m) * gl;
  }
  return out;
}

// sum_{l,m} c(l,m) Y_{l,m}, complex valued.
inline cplx eval_sphere_complex(const FeatureMap& fm, const Direction& d) {
  cplx acc = 0.0;
  for (int l = 0; l <= fm.l_max; ++l)
    for (int m = -l; m <= l; ++m) acc += fm.at(l, m) * spherical_harmonic(l, m, d.theta, d.phi);
  return acc;
}

// Quadrature value of the integral over S^2 of f(w) conj(g(tau^{-1} w)), with g
// evaluated exactly at the rotated point.
inline std::vector<cplx> brute_force_sph_conv(const FeatureMap& f, const FeatureMap& g,
                                              std::span<const Direction> directions, int n_polar = 32,
                                              int n_azimuth = 64) {
  const GaussRule gl = gauss_legendre(n_polar);
  std::vector<Direction> nodes;
  std::vector<double> weights;
  std::vector<cplx> fvals;
  for (int j = 0; j < n_azimuth; ++j)
    for (int k = 0; k < n_polar; ++k) {
      const Direction w{kTwoPi * j / n_azimuth, std::acos(gl.nodes[std::size_t(k)])};
      nodes.push_back(w);
      weights.push_back(gl.weights[std::size_t(k)] * kTwoPi / n_azimuth);
      fvals.push_back(eval_sphere_complex(f, w));
    }
  std::vector<cplx> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    const Rotation inv = Rotation::aligning_pole(d.theta, d.phi).inverse();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * fvals[i] * std::conj(eval_sphere_complex(g, inv.apply(nodes[i])));
    out.push_back(acc);
  }
  return out;
}

// Near-uniform directions over the whole sphere (golden-angle spiral in cos(phi)).
inline std::vector<Direction> fibonacci_directions(std::size_t n) {
  if (n < 1) throw ConfigError("fibonacci_directions: need at least one direction");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Direction> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 1.0 - (2.0 * double(i) + 1.0) / double(n);
    out.push_back({wrap_azimuth(golden * double(i)), std::acos(c)});
  }
  return out;
}

inline double relative_l2(std::span<const double> got, std::span<const double> want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct EquivarianceResult {
  double max_deviation = 0.0;
  double max_magnitude = 0.0;  // largest |(f * g)| on the grid, for scale

  double relative() const { return max_magnitude > 0.0 ? max_deviation / max_magnitude : max_deviation; }
};

// Compares (eta f * g)(d) with (f * g)(eta^{-1} d) over the directions, where
// eta = R_y(alpha) R_z(beta) R_y(gamma). f is band-limited and given by its moments.
inline EquivarianceResult equivariance_check(const MomentVector& f, const AxialKernel& g, double alpha, double beta,
                                             double gamma, std::span<const Direction> directions,
                                             ConvScaling scaling = ConvScaling::Exact) {
  const Rotation eta = Rotation::euler_yzy(alpha, beta, gamma);
  const FeatureMap base = vol_conv(f, g, scaling);
  const FeatureMap turned = vol_conv(rotate_moments(f, eta), g, scaling);
  const Rotation inv = eta.inverse();
  EquivarianceResult r;
  for (const auto& d : directions) {
    const double a = eval_feature_map(turned, d);
    const double b = eval_feature_map(base, inv.apply(d));
    r.max_deviation = std::max(r.max_deviation, std::abs(a - b));
    r.max_magnitude = std::max(r.max_magnitude, std::abs(b));
  }
  return r;
}

// Point-cloud version: rotate the points, rasterize both clouds, fit moments by least
// squares, and compare as above. Includes resampling error of the rasterization.
inline EquivarianceResult equivariance_check(const PointCloud& pc, const AxialKernel& g, double alpha, double beta,
                                             double gamma, std::shared_ptr<const BallQuadrature> quad,
                                             std::span<const Direction> directions, const PinvOptions& opt,
                                             double empty_ratio = 1.0, std::uint64_t seed = 0,
                                             ConvScaling scaling = ConvScaling::Exact) {
  const Rotation eta = Rotation::euler_yzy(alpha, beta, gamma);
  const int n = g.n_max();
  const auto conv = g.convention();
  const auto f0 = rasterize(pc, quad);
  const auto f1 = rasterize(rotate_points(pc, eta), quad);
  const FeatureMap base = vol_conv(moments_lsq(f0, n, opt, conv, empty_ratio, seed), g, scaling);
  const FeatureMap turned = vol_conv(moments_lsq(f1, n, opt, conv, empty_ratio, seed), g, scaling);
  const Rotation inv = eta.inverse();
  EquivarianceResult r;
  for (const auto& d : directions) {
    const double a = eval_feature_map(turned, d);
    const double b = eval_feature_map(base, inv.apply(d));
    r.max_deviation = std::max(r.max_deviation, std::abs(a - b));
    r.max_magnitude = std::max(r.max_magnitude, std::abs(b));
  }
  return r;
}

// Seeded random axial kernels with unit coefficient norm.
inline std::vector<AxialKernel> random_kernel_bank(std::size_t count, int n_max, RadialConvention conv,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<AxialKernel> bank;
  for (std::size_t k = 0; k < count; ++k) {
    AxialKernel g(n_max, conv);
    double s = 0.0;
    for (int n = 0; n <= n_max; ++n)
      for (int l = n % 2; l <= n; l += 2) {
        g(n, l) = gauss(rng);
        s += g(n, l) * g(n, l);
      }
    s = std::sqrt(s);
    for (int n = 0; n <= n_max; ++n)
      for (int l = n % 2; l <= n; l += 2) g(n, l) /= s;
    bank.push_back(std::move(g));
  }
  return bank;
}

}  // namespace ballharm
