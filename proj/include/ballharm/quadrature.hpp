#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ballharm/coords.hpp"
#include "ballharm/error.hpp"

namespace ballharm {

struct GaussRule {
  std::vector<double> nodes;  // ascending, in (-1, 1)
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1], Newton iteration on the three-term recurrence.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

struct QuadResolution {
  int n_r = 0;
  int n_theta = 0;
  int n_phi = 0;

  friend constexpr bool operator==(const QuadResolution&, const QuadResolution&) = default;
};

inline std::string to_string(const QuadResolution& q) {
  return std::to_string(q.n_r) + "," + std::to_string(q.n_theta) + "," + std::to_string(q.n_phi);
}

// Tensor-product rule on the unit ball: Gauss-Legendre in r on [0, 1], Gauss-Legendre
// in cos(phi) on [-1, 1], uniform trapezoid in theta. Weights carry r^2 so that
// sum_i w_i g(node_i) approximates the integral of g r^2 sin(phi) dr dphi dtheta.
//
// Nodes are stored with r outermost and phi innermost; radii and polar angles ascend.
class BallQuadrature {
 public:
  BallQuadrature() = default;

  BallQuadrature(int n_r, int n_theta, int n_phi) : res_{n_r, n_theta, n_phi} {
    if (n_r < 2 || n_theta < 2 || n_phi < 2)
      throw ConfigError("quadrature resolution must be at least 2 per dimension, got " +
                        to_string(res_));
    const GaussRule gr = gauss_legendre(n_r);
    const GaussRule gc = gauss_legendre(n_phi);

    radii_.resize(static_cast<std::size_t>(n_r));
    radial_w_.resize(radii_.size());
    for (std::size_t i = 0; i < radii_.size(); ++i) {
      radii_[i] = 0.5 * (gr.nodes[i] + 1.0);
      radial_w_[i] = 0.5 * gr.weights[i] * radii_[i] * radii_[i];
    }
    thetas_.resize(static_cast<std::size_t>(n_theta));
    for (std::size_t j = 0; j < thetas_.size(); ++j) thetas_[j] = kTwoPi * double(j) / n_theta;
    theta_w_ = kTwoPi / n_theta;

    // cos(phi) nodes ascend, so reverse to get ascending phi.
    phis_.resize(static_cast<std::size_t>(n_phi));
    polar_w_.resize(phis_.size());
    for (std::size_t k = 0; k < phis_.size(); ++k) {
      const std::size_t src = phis_.size() - 1 - k;
      phis_[k] = std::acos(gc.nodes[src]);
      polar_w_[k] = gc.weights[src];
    }

    nodes_.reserve(static_cast<std::size_t>(n_r) * n_theta * n_phi);
    weights_.reserve(nodes_.capacity());
    for (std::size_t i = 0; i < radii_.size(); ++i)
      for (std::size_t j = 0; j < thetas_.size(); ++j)
        for (std::size_t k = 0; k < phis_.size(); ++k) {
          nodes_.push_back(BallCoord{radii_[i], thetas_[j], phis_[k]});
          weights_.push_back(radial_w_[i] * theta_w_ * polar_w_[k]);
        }
  }

  const QuadResolution& resolution() const { return res_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  const std::vector<BallCoord>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const BallCoord& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& thetas() const { return thetas_; }
  const std::vector<double>& phis() const { return phis_; }

  std::size_t flat_index(std::size_t ir, std::size_t it, std::size_t ip) const {
    return (ir * thetas_.size() + it) * phis_.size() + ip;
  }

  struct GridIndex {
    std::size_t ir, it, ip;
  };

  GridIndex grid_index(std::size_t flat) const {
    const std::size_t ip = flat % phis_.size();
    const std::size_t rest = flat / phis_.size();
    return {rest / thetas_.size(), rest % thetas_.size(), ip};
  }

  std::size_t nearest_radius(double r) const { return nearest_sorted(radii_, r); }
  std::size_t nearest_polar(double phi) const { return nearest_sorted(phis_, phi); }
  std::size_t nearest_azimuth(double theta) const {
    const double step = kTwoPi / double(thetas_.size());
    auto j = static_cast<long long>(std::llround(wrap_azimuth(theta) / step));
    return static_cast<std::size_t>(j % static_cast<long long>(thetas_.size()));
  }

  // Nearest node per coordinate, with wraparound in theta.
  std::size_t nearest_node(const BallCoord& p) const {
    return flat_index(nearest_radius(p.r), nearest_azimuth(p.theta), nearest_polar(p.phi));
  }

  // Larger of the gaps to the neighbouring entries of a sorted axis.
  static double local_spacing(const std::vector<double>& axis, std::size_t i) {
    double h = 0.0;
    if (i > 0) h = std::max(h, axis[i] - axis[i - 1]);
    if (i + 1 < axis.size()) h = std::max(h, axis[i + 1] - axis[i]);
    return h;
  }

 private:
  static std::size_t nearest_sorted(const std::vector<double>& axis, double v) {
    auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.begin()) return 0;
    if (it == axis.end()) return axis.size() - 1;
    const auto hi = static_cast<std::size_t>(it - axis.begin());
    return (v - axis[hi - 1] <= axis[hi] - v) ? hi - 1 : hi;
  }

  QuadResolution res_{};
  std::vector<double> radii_, radial_w_, thetas_, phis_, polar_w_;
  double theta_w_ = 0.0;
  std::vector<BallCoord> nodes_;
  std::vector<double> weights_;
};

inline BallQuadrature make_quadrature(int n_r, int n_theta, int n_phi) {
  return BallQuadrature(n_r, n_theta, n_phi);
}

inline BallQuadrature make_quadrature(const QuadResolution& q) {
  return BallQuadrature(q.n_r, q.n_theta, q.n_phi);
}

}  // namespace ballharm
