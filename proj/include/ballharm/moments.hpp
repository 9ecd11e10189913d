#pragma once

// Zernike moments: direct projection, least squares through an iterative
// pseudo-inverse, and reconstruction.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ballharm/basis.hpp"
#include "ballharm/error.hpp"
#include "ballharm/pointcloud.hpp"
#include "ballharm/quadrature.hpp"

namespace ballharm {

struct MomentVector {
  int n_max = 0;
  RadialConvention convention = RadialConvention::Orthogonalized;
  std::vector<cplx> coeffs;  // canonical order

  MomentVector() = default;
  MomentVector(int n, RadialConvention conv) : n_max(n), convention(conv), coeffs(index_count(n)) {
    if (n < 0) throw ConfigError("n_max must be non-negative");
  }

  std::size_t size() const { return coeffs.size(); }
  cplx& operator[](const BasisIndex& i) { return coeffs[canonical_position(i)]; }
  const cplx& operator[](const BasisIndex& i) const { return coeffs[canonical_position(i)]; }

  // Largest |Omega_{n,l,-m} - (-1)^m conj(Omega_{n,l,m})|.
  double conjugate_asymmetry() const {
    double worst = 0.0;
    for (const auto& i : enumerate_indices(n_max)) {
      if (i.m <= 0) continue;
      const cplx pos = (*this)[i], neg = (*this)[BasisIndex{i.n, i.l, -i.m}];
      worst = std::max(worst, std::abs(neg - ((i.m % 2) ? -1.0 : 1.0) * std::conj(pos)));
    }
    return worst;
  }
};

inline double max_abs_difference(const MomentVector& a, const MomentVector& b) {
  if (a.size() != b.size()) throw ConfigError("moment vectors differ in n_max");
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.coeffs[k] - b.coeffs[k]));
  return d;
}

// Omega = sum_i w_i f_i conj(Z(node_i)); under the orthogonalized convention the
// sum is divided by the squared basis norm 4 pi / 3 so moments are coefficients.
inline MomentVector moments_direct(const ShapeFunction& f, int n_max, RadialConvention conv) {
  if (!f.quad || f.quad->empty()) throw ConfigError("moments_direct: function has no quadrature");
  const BasisEvaluator basis(n_max, conv);
  MomentVector out(n_max, conv);
  std::vector<cplx> z(basis.size());
  const auto& q = *f.quad;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double fw = f.values[i] * q.weight(i);
    if (fw == 0.0) continue;
    basis.evaluate(q.node(i), z);
    for (std::size_t k = 0; k < z.size(); ++k) out.coeffs[k] += fw * std::conj(z[k]);
  }
  if (conv == RadialConvention::Orthogonalized)
    for (auto& c : out.coeffs) c /= kBallVolume;
  return out;
}

// One real unknown per design column: A multiplies Re Z, B multiplies Im Z.
struct ColumnTag {
  BasisIndex index;  // m >= 0
  bool imaginary = false;
};

struct LinearSystem {
  int n_max = 0;
  RadialConvention convention = RadialConvention::Orthogonalized;
  Eigen::MatrixXd design;
  Eigen::VectorXd targets;
  std::vector<ColumnTag> layout;
};

// Columns per (n, l) in canonical order: A_{n,l,0}, then A_{n,l,m}, B_{n,l,m} for m = 1..l.
inline std::vector<ColumnTag> column_layout(int n_max) {
  std::vector<ColumnTag> cols;
  for (int n = 0; n <= n_max; ++n)
    for (int l = n % 2; l <= n; l += 2)
      for (int m = 0; m <= l; ++m) {
        cols.push_back({{n, l, m}, false});
        if (m > 0) cols.push_back({{n, l, m}, true});
      }
  return cols;
}

inline LinearSystem build_system(std::span<const BallCoord> coords, std::span<const double> values, int n_max,
                                 RadialConvention conv) {
  if (coords.size() != values.size()) throw ConfigError("build_system: coords and values differ in length");
  const BasisEvaluator basis(n_max, conv);
  LinearSystem sys;
  sys.n_max = n_max;
  sys.convention = conv;
  sys.layout = column_layout(n_max);
  const std::size_t cols = sys.layout.size();
  if (coords.size() < cols) throw UnderdeterminedError(coords.size(), cols);

  sys.design.resize(Eigen::Index(coords.size()), Eigen::Index(cols));
  sys.targets.resize(Eigen::Index(coords.size()));
  std::vector<std::size_t> source(cols);
  for (std::size_t c = 0; c < cols; ++c) source[c] = canonical_position(sys.layout[c].index);

  std::vector<cplx> z(basis.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    basis.evaluate(coords[i], z);
    for (std::size_t c = 0; c < cols; ++c) {
      const cplx v = z[source[c]];
      sys.design(Eigen::Index(i), Eigen::Index(c)) = sys.layout[c].imaginary ? v.imag() : v.real();
    }
    sys.targets(Eigen::Index(i)) = values[i];
  }
  return sys;
}

// Real solution vector to complex moments. For m > 0 the pair (A, B) contributes
// A Re Z + B Im Z = 2 Re(Omega Z) with Omega = (A - iB) / 2; m = 0 maps directly.
inline MomentVector recombine(const Eigen::VectorXd& c, const std::vector<ColumnTag>& layout, int n_max,
                              RadialConvention conv) {
  if (std::size_t(c.size()) != layout.size()) throw ConfigError("recombine: solution length mismatch");
  MomentVector out(n_max, conv);
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& t = layout[k];
    const double v = c(Eigen::Index(k));
    if (t.index.m == 0)
      out[t.index] = v;
    else if (t.imaginary)
      out[t.index] += cplx(0.0, -0.5 * v);
    else
      out[t.index] += 0.5 * v;
  }
  for (const auto& i : enumerate_indices(n_max))
    if (i.m > 0) out[BasisIndex{i.n, i.l, -i.m}] = ((i.m % 2) ? -1.0 : 1.0) * std::conj(out[i]);
  return out;
}

struct PinvOptions {
  int iterations = 3;
  std::optional<double> alpha = 0.001;  // nullopt: 1 / (power-iteration estimate of rho(A A^T))
  double tolerance = 0.0;               // > 0: stop once residual <= tolerance * ||V||_F
  int power_steps = 50;

  static PinvOptions paper() { return {}; }
  static PinvOptions converged(int max_iterations = 40) { return {max_iterations, std::nullopt, 1e-14, 50}; }
};

struct PinvReport {
  int iterations = 0;
  double alpha = 0.0;
  double rho = 0.0;               // estimate of the largest eigenvalue of A^T A
  std::vector<double> residuals;  // ||V A V - V||_F after each update

  // The iteration converges only for 0 < alpha < 2 / rho.
  bool alpha_out_of_range() const { return alpha * rho >= 2.0; }
};

// Largest eigenvalue of A^T A (equal to that of A A^T) by power iteration.
inline double spectral_radius_estimate(const Eigen::MatrixXd& a, int steps) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols());
  // A deterministic, non-symmetric start so no eigenvector is missed by symmetry.
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 0.01 * double(i % 7);
  double rho = 0.0;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd w = a.transpose() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    rho = v.dot(w) / v.squaredNorm();
    v = w / nw;
  }
  return rho;
}

// Hyperpower iteration V <- V (3I - AV (3I - AV)) from V_0 = alpha A^T. Written as
// V <- (3I - 3P + P^2) V with P = VA, so the rows x rows product AV is never formed.
inline Eigen::MatrixXd pinv_iterate(const Eigen::MatrixXd& a, const PinvOptions& opt, PinvReport* report = nullptr) {
  if (opt.iterations < 1) throw ConfigError("pinv_iterate: iterations must be at least 1");
  if (!a.allFinite()) throw NumericError("pinv_iterate: matrix has non-finite entries");
  if (opt.alpha && !(*opt.alpha > 0.0)) throw ConfigError("pinv_iterate: alpha must be positive");
  const double rho = spectral_radius_estimate(a, std::max(1, opt.power_steps));
  if (!(rho > 0.0)) throw DegenerateInputError("pinv_iterate: zero matrix");
  const double alpha = opt.alpha ? *opt.alpha : 1.0 / rho;

  PinvReport rep;
  rep.alpha = alpha;
  rep.rho = rho;
  Eigen::MatrixXd v = alpha * a.transpose();
  const Eigen::Index k = a.cols();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
  for (int it = 0; it < opt.iterations; ++it) {
    const Eigen::MatrixXd p = v * a;
    v = (3.0 * eye - 3.0 * p + p * p) * v;
    const Eigen::MatrixXd pv = v * a;
    const double res = ((pv - eye) * v).norm();
    rep.residuals.push_back(res);
    ++rep.iterations;
    if (!v.allFinite() || !std::isfinite(res)) throw NumericError("pinv_iterate: iteration diverged to non-finite values");
    if (opt.tolerance > 0.0 && res <= opt.tolerance * v.norm()) break;
  }
  if (report) *report = std::move(rep);
  return v;
}

inline MomentVector moments_lsq(std::span<const BallCoord> coords, std::span<const double> values, int n_max,
                                const PinvOptions& opt, RadialConvention conv, PinvReport* report = nullptr) {
  const LinearSystem sys = build_system(coords, values, n_max, conv);
  const Eigen::MatrixXd v = pinv_iterate(sys.design, opt, report);
  return recombine(v * sys.targets, sys.layout, n_max, conv);
}

// f(p) = Re sum_k Omega_k Z_k(p).
inline std::vector<double> reconstruct(const MomentVector& m, std::span<const BallCoord> coords) {
  const BasisEvaluator basis(m.n_max, m.convention);
  std::vector<double> out(coords.size());
  std::vector<cplx> z(basis.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    basis.evaluate(coords[i], z);
    double acc = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) acc += (m.coeffs[k] * z[k]).real();
    out[i] = acc;
  }
  return out;
}

inline ShapeFunction synthesize(const MomentVector& m, std::shared_ptr<const BallQuadrature> quad) {
  if (!quad) throw ConfigError("synthesize: null quadrature");
  ShapeFunction f(quad);
  f.values = reconstruct(m, quad->nodes());
  return f;
}

// Moments of x -> f(R^{-1} x) for a real band-limited f. A rotation only mixes m
// within each (n, l) block, so the coefficients are rotated through an orthogonal
// radial stand-in: synthesize on a rule exact for degree n_max products, project back.
inline MomentVector rotate_moments(const MomentVector& m, const Rotation& rot) {
  double scale = 0.0;
  for (const auto& c : m.coeffs) scale = std::max(scale, std::abs(c));
  if (m.conjugate_asymmetry() > 1e-9 * std::max(1.0, scale))
    throw PreconditionError("rotate_moments: moments are not those of a real function");
  const int n = m.n_max;
  const auto quad = share(make_quadrature(n + 3, 2 * n + 3, n + 3));
  MomentVector ortho = m;
  ortho.convention = RadialConvention::Orthogonalized;
  const Rotation inv = rot.inverse();
  std::vector<BallCoord> pulled;
  pulled.reserve(quad->size());
  for (const auto& p : quad->nodes()) pulled.push_back(inv.apply(p));
  ShapeFunction f(quad);
  f.values = reconstruct(ortho, pulled);
  MomentVector out = moments_direct(f, n, RadialConvention::Orthogonalized);
  out.convention = m.convention;
  return out;
}

struct ReconstructionError {
  double mean_abs = 0.0;  // (1/T) sum |fbar - f|
  double relative = 0.0;  // mean_abs / mean |f|
  std::size_t points = 0;
};

// Mean absolute error over the given node subset of f.
inline ReconstructionError reconstruction_error(const ShapeFunction& f, const MomentVector& m,
                                                std::span<const std::size_t> nodes) {
  if (!f.quad) throw ConfigError("reconstruction_error: function has no quadrature");
  if (nodes.empty()) throw DegenerateInputError("reconstruction_error: empty node set");
  std::vector<BallCoord> pts;
  pts.reserve(nodes.size());
  for (auto i : nodes) pts.push_back(f.quad->node(i));
  const auto rec = reconstruct(m, pts);
  double err = 0.0, mag = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    err += std::abs(rec[k] - f.values[nodes[k]]);
    mag += std::abs(f.values[nodes[k]]);
  }
  ReconstructionError out;
  out.points = nodes.size();
  out.mean_abs = err / double(nodes.size());
  out.relative = mag > 0.0 ? err / mag : std::numeric_limits<double>::infinity();
  return out;
}

inline std::vector<std::size_t> support_nodes(const ShapeFunction& f) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.values[i] != 0.0) idx.push_back(i);
  return idx;
}

// Error over the points of the object, i.e. the nonzero nodes of f.
inline ReconstructionError reconstruction_error(const ShapeFunction& f, const MomentVector& m) {
  const auto idx = support_nodes(f);
  return reconstruction_error(f, m, idx);
}

// Nodes feeding the least-squares system: every occupied node plus a seeded uniform
// subsample of empty nodes, empty_ratio empty nodes per occupied one. Topped up with
// further empty nodes until there are at least min_count rows.
inline std::vector<std::size_t> lsq_sample_nodes(const ShapeFunction& f, double empty_ratio, std::uint64_t seed,
                                                 std::size_t min_count = 0) {
  if (!(empty_ratio >= 0.0)) throw ConfigError("lsq_sample_nodes: empty_ratio must be non-negative");
  std::vector<std::size_t> occupied, empty;
  for (std::size_t i = 0; i < f.values.size(); ++i) (f.values[i] != 0.0 ? occupied : empty).push_back(i);
  auto want = static_cast<std::size_t>(std::llround(empty_ratio * double(occupied.size())));
  if (occupied.size() + want < min_count) want = min_count - occupied.size();
  want = std::min(want, empty.size());
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  std::sample(empty.begin(), empty.end(), std::back_inserter(chosen), want, rng);
  chosen.insert(chosen.end(), occupied.begin(), occupied.end());
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Least-squares moments of a sampled function using the nodes picked by lsq_sample_nodes.
inline MomentVector moments_lsq(const ShapeFunction& f, int n_max, const PinvOptions& opt, RadialConvention conv,
                                double empty_ratio = 1.0, std::uint64_t seed = 0, PinvReport* report = nullptr) {
  if (!f.quad) throw ConfigError("moments_lsq: function has no quadrature");
  const auto idx = lsq_sample_nodes(f, empty_ratio, seed, column_layout(n_max).size());
  std::vector<BallCoord> pts;
  std::vector<double> vals;
  pts.reserve(idx.size());
  vals.reserve(idx.size());
  for (auto i : idx) {
    pts.push_back(f.quad->node(i));
    vals.push_back(f.values[i]);
  }
  return moments_lsq(pts, vals, n_max, opt, conv, report);
}

// Moments of a random real band-limited function: standard normal real and imaginary
// parts for m > 0, real for m = 0, negative m filled by conjugate symmetry.
inline MomentVector random_real_moments(int n_max, RadialConvention conv, std::uint64_t seed) {
  MomentVector m(n_max, conv);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (const auto& i : enumerate_indices(n_max)) {
    if (i.m < 0) continue;
    m[i] = (i.m == 0) ? cplx(g(rng), 0.0) : cplx(g(rng), g(rng));
  }
  for (const auto& i : enumerate_indices(n_max))
    if (i.m > 0) m[BasisIndex{i.n, i.l, -i.m}] = ((i.m % 2) ? -1.0 : 1.0) * std::conj(m[i]);
  return m;
}

inline MomentVector operator+(const MomentVector& a, const MomentVector& b) {
  if (a.size() != b.size()) throw ConfigError("moment vectors differ in n_max");
  MomentVector out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out.coeffs[k] += b.coeffs[k];
  return out;
}

inline MomentVector operator*(double s, const MomentVector& a) {
  MomentVector out = a;
  for (auto& c : out.coeffs) c *= s;
  return out;
}

}  // namespace ballharm
