#pragma once

// Associated Legendre functions, spherical harmonics, Zernike radial polynomials
// and the 3D Zernike basis Z_{n,l,m}(r, theta, phi) = R_{n,l}(r) Y_{l,m}(theta, phi).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ballharm/coords.hpp"
#include "ballharm/error.hpp"
#include "ballharm/quadrature.hpp"

namespace ballharm {

using cplx = std::complex<double>;

// Largest radial order n (and therefore degree l) the basis supports.
inline constexpr int kMaxDegree = 16;

struct BasisIndex {
  int n = 0;
  int l = 0;
  int m = 0;

  constexpr bool valid() const {
    return n >= 0 && l >= 0 && l <= n && (n - l) % 2 == 0 && m >= -l && m <= l;
  }

  friend constexpr bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

inline std::string to_string(const BasisIndex& i) {
  return "(" + std::to_string(i.n) + "," + std::to_string(i.l) + "," + std::to_string(i.m) + ")";
}

// Number of valid (n, l, m) with n <= n_max.
constexpr std::size_t index_count(int n_max) {
  std::size_t count = 0;
  for (int n = 0; n <= n_max; ++n)
    for (int l = n % 2; l <= n; l += 2) count += static_cast<std::size_t>(2 * l + 1);
  return count;
}

// Canonical order: ascending n, then l, then m from -l to l.
inline std::vector<BasisIndex> enumerate_indices(int n_max) {
  std::vector<BasisIndex> out;
  out.reserve(index_count(n_max));
  for (int n = 0; n <= n_max; ++n)
    for (int l = n % 2; l <= n; l += 2)
      for (int m = -l; m <= l; ++m) out.push_back({n, l, m});
  return out;
}

inline std::size_t canonical_position(const BasisIndex& idx) {
  if (!idx.valid()) throw DomainError("invalid basis index " + to_string(idx));
  std::size_t pos = index_count(idx.n - 1);
  for (int l = idx.n % 2; l < idx.l; l += 2) pos += static_cast<std::size_t>(2 * l + 1);
  return pos + static_cast<std::size_t>(idx.m + idx.l);
}

enum class RadialConvention { PaperLiteral, Orthogonalized };

inline std::string_view to_string(RadialConvention c) {
  return c == RadialConvention::PaperLiteral ? "paper-literal" : "orthogonalized";
}

inline RadialConvention parse_convention(std::string_view s) {
  if (s == "paper-literal" || s == "paper") return RadialConvention::PaperLiteral;
  if (s == "orthogonalized" || s == "ortho") return RadialConvention::Orthogonalized;
  throw ConfigError("unknown radial convention '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Associated Legendre functions

// Index of P_l^m inside a table filled by legendre_table.
constexpr std::size_t legendre_slot(int l, int m) {
  return static_cast<std::size_t>(l * (l + 1) / 2 + m);
}

constexpr std::size_t legendre_table_size(int l_max) {
  return static_cast<std::size_t>((l_max + 1) * (l_max + 2) / 2);
}

// Fills P_l^m(x) for 0 <= m <= l <= l_max, Condon-Shortley phase included.
// Upward recurrence in l from the closed-form diagonal.
inline void legendre_table(int l_max, double x, std::span<double> out) {
  const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double diag = 1.0;  // P_m^m
  for (int m = 0; m <= l_max; ++m) {
    if (m > 0) diag *= -(2.0 * m - 1.0) * s;
    out[legendre_slot(m, m)] = diag;
    if (m == l_max) break;
    double prev = diag;
    double cur = x * (2.0 * m + 1.0) * diag;
    out[legendre_slot(m + 1, m)] = cur;
    for (int l = m + 2; l <= l_max; ++l) {
      const double next = ((2.0 * l - 1.0) * x * cur - (l + m - 1.0) * prev) / (l - m);
      out[legendre_slot(l, m)] = next;
      prev = cur;
      cur = next;
    }
  }
}

inline double assoc_legendre(int l, int m, double x) {
  if (l < 0 || m < 0 || m > l)
    throw DomainError("assoc_legendre: need 0 <= m <= l, got l=" + std::to_string(l) +
                      " m=" + std::to_string(m));
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("assoc_legendre: x outside [-1, 1]");
  std::vector<double> table(legendre_table_size(l));
  legendre_table(l, x, table);
  return table[legendre_slot(l, m)];
}

// sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!) for m >= 0.
inline double harmonic_norm(int l, int m) {
  double ratio = 1.0;
  for (int k = l - m + 1; k <= l + m; ++k) ratio /= k;
  return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
}

// ---------------------------------------------------------------------------
// Spherical harmonics

// Y_{l,m} = (-1)^m N_{l,m} P_l^m(cos phi) e^{i m theta} for m >= 0;
// Y_{l,-m} = (-1)^m conj(Y_{l,m}).
inline cplx spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || m < -l || m > l)
    throw DomainError("spherical_harmonic: need |m| <= l, got l=" + std::to_string(l) +
                      " m=" + std::to_string(m));
  const int am = m < 0 ? -m : m;
  const double sign = (am % 2) ? -1.0 : 1.0;
  const double mag = sign * harmonic_norm(l, am) * assoc_legendre(l, am, std::cos(phi));
  const cplx y = mag * std::polar(1.0, am * theta);
  if (m >= 0) return y;
  return sign * std::conj(y);
}

// ---------------------------------------------------------------------------
// Zernike radial polynomials

namespace detail {

inline long double factorial(int k) {
  long double f = 1.0L;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Coefficients of a radial polynomial in powers r^{l + 2j}, j = 0..(n-l)/2.
using RadialPoly = std::vector<long double>;

inline RadialPoly literal_radial(int n, int l) {
  const int kmax = (n - l) / 2;
  RadialPoly c(static_cast<std::size_t>(kmax + 1), 0.0L);
  for (int k = 0; k <= kmax; ++k) {
    const long double term = factorial(n - k) /
                             (factorial(k) * factorial((n + l) / 2 - k) * factorial((n - l) / 2 - k));
    c[static_cast<std::size_t>(kmax - k)] = (k % 2 ? -term : term);
  }
  return c;
}

// Integral over [0, 1] of p(r) q(r) r^2 dr for polynomials in r^{l+2j}.
inline long double radial_inner(const RadialPoly& p, const RadialPoly& q, int l) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      s += p[i] * q[j] / static_cast<long double>(2 * l + 2 * int(i + j) + 3);
  return s;
}

struct RadialTables {
  // [l][k] with n = l + 2k
  std::array<std::vector<RadialPoly>, kMaxDegree + 1> literal;
  std::array<std::vector<RadialPoly>, kMaxDegree + 1> orthogonal;
};

// Gram-Schmidt of the literal family per fixed l under weight r^2, with one pass of
// reorthogonalisation, then scaled so the integral of R^2 r^2 equals 4 pi / 3.
inline RadialTables build_radial_tables() {
  RadialTables t;
  const long double target = 4.0L * 3.14159265358979323846264338327950288L / 3.0L;
  for (int l = 0; l <= kMaxDegree; ++l) {
    for (int n = l; n <= kMaxDegree; n += 2) {
      RadialPoly v = literal_radial(n, l);
      t.literal[static_cast<std::size_t>(l)].push_back(v);
      auto& basis = t.orthogonal[static_cast<std::size_t>(l)];
      for (int pass = 0; pass < 2; ++pass) {
        for (const RadialPoly& e : basis) {
          const long double proj = radial_inner(v, e, l);
          for (std::size_t j = 0; j < e.size(); ++j) v[j] -= proj * e[j];
        }
      }
      const long double nrm = std::sqrt(radial_inner(v, v, l));
      for (auto& c : v) c /= nrm;
      basis.push_back(v);
    }
    for (auto& e : t.orthogonal[static_cast<std::size_t>(l)])
      for (auto& c : e) c *= std::sqrt(target);
  }
  return t;
}

inline const RadialTables& radial_tables() {
  static const RadialTables tables = build_radial_tables();
  return tables;
}

inline const RadialPoly& radial_poly(int n, int l, RadialConvention conv) {
  const auto& t = radial_tables();
  const auto& family =
      conv == RadialConvention::PaperLiteral ? t.literal[std::size_t(l)] : t.orthogonal[std::size_t(l)];
  return family[static_cast<std::size_t>((n - l) / 2)];
}

inline long double eval_radial(const RadialPoly& c, int l, long double r) {
  const long double r2 = r * r;
  long double acc = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r2 + *it;
  long double rl = 1.0L;
  for (int i = 0; i < l; ++i) rl *= r;
  return acc * rl;
}

inline void check_degree(int n) {
  if (n > kMaxDegree)
    throw ConfigError("radial order " + std::to_string(n) + " exceeds the basis cap " +
                      std::to_string(kMaxDegree));
}

}  // namespace detail

inline double zernike_radial(int n, int l, double r, RadialConvention conv) {
  if (n < 0 || l < 0 || l > n || (n - l) % 2 != 0)
    throw DomainError("zernike_radial: need 0 <= l <= n with n - l even, got n=" +
                      std::to_string(n) + " l=" + std::to_string(l));
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("zernike_radial: r outside [0, 1]");
  detail::check_degree(n);
  return static_cast<double>(detail::eval_radial(detail::radial_poly(n, l, conv), l, r));
}

inline cplx zernike_basis(const BasisIndex& idx, const BallCoord& p, RadialConvention conv) {
  if (!idx.valid()) throw DomainError("zernike_basis: invalid index " + to_string(idx));
  const BallCoord q = BallCoord::make(p.r, p.theta, p.phi);
  return zernike_radial(idx.n, idx.l, q.r, conv) * spherical_harmonic(idx.l, idx.m, q.theta, q.phi);
}

// Evaluates every basis function with n <= n_max at a point, in canonical order.
// Immutable after construction; safe to share across threads.
class BasisEvaluator {
 public:
  BasisEvaluator(int n_max, RadialConvention conv) : n_max_(n_max), conv_(conv) {
    if (n_max < 0) throw ConfigError("n_max must be non-negative");
    detail::check_degree(n_max);
    for (int n = 0; n <= n_max; ++n)
      for (int l = n % 2; l <= n; l += 2) {
        const auto& poly = detail::radial_poly(n, l, conv);
        radial_.emplace_back(poly.begin(), poly.end());
      }
    norms_.resize(legendre_table_size(n_max));
    for (int l = 0; l <= n_max; ++l)
      for (int m = 0; m <= l; ++m)
        norms_[legendre_slot(l, m)] = ((m % 2) ? -1.0 : 1.0) * harmonic_norm(l, m);
  }

  int n_max() const { return n_max_; }
  RadialConvention convention() const { return conv_; }
  std::size_t size() const { return index_count(n_max_); }

  void evaluate(const BallCoord& p, std::span<cplx> out) const {
    const int L = n_max_;
    std::array<double, legendre_table_size(kMaxDegree)> leg{};
    legendre_table(L, std::cos(p.phi), leg);
    std::array<cplx, kMaxDegree + 1> phase{};
    for (int m = 0; m <= L; ++m) phase[std::size_t(m)] = std::polar(1.0, m * p.theta);
    std::array<double, kMaxDegree + 1> rpow{};
    rpow[0] = 1.0;
    for (int i = 1; i <= L; ++i) rpow[std::size_t(i)] = rpow[std::size_t(i - 1)] * p.r;
    const double r2 = p.r * p.r;

    std::size_t pos = 0, pair = 0;
    for (int n = 0; n <= L; ++n)
      for (int l = n % 2; l <= n; l += 2, ++pair) {
        const auto& c = radial_[pair];
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r2 + *it;
        const double R = acc * rpow[std::size_t(l)];
        const std::size_t centre = pos + static_cast<std::size_t>(l);
        for (int m = 0; m <= l; ++m) {
          const double mag = R * norms_[legendre_slot(l, m)] * leg[legendre_slot(l, m)];
          const cplx z = mag * phase[std::size_t(m)];
          out[centre + std::size_t(m)] = z;
          if (m > 0) out[centre - std::size_t(m)] = ((m % 2) ? -1.0 : 1.0) * std::conj(z);
        }
        pos += static_cast<std::size_t>(2 * l + 1);
      }
  }

  std::vector<cplx> evaluate(const BallCoord& p) const {
    std::vector<cplx> out(size());
    evaluate(p, out);
    return out;
  }

 private:
  int n_max_;
  RadialConvention conv_;
  std::vector<std::vector<double>> radial_;  // per (n, l) pair in canonical order
  std::vector<double> norms_;                // (-1)^m N_{l,m}
};

// Entry (i, j) = sum_q w_q Z_i(q) conj(Z_j(q)) over the quadrature nodes.
inline Eigen::MatrixXcd gram_matrix(int n_max, const BallQuadrature& quad, RadialConvention conv) {
  if (quad.empty()) throw ConfigError("gram_matrix: quadrature has no nodes");
  const BasisEvaluator basis(n_max, conv);
  const auto K = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(K, K);
  constexpr std::size_t kChunk = 4096;
  Eigen::MatrixXcd block(static_cast<Eigen::Index>(kChunk), K);
  std::vector<cplx> row(basis.size());
  for (std::size_t start = 0; start < quad.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, quad.size() - start);
    for (std::size_t q = 0; q < count; ++q) {
      basis.evaluate(quad.node(start + q), row);
      const double sw = std::sqrt(quad.weight(start + q));
      for (Eigen::Index k = 0; k < K; ++k) block(Eigen::Index(q), k) = sw * row[std::size_t(k)];
    }
    const auto used = block.topRows(static_cast<Eigen::Index>(count));
    gram.noalias() += used.transpose() * used.conjugate();
  }
  return gram;
}

}  // namespace ballharm
