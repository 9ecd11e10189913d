#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ballharm/basis.hpp"

using namespace ballharm;

namespace {

// P_l^m(x) = (-1)^m (1-x^2)^{m/2} / (2^l l!) d^{l+m}/dx^{l+m} (x^2-1)^l, expanded
// symbolically in long double. Independent of the recurrence under test.
long double legendre_derivative_form(int l, int m, long double x) {
  std::vector<long double> poly(static_cast<std::size_t>(2 * l + 1), 0.0L);
  long double binom = 1.0L;
  for (int k = 0; k <= l; ++k) {
    // (x^2 - 1)^l = sum_k C(l,k) x^{2k} (-1)^{l-k}
    poly[static_cast<std::size_t>(2 * k)] = binom * (((l - k) % 2) ? -1.0L : 1.0L);
    binom = binom * (l - k) / (k + 1);
  }
  for (int d = 0; d < l + m; ++d) {
    for (std::size_t p = 0; p + 1 < poly.size(); ++p) poly[p] = poly[p + 1] * (long double)(p + 1);
    poly.back() = 0.0L;
  }
  long double acc = 0.0L;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
  long double denom = 1.0L;
  for (int i = 1; i <= l; ++i) denom *= 2.0L * i;
  const long double s = std::pow(1.0L - x * x, m / 2.0L);
  return ((m % 2) ? -1.0L : 1.0L) * s * acc / denom;
}

// Jacobi P_k^{(a,b)}(x) by the standard three-term recurrence.
double jacobi(int k, double a, double b, double x) {
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  for (int n = 2; n <= k; ++n) {
    const double c = 2.0 * n + a + b;
    const double a1 = 2.0 * n * (n + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// 3D Zernike radial polynomial from its Jacobi closed form, normalised numerically so
// that the integral of R^2 r^2 over [0,1] is 4 pi / 3.
double jacobi_radial(int n, int l, double r) {
  const int k = (n - l) / 2;
  auto raw = [&](double x) { return std::pow(x, l) * jacobi(k, 0.0, l + 0.5, 2.0 * x * x - 1.0); };
  const GaussRule g = gauss_legendre(40);
  double nrm = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double x = 0.5 * (g.nodes[i] + 1.0);
    nrm += 0.5 * g.weights[i] * raw(x) * raw(x) * x * x;
  }
  return raw(r) * std::sqrt(kBallVolume / nrm);
}

}  // namespace

TEST(BasisIndex, EnumerationIsCanonicalAndCounted) {
  const auto idx = enumerate_indices(1);
  ASSERT_EQ(idx.size(), 4u);
  EXPECT_EQ(idx[0], (BasisIndex{0, 0, 0}));
  EXPECT_EQ(idx[1], (BasisIndex{1, 1, -1}));
  EXPECT_EQ(idx[3], (BasisIndex{1, 1, 1}));
  EXPECT_EQ(index_count(5), 56u);
  const auto all = enumerate_indices(8);
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_TRUE(all[i].valid());
    EXPECT_EQ(canonical_position(all[i]), i);
  }
}

TEST(BasisIndex, ParityAndRangeRejected) {
  EXPECT_FALSE((BasisIndex{2, 1, 0}).valid());
  EXPECT_FALSE((BasisIndex{2, 2, 3}).valid());
  EXPECT_FALSE((BasisIndex{1, 2, 0}).valid());
  EXPECT_THROW(canonical_position({3, 2, 0}), DomainError);
}

TEST(AssocLegendre, Examples) {
  EXPECT_DOUBLE_EQ(assoc_legendre(0, 0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(assoc_legendre(1, 0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(assoc_legendre(1, 1, 0.0), -1.0);
}

TEST(AssocLegendre, DomainErrors) {
  EXPECT_THROW(assoc_legendre(-1, 0, 0.0), DomainError);
  EXPECT_THROW(assoc_legendre(2, 3, 0.0), DomainError);
  EXPECT_THROW(assoc_legendre(2, -1, 0.0), DomainError);
  EXPECT_THROW(assoc_legendre(2, 1, 1.5), DomainError);
  EXPECT_THROW(assoc_legendre(2, 1, std::nan("")), DomainError);
}

TEST(AssocLegendre, MatchesDerivativeFormOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = ux(rng);
    for (int l = 0; l <= 8; ++l)
      for (int m = 0; m <= l; ++m) {
        const double got = assoc_legendre(l, m, x);
        const double want = static_cast<double>(legendre_derivative_form(l, m, x));
        ASSERT_TRUE(std::isfinite(got));
        EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, std::abs(want))) << "l=" << l << " m=" << m;
      }
  }
}

TEST(SphericalHarmonic, Examples) {
  const double y00 = 1.0 / std::sqrt(4.0 * kPi);
  EXPECT_NEAR(std::abs(spherical_harmonic(0, 0, 1.3, 0.4) - y00), 0.0, 1e-15);
  EXPECT_NEAR(y00, 0.2820948, 1e-7);
  EXPECT_NEAR(std::abs(spherical_harmonic(1, 0, 1.0, kPi / 2)), 0.0, 1e-15);
  const cplx lhs = spherical_harmonic(1, -1, 0.0, kPi / 4);
  const cplx rhs = -std::conj(spherical_harmonic(1, 1, 0.0, kPi / 4));
  EXPECT_EQ(lhs, rhs);
  EXPECT_THROW(spherical_harmonic(2, 3, 0.0, 0.0), DomainError);
}

TEST(SphericalHarmonic, ConjugateSymmetryIsBitExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(0.0, kTwoPi), up(0.0, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = ut(rng), p = up(rng);
    for (int l = 0; l <= 8; ++l)
      for (int m = 1; m <= l; ++m) {
        const cplx pos = spherical_harmonic(l, m, t, p);
        const cplx neg = spherical_harmonic(l, -m, t, p);
        const cplx expect = (m % 2 ? -1.0 : 1.0) * std::conj(pos);
        EXPECT_EQ(neg.real(), expect.real());
        EXPECT_EQ(neg.imag(), expect.imag());
      }
  }
}

TEST(SphericalHarmonic, OrthonormalOnSphere) {
  // Gauss-Legendre in cos(phi) times a uniform theta rule; exact for l, l' <= 5.
  const GaussRule g = gauss_legendre(12);
  const int nt = 16;
  std::vector<std::pair<int, int>> lm;
  for (int l = 0; l <= 5; ++l)
    for (int m = -l; m <= l; ++m) lm.emplace_back(l, m);
  for (auto [l1, m1] : lm)
    for (auto [l2, m2] : lm) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < g.nodes.size(); ++k)
        for (int j = 0; j < nt; ++j) {
          const double t = kTwoPi * j / nt, p = std::acos(g.nodes[k]);
          acc += g.weights[k] * (kTwoPi / nt) * spherical_harmonic(l1, m1, t, p) *
                 std::conj(spherical_harmonic(l2, m2, t, p));
        }
      const double want = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
      EXPECT_NEAR(acc.real(), want, 1e-6);
      EXPECT_NEAR(acc.imag(), 0.0, 1e-6);
    }
}

TEST(ZernikeRadial, LiteralExamples) {
  EXPECT_DOUBLE_EQ(zernike_radial(0, 0, 0.7, RadialConvention::PaperLiteral), 1.0);
  EXPECT_DOUBLE_EQ(zernike_radial(2, 0, 0.5, RadialConvention::PaperLiteral), -0.5);
  EXPECT_DOUBLE_EQ(zernike_radial(1, 1, 0.3, RadialConvention::PaperLiteral), 0.3);
}

TEST(ZernikeRadial, Errors) {
  EXPECT_THROW(zernike_radial(3, 0, 0.5, RadialConvention::PaperLiteral), DomainError);
  EXPECT_THROW(zernike_radial(2, 3, 0.5, RadialConvention::Orthogonalized), DomainError);
  EXPECT_THROW(zernike_radial(2, 0, 1.5, RadialConvention::Orthogonalized), DomainError);
  EXPECT_THROW(zernike_radial(18, 0, 0.5, RadialConvention::Orthogonalized), ConfigError);
}

TEST(ZernikeRadial, OrthogonalizedMatchesJacobiClosedForm) {
  for (int n = 0; n <= 10; ++n)
    for (int l = n % 2; l <= n; l += 2)
      for (double r : {0.0, 0.1, 0.37, 0.5, 0.81, 1.0}) {
        const double want = jacobi_radial(n, l, r);
        EXPECT_NEAR(zernike_radial(n, l, r, RadialConvention::Orthogonalized), want,
                    1e-9 * std::max(1.0, std::abs(want)))
            << "n=" << n << " l=" << l << " r=" << r;
      }
}

TEST(ZernikeBasis, Examples) {
  const double y00 = 1.0 / std::sqrt(4.0 * kPi);
  const BallCoord p{0.42, 2.0, 1.1};
  EXPECT_NEAR(std::abs(zernike_basis({0, 0, 0}, p, RadialConvention::PaperLiteral) - y00), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(zernike_basis({1, 1, 0}, {1.0, 0.0, kPi / 2}, RadialConvention::PaperLiteral)),
              0.0, 1e-15);
  const cplx neg = zernike_basis({2, 2, -1}, p, RadialConvention::PaperLiteral);
  const cplx pos = zernike_basis({2, 2, 1}, p, RadialConvention::PaperLiteral);
  EXPECT_EQ(neg, -std::conj(pos));
}

TEST(ZernikeBasis, OriginIsCanonicalised) {
  const cplx a = zernike_basis({2, 2, 1}, {0.0, 1.0, 2.0}, RadialConvention::Orthogonalized);
  const cplx b = zernike_basis({2, 2, 1}, {0.0, 0.0, 0.0}, RadialConvention::Orthogonalized);
  EXPECT_EQ(a, b);
}

TEST(BasisEvaluator, AgreesWithPointwiseEvaluation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ur(0.0, 1.0), ut(0.0, kTwoPi), up(0.0, kPi);
  for (auto conv : {RadialConvention::PaperLiteral, RadialConvention::Orthogonalized}) {
    const BasisEvaluator eval(6, conv);
    const auto idx = enumerate_indices(6);
    for (int trial = 0; trial < 20; ++trial) {
      const BallCoord p{ur(rng), ut(rng), up(rng)};
      const auto all = eval.evaluate(p);
      for (std::size_t k = 0; k < idx.size(); ++k)
        EXPECT_NEAR(std::abs(all[k] - zernike_basis(idx[k], p, conv)), 0.0, 1e-12);
    }
  }
}

TEST(GramMatrix, SingleFunctionNormalisation) {
  const auto quad = make_quadrature(8, 8, 8);
  const auto g = gram_matrix(0, quad, RadialConvention::Orthogonalized);
  ASSERT_EQ(g.rows(), 1);
  EXPECT_NEAR(g(0, 0).real(), kBallVolume, 1e-9);
}

TEST(GramMatrix, EmptyQuadratureRejected) {
  EXPECT_THROW(make_quadrature(0, 0, 0), ConfigError);
  EXPECT_THROW(gram_matrix(1, BallQuadrature{}, RadialConvention::Orthogonalized), ConfigError);
}

TEST(GramMatrix, OrthogonalizedIsScaledIdentity) {
  const auto quad = make_quadrature(16, 16, 16);
  const auto g = gram_matrix(5, quad, RadialConvention::Orthogonalized);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double want = (i == j) ? kBallVolume : 0.0;
      EXPECT_NEAR(std::abs(g(i, j) - want), 0.0, 1e-6) << i << "," << j;
    }
}

TEST(GramMatrix, PaperLiteralIsNotOrthogonal) {
  // R_{0,0} and R_{2,0} from the 2D formula overlap under the r^2 measure.
  const auto quad = make_quadrature(16, 16, 16);
  const auto g = gram_matrix(2, quad, RadialConvention::PaperLiteral);
  const std::size_t a = canonical_position({0, 0, 0}), b = canonical_position({2, 0, 0});
  // integral of (2r^2 - 1) r^2 dr = 2/5 - 1/3 = 1/15
  EXPECT_NEAR(g(Eigen::Index(a), Eigen::Index(b)).real(), 1.0 / 15.0, 1e-12);
}
