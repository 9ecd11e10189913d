#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ballharm/pointcloud.hpp"

using namespace ballharm;

namespace {

constexpr const char* kTriangleOff = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";

double integrate(const BallQuadrature& q, const std::function<double(const BallCoord&)>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weight(i) * g(q.node(i));
  return s;
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PointCloud pc;
  for (std::size_t i = 0; i < n; ++i) pc.points.push_back({g(rng), g(rng), g(rng)});
  return pc;
}

}  // namespace

TEST(Quadrature, WeightsSumToBallVolume) {
  const auto q = make_quadrature(32, 32, 32);
  EXPECT_EQ(q.size(), 32u * 32u * 32u);
  double s = 0.0;
  for (double w : q.weights()) {
    EXPECT_GT(w, 0.0);
    s += w;
  }
  EXPECT_NEAR(s, 4.1887902047863905, 1e-9);
}

TEST(Quadrature, IntegratesRadius) {
  const auto q = make_quadrature(32, 32, 32);
  EXPECT_NEAR(integrate(q, [](const BallCoord& p) { return p.r; }), kPi, 1e-9);
}

TEST(Quadrature, BelowMinimumResolutionRejected) {
  EXPECT_THROW(make_quadrature(1, 8, 8), ConfigError);
  EXPECT_THROW(make_quadrature(8, 1, 8), ConfigError);
  EXPECT_THROW(make_quadrature(8, 8, 1), ConfigError);
}

TEST(Quadrature, PolynomialExactness) {
  // r^a cos^b(phi): integral = 2 pi * 1/(a+3) * (2/(b+1) for even b, 0 for odd b).
  const int nr = 6, np = 7;
  const auto q = make_quadrature(nr, 4, np);
  for (int a = 0; a + 2 <= 2 * nr - 1; ++a)
    for (int b = 0; b <= np - 1; ++b) {
      const double want = kTwoPi / (a + 3) * ((b % 2) ? 0.0 : 2.0 / (b + 1));
      const double got =
          integrate(q, [&](const BallCoord& p) { return std::pow(p.r, a) * std::pow(std::cos(p.phi), b); });
      EXPECT_NEAR(got, want, 1e-9) << "a=" << a << " b=" << b;
    }
}

TEST(Quadrature, LayoutAndNearestNode) {
  const auto q = make_quadrature(5, 6, 7);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto g = q.grid_index(i);
    EXPECT_EQ(q.flat_index(g.ir, g.it, g.ip), i);
    EXPECT_EQ(q.nearest_node(q.node(i)), i);
  }
  EXPECT_TRUE(std::is_sorted(q.phis().begin(), q.phis().end()));
  EXPECT_EQ(q.nearest_azimuth(kTwoPi - 1e-9), 0u);
}

TEST(Off, MinimalFile) {
  std::istringstream in(kTriangleOff);
  const auto m = parse_off(in);
  EXPECT_EQ(m.vertices.size(), 3u);
  ASSERT_EQ(m.faces.size(), 1u);
  EXPECT_EQ(m.faces[0], (std::array<std::size_t, 3>{0, 1, 2}));
}

TEST(Off, ModelNetSingleLineHeader) {
  std::istringstream a(kTriangleOff), b("OFF3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const auto ma = parse_off(a), mb = parse_off(b);
  EXPECT_EQ(ma.vertices, mb.vertices);
  EXPECT_EQ(ma.faces, mb.faces);
}

TEST(Off, IndexOutOfRangeReportsLine) {
  std::istringstream in("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
  try {
    parse_off(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6u);
  }
}

TEST(Off, MalformedInputs) {
  for (const char* text : {"", "PLY\n", "OFF\nx y z\n", "OFF\n3 1 0\n0 0 0\n", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n",
                           "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_off(in), ParseError) << text;
  }
}

TEST(Off, PolygonsFannedAndDegenerateFacesDropped) {
  std::istringstream in("OFF\n# quad plus a degenerate triangle\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n3 1 1 2\n");
  const auto m = parse_off(in);
  ASSERT_EQ(m.faces.size(), 2u);
  EXPECT_EQ(m.faces[1], (std::array<std::size_t, 3>{0, 2, 3}));
}

TEST(Xyz, RoundTrip) {
  const auto pc = random_cloud(20, 1);
  std::stringstream ss;
  write_xyz(ss, pc);
  const auto back = parse_xyz(ss);
  EXPECT_EQ(back.points, pc.points);
  std::istringstream bad("1 2 3\n4 5\n");
  EXPECT_THROW(parse_xyz(bad), ParseError);
}

TEST(MeshToPoints, CoplanarAndDeterministic) {
  std::istringstream in("OFF\n3 1 0\n0.2 -1 0.5\n1 0.3 0.1\n-0.4 0.8 0.9\n3 0 1 2\n");
  const auto m = parse_off(in);
  const auto a = mesh_to_points(m, 1000, 7), b = mesh_to_points(m, 1000, 7);
  ASSERT_EQ(a.size(), 1000u);
  EXPECT_EQ(a.points, b.points);
  const Vec3 n = cross(m.vertices[1] - m.vertices[0], m.vertices[2] - m.vertices[0]);
  const double nn = norm(n);
  for (const auto& p : a.points) EXPECT_LE(std::abs(dot(p - m.vertices[0], n)) / nn, 1e-9);
}

TEST(MeshToPoints, AreaWeighted) {
  // Two disjoint triangles with area ratio 9:1.
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 3, 0}, {10, 0, 0}, {11, 0, 0}, {10, 1, 0}};
  m.faces = {{0, 1, 2}, {3, 4, 5}};
  const auto pc = mesh_to_points(m, 10000, 3);
  std::size_t big = 0;
  for (const auto& p : pc.points) big += (p.x < 5.0);
  const double sigma = std::sqrt(10000 * 0.9 * 0.1);
  EXPECT_NEAR(double(big), 9000.0, 3.0 * sigma);
}

TEST(MeshToPoints, EmptyMeshRejected) {
  EXPECT_THROW(mesh_to_points(TriangleMesh{}, 10, 1), DegenerateInputError);
}

TEST(Normalize, SymmetricPair) {
  PointCloud pc{{{1, 1, 1}, {-1, -1, -1}}, false};
  const auto out = normalize_to_ball(pc);
  EXPECT_TRUE(out.normalized);
  const double s = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(out.points[0].x, s, 1e-15);
  EXPECT_NEAR(out.points[1].z, -s, 1e-15);
}

TEST(Normalize, TranslationRemovedAndInvariantsHold) {
  const auto pc = random_cloud(200, 9);
  PointCloud shifted = pc;
  for (auto& p : shifted.points) p = p + Vec3{5, 5, 5};
  const auto a = normalize_to_ball(pc), b = normalize_to_ball(shifted);
  Vec3 c;
  double rmax = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(norm(a.points[i] - b.points[i]), 0.0, 1e-12);
    c = c + a.points[i];
    rmax = std::max(rmax, norm(a.points[i]));
  }
  EXPECT_NEAR(norm(c) / double(a.size()), 0.0, 1e-9);
  EXPECT_NEAR(rmax, 1.0, 1e-9);
}

TEST(Normalize, CoincidentPointsRejected) {
  PointCloud pc{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, false};
  EXPECT_THROW(normalize_to_ball(pc), DegenerateInputError);
}

TEST(SplitHemispheres, StrictInequalities) {
  PointCloud pc{{{0, 1, 0}, {0, -1, 0}, {1, 0, 0}}, true};
  const auto [up, down] = split_hemispheres(pc);
  ASSERT_EQ(up.size(), 1u);
  ASSERT_EQ(down.size(), 1u);
  EXPECT_EQ(up.points[0], (Vec3{0, 1, 0}));
  EXPECT_EQ(down.points[0], (Vec3{0, -1, 0}));
  const auto [e1, e2] = split_hemispheres(PointCloud{});
  EXPECT_TRUE(e1.empty() && e2.empty());
}

TEST(SplitHemispheres, Partitions) {
  auto pc = random_cloud(500, 4);
  pc.points.push_back({0.3, 0.0, 0.2});
  const auto [up, down] = split_hemispheres(pc);
  std::size_t on_plane = 0;
  for (const auto& p : pc.points) on_plane += (p.y == 0.0);
  EXPECT_EQ(up.size() + down.size() + on_plane, pc.size());
  for (const auto& p : up.points) EXPECT_GT(p.y, 0.0);
  for (const auto& p : down.points) EXPECT_LT(p.y, 0.0);
}

TEST(Rotate, Examples) {
  PointCloud pc{{{0, 1, 0}, {0.3, -0.2, 0.7}}, false};
  const auto id = rotate_points(pc, 0, 0, 0);
  EXPECT_EQ(id.points, pc.points);
  const auto rz = rotate_points(pc, Rotation::about_z(kPi / 2));
  EXPECT_NEAR(rz.points[0].x, -1.0, 1e-15);
  EXPECT_NEAR(rz.points[0].y, 0.0, 1e-15);
  EXPECT_NEAR(rz.points[0].z, 0.0, 1e-15);
}

TEST(Rotate, NormsPreservedAndInverseRecovers) {
  const auto pc = random_cloud(100, 2);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng), b = u(rng), g = u(rng);
    const auto r = rotate_points(pc, a, b, g);
    // inverse of R_y(a) R_z(b) R_y(g) is R_y(-g) R_z(-b) R_y(-a)
    const auto back = rotate_points(r, -g, -b, -a);
    for (std::size_t i = 0; i < pc.size(); ++i) {
      EXPECT_NEAR(norm(r.points[i]), norm(pc.points[i]), 1e-12);
      EXPECT_NEAR(back.points[i].x, pc.points[i].x, 1e-9);
      EXPECT_NEAR(back.points[i].y, pc.points[i].y, 1e-9);
      EXPECT_NEAR(back.points[i].z, pc.points[i].z, 1e-9);
    }
  }
}

TEST(Rotate, AligningPoleConvention) {
  const Rotation t = Rotation::aligning_pole(0.7, 1.1);
  const Vec3 got = t.apply(Vec3{0, 1, 0});
  const Vec3 want = to_cartesian(Direction{0.7, 1.1});
  EXPECT_NEAR(norm(got - want), 0.0, 1e-14);
  const BallCoord p{0.5, 1.0, 0.8};
  const BallCoord q = Rotation::about_y(0.4).apply(p);
  EXPECT_NEAR(q.theta, 1.4, 1e-12);
  EXPECT_NEAR(q.phi, 0.8, 1e-12);
}

TEST(Rasterize, SinglePoint) {
  const auto q = share(make_quadrature(16, 16, 16));
  PointCloud pc{{to_cartesian(BallCoord{0.8, 1.0, 1.2})}, true};
  const auto f = rasterize(pc, q);
  ASSERT_EQ(f.support_size(), 1u);
  const auto it = std::find_if(f.values.begin(), f.values.end(), [](double v) { return v != 0.0; });
  const auto k = std::size_t(it - f.values.begin());
  EXPECT_EQ(*it, q->node(k).r);
  EXPECT_NEAR(*it, 0.8, 0.05);
}

TEST(Rasterize, EmptyAndIdempotent) {
  const auto q = share(make_quadrature(8, 8, 8));
  EXPECT_EQ(rasterize(PointCloud{{}, true}, q).support_size(), 0u);
  const Vec3 a = to_cartesian(BallCoord{0.5, 2.0, 1.0});
  const Vec3 b = to_cartesian(BallCoord{0.5 + 1e-4, 2.0 - 1e-4, 1.0});
  EXPECT_EQ(rasterize(PointCloud{{a, b}, true}, q).values, rasterize(PointCloud{{a}, true}, q).values);
}

TEST(Rasterize, PreconditionsAndPermutationInvariance) {
  const auto q = share(make_quadrature(12, 12, 12));
  auto pc = normalize_to_ball(random_cloud(300, 5));
  EXPECT_THROW(rasterize(PointCloud{pc.points, false}, q), PreconditionError);
  const auto f = rasterize(pc, q);
  std::mt19937_64 rng(1);
  std::shuffle(pc.points.begin(), pc.points.end(), rng);
  EXPECT_EQ(rasterize(pc, q).values, f.values);
  for (std::size_t i = 0; i < f.size(); ++i)
    EXPECT_TRUE(f.values[i] == 0.0 || f.values[i] == q->node(i).r);
}

TEST(Rasterize, DefaultToleranceKeepsExtremePoints) {
  const auto q = share(make_quadrature(8, 8, 8));
  PointCloud pc{{{0, 1, 0}, {0, -1, 0}, {1, 0, 0}, {0, 0, 0}}, true};
  EXPECT_EQ(rasterize(pc, q).support_size(), 4u);
  // A tight tolerance drops off-node points.
  PointCloud off{{to_cartesian(BallCoord{0.5, 0.2, 1.3})}, true};
  EXPECT_EQ(rasterize(off, q, 1e-6).support_size(), 0u);
}
