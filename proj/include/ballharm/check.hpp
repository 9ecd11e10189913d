#pragma once

// Built-in verification suites, one per acceptance property. Each suite measures,
// compares against its tolerance and its time budget, and reports the numbers.

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ballharm/conv.hpp"
#include "ballharm/moments.hpp"
#include "ballharm/pointcloud.hpp"
#include "ballharm/shapes.hpp"
#include "ballharm/symmetry.hpp"

namespace ballharm {

struct CheckOptions {
  int n_max = 5;
  std::uint64_t seed = 1;
  RadialConvention convention = RadialConvention::Orthogonalized;
  std::optional<QuadResolution> quad;  // overrides every suite's own resolution
};

struct SuiteResult {
  std::string name;
  int criterion = 0;
  bool passed = false;
  double seconds = 0.0;
  double budget = 0.0;  // seconds
  std::vector<std::string> measurements;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return seed * 1000003ULL + tag; }

inline std::shared_ptr<const BallQuadrature> suite_quad(const CheckOptions& o, QuadResolution fallback) {
  return share(make_quadrature(o.quad.value_or(fallback)));
}

// Q diag(s) W^T with orthonormal Q, W and singular values in [1, 1.5].
inline Eigen::MatrixXd well_conditioned(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> us(1.0, 1.5);
  auto gauss = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gauss(rows, cols)).householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd w = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss(cols, cols)).householderQ();
  Eigen::VectorXd s(cols);
  for (int i = 0; i < cols; ++i) s(i) = us(rng);
  return q * s.asDiagonal() * w.transpose();
}

inline std::vector<BallCoord> uniform_ball_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<BallCoord> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(BallCoord::make(std::cbrt(u(rng)), kTwoPi * u(rng), std::acos(1.0 - 2.0 * u(rng))));
  return pts;
}

}  // namespace detail

inline SuiteResult check_gram(const CheckOptions& o) {
  SuiteResult r{"gram", 1, false, 0.0, 60.0, {}};
  const auto quad = detail::suite_quad(o, {64, 64, 64});
  const Eigen::MatrixXcd g = gram_matrix(o.n_max, *quad, o.convention);
  double diag = 0.0, off = 0.0, off_mass = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (i == j) {
        diag = std::max(diag, std::abs(g(i, j) - kBallVolume));
      } else {
        off = std::max(off, std::abs(g(i, j)));
        off_mass += std::norm(g(i, j));
      }
    }
  r.passed = diag <= 1e-6 && off <= 1e-6;
  r.measurements = {"quadrature " + to_string(quad->resolution()), "max |diag - 4pi/3| = " + detail::sci(diag),
                    "max |off-diagonal| = " + detail::sci(off),
                    "off-diagonal Frobenius mass = " + detail::sci(std::sqrt(off_mass))};
  return r;
}

inline SuiteResult check_roundtrip(const CheckOptions& o) {
  SuiteResult r{"roundtrip", 2, false, 0.0, 60.0, {}};
  const auto pts = detail::uniform_ball_points(600, detail::sub_seed(o.seed, 21));
  const auto probe = detail::uniform_ball_points(500, detail::sub_seed(o.seed, 22));
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto truth = random_real_moments(o.n_max, o.convention, detail::sub_seed(o.seed, 200 + s));
    const auto m = moments_lsq(pts, reconstruct(truth, pts), o.n_max, PinvOptions::converged(), o.convention);
    const auto want = reconstruct(truth, probe), got = reconstruct(m, probe);
    double err = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
      err = std::max(err, std::abs(got[i] - want[i]));
      mag = std::max(mag, std::abs(want[i]));
    }
    worst = std::max(worst, err / mag);
  }
  r.passed = worst <= 1e-6;
  r.measurements = {"50 functions, 600 samples, 500 probe points", "max relative error = " + detail::sci(worst)};
  return r;
}

// Direct vs least-squares moments on rasterized synthetic solids.
inline SuiteResult check_reconstruction(const CheckOptions& o) {
  SuiteResult r{"reconstruction", 3, false, 0.0, 600.0, {}};
  const auto quad = detail::suite_quad(o, {48, 48, 48});
  const auto shapes = shapes::desk_set();
  bool ordered = true;
  double sum_direct = 0.0, sum_lsq = 0.0, min_ratio = 1e300;
  std::string worst_shape;
  for (const auto& s : shapes) {
    const auto pc = normalize_to_ball(mesh_to_points(s.mesh, 6000, o.seed));
    const auto f = rasterize(pc, quad);
    for (int n = 1; n <= o.n_max; ++n) {
      const double d = reconstruction_error(f, moments_direct(f, n, o.convention)).relative;
      const double l =
          reconstruction_error(f, moments_lsq(f, n, PinvOptions::converged(), o.convention, 1.0, o.seed)).relative;
      if (!(l < d)) {
        ordered = false;
        r.measurements.push_back(s.name + " n=" + std::to_string(n) + ": lsq " + detail::sci(l) + " >= direct " +
                                 detail::sci(d));
      }
      if (n == o.n_max) {
        sum_direct += d;
        sum_lsq += l;
        if (d / l < min_ratio) {
          min_ratio = d / l;
          worst_shape = s.name;
        }
      }
    }
  }
  const double k = double(shapes.size());
  const double ratio = sum_direct / sum_lsq;
  r.passed = ordered && ratio >= 3.0;
  r.measurements.insert(r.measurements.begin(),
                        {std::to_string(shapes.size()) + " shapes, quadrature " + to_string(quad->resolution()),
                         std::string("lsq < direct at every n: ") + (ordered ? "yes" : "no"),
                         "mean relative error at n=" + std::to_string(o.n_max) + ": direct " +
                             detail::sci(sum_direct / k) + ", lsq " + detail::sci(sum_lsq / k),
                         "ratio of means direct/lsq = " + detail::fmt("%.2f", ratio),
                         "smallest per-shape ratio = " + detail::fmt("%.2f", min_ratio) + " (" + worst_shape + ")"});
  return r;
}

// Closed-form volumetric convolution against quadrature with a resampled kernel.
inline SuiteResult check_conv(const CheckOptions& o) {
  SuiteResult r{"conv", 4, false, 0.0, 300.0, {}};
  const auto quad = detail::suite_quad(o, {48, 48, 48});
  const auto dirs = fibonacci_directions(200);
  const auto fm = random_real_moments(o.n_max, o.convention, detail::sub_seed(o.seed, 41));
  const auto g = random_kernel_bank(1, o.n_max, o.convention, detail::sub_seed(o.seed, 42))[0];
  const auto want = brute_force_conv(synthesize(fm, quad), synthesize(g.moments(), quad), dirs);
  std::vector<double> exact, literal;
  const auto fe = vol_conv(fm, g), fp = vol_conv(fm, g, ConvScaling::PaperLiteral);
  for (const auto& d : dirs) {
    exact.push_back(eval_feature_map(fe, d));
    literal.push_back(eval_feature_map(fp, d));
  }
  const double err = relative_l2(exact, want);
  r.passed = err <= 1e-2;
  r.measurements = {"200 directions, quadrature " + to_string(quad->resolution()),
                    "relative L2 (exact scaling) = " + detail::sci(err),
                    "relative L2 (literal scaling, informational) = " + detail::sci(relative_l2(literal, want))};
  return r;
}

inline SuiteResult check_equivariance(const CheckOptions& o) {
  SuiteResult r{"equivariance", 5, false, 0.0, 300.0, {}};
  const auto dirs = fibonacci_directions(200);
  std::mt19937_64 rng(detail::sub_seed(o.seed, 51));
  std::uniform_real_distribution<double> ua(0.0, kTwoPi), uc(-1.0, 1.0);
  double worst = 0.0, worst_rel = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto f = random_real_moments(o.n_max, o.convention, detail::sub_seed(o.seed, 500 + k));
    const auto g = random_kernel_bank(1, o.n_max, o.convention, detail::sub_seed(o.seed, 600 + k))[0];
    const double a = ua(rng), b = std::acos(uc(rng)), c = ua(rng);
    const auto e = equivariance_check(f, g, a, b, c, dirs);
    worst = std::max(worst, e.max_deviation);
    worst_rel = std::max(worst_rel, e.relative());
  }
  r.passed = worst <= 1e-3;
  r.measurements = {"20 rotations, 200 directions", "max deviation = " + detail::sci(worst),
                    "max deviation / max magnitude = " + detail::sci(worst_rel)};

  // Same property through rasterization and fitting; includes resampling error.
  const auto quad = detail::suite_quad(o, {48, 48, 48});
  const auto pc = normalize_to_ball(mesh_to_points(shapes::desk_set()[5].mesh, 6000, o.seed));
  const auto g = random_kernel_bank(1, o.n_max, o.convention, detail::sub_seed(o.seed, 52))[0];
  const auto e = equivariance_check(pc, g, ua(rng), std::acos(uc(rng)), ua(rng), quad, dirs, PinvOptions::converged(),
                                    1.0, o.seed);
  r.measurements.push_back("rasterized point cloud, relative deviation (informational) = " + detail::sci(e.relative()));
  return r;
}

inline SuiteResult check_sphere(const CheckOptions& o) {
  SuiteResult r{"sphere", 6, false, 0.0, 300.0, {}};
  const auto dirs = fibonacci_directions(200);
  std::mt19937_64 rng(detail::sub_seed(o.seed, 61));
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    FeatureMap f(o.n_max), g(o.n_max);
    for (auto& c : f.coeffs) c = cplx(gauss(rng), gauss(rng));
    for (int l = 0; l <= o.n_max; ++l) g.at(l, 0) = cplx(gauss(rng), gauss(rng));
    const auto want = brute_force_sph_conv(f, g, dirs);
    const auto out = sph_conv(f, g);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      num += std::norm(eval_sphere_complex(out, dirs[i]) - want[i]);
      den += std::norm(want[i]);
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  r.passed = worst <= 1e-2;
  r.measurements = {"3 pairs, l_max " + std::to_string(o.n_max) + ", 200 directions",
                    "max relative L2 = " + detail::sci(worst)};
  return r;
}

inline SuiteResult check_pinv(const CheckOptions& o) {
  SuiteResult r{"pinv", 7, false, 0.0, 300.0, {}};
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(2, 2);
  want(0, 0) = 0.5;
  want(1, 1) = 0.25;
  const double diag_err = (pinv_iterate(d, PinvOptions::converged()) - want).cwiseAbs().maxCoeff();

  std::mt19937_64 rng(detail::sub_seed(o.seed, 71));
  bool monotone = true;
  double worst_rise = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto a = detail::well_conditioned(200, 50, rng);
    PinvReport rep;
    const auto v = pinv_iterate(a, {12, std::nullopt, 0.0, 50}, &rep);
    const double floor = 1e-12 * v.norm();  // converged residuals jitter at rounding level
    for (std::size_t k = 1; k < rep.residuals.size(); ++k) {
      const double rise = rep.residuals[k] - rep.residuals[k - 1];
      worst_rise = std::max(worst_rise, rise);
      if (rise > floor) monotone = false;
    }
  }

  const auto a = detail::well_conditioned(200, 50, rng);
  PinvReport fixed;
  bool finite = true;
  try {
    const auto v = pinv_iterate(a, PinvOptions::paper(), &fixed);
    finite = v.allFinite();
    for (double x : fixed.residuals) finite = finite && std::isfinite(x);
  } catch (const NumericError&) {
    finite = false;
  }
  r.passed = diag_err <= 1e-8 && monotone && finite;
  r.measurements = {"diag(2,4) max error = " + detail::sci(diag_err),
                    std::string("residuals non-increasing on 20 matrices: ") + (monotone ? "yes" : "no") +
                        " (largest step change " + detail::sci(worst_rise) + ")",
                    "alpha 0.001, 3 iterations: final residual = " +
                        (fixed.residuals.empty() ? std::string("n/a") : detail::sci(fixed.residuals.back()))};
  return r;
}

inline SuiteResult check_symmetry(const CheckOptions& o) {
  SuiteResult r{"symmetry", 8, false, 0.0, 300.0, {}};
  const AxisGrid grid;
  const double cell = std::hypot(grid.alpha_step(), grid.beta_step());
  std::mt19937_64 rng(detail::sub_seed(o.seed, 81));
  std::uniform_real_distribution<double> ua(0.0, kTwoPi), uc(-1.0, 1.0);
  int hits = 0;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Direction u{ua(rng), std::acos(uc(rng))};
    const auto g = random_kernel_bank(1, o.n_max, o.convention, detail::sub_seed(o.seed, 800 + k))[0].moments();
    const auto best = symmetry_argmax(rotate_moments(g, Rotation::aligning_pole(u.theta, u.phi)), grid);
    const double dist = axis_distance(to_cartesian(best.axis), to_cartesian(u));
    worst = std::max(worst, dist);
    if (dist <= cell) ++hits;
  }
  r.passed = hits == 10;
  r.measurements = {std::to_string(hits) + "/10 axes recovered on a 20x20 grid",
                    "largest axis error = " + detail::fmt("%.4f", worst) + " rad (cell diagonal " +
                        detail::fmt("%.4f", cell) + ")"};
  return r;
}

struct Suite {
  const char* name;
  std::function<SuiteResult(const CheckOptions&)> run;
};

inline const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> suites = {
      {"gram", check_gram},       {"roundtrip", check_roundtrip}, {"reconstruction", check_reconstruction},
      {"conv", check_conv},       {"equivariance", check_equivariance}, {"sphere", check_sphere},
      {"pinv", check_pinv},       {"symmetry", check_symmetry}};
  return suites;
}

// Runs one suite, timing it. A thrown library error counts as a failure.
inline SuiteResult run_suite(const Suite& s, const CheckOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  try {
    r = s.run(o);
  } catch (const Error& e) {
    r.name = s.name;
    r.passed = false;
    r.measurements = {std::string("error: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.budget > 0.0 && r.seconds > r.budget) {
    r.passed = false;
    r.measurements.push_back("over time budget of " + detail::fmt("%.0f", r.budget) + " s");
  }
  return r;
}

}  // namespace ballharm
