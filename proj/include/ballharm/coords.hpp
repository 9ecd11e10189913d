#pragma once

// Ball coordinates, Cartesian points and rigid rotations.
//
// Axis convention: y is the north pole and the frame is right-handed.
//
//   x = -r sin(phi) cos(theta)
//   y =  r cos(phi)
//   z =  r sin(phi) sin(theta)
//
// With this choice R_y(a) advances the azimuth by a, and R_y(a) R_z(b) carries
// the north pole to the direction (theta = a, phi = b).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ballharm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kBallVolume = 4.0 * std::numbers::pi / 3.0;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// Wraps an angle into [0, 2pi).
inline double wrap_azimuth(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

struct BallCoord {
  double r = 0.0;
  double theta = 0.0;  // azimuth in [0, 2pi)
  double phi = 0.0;    // polar angle from +y in [0, pi]

  // Canonical form: theta wrapped, and both angles zero at the origin.
  static BallCoord make(double r, double theta, double phi) {
    if (r == 0.0) return {0.0, 0.0, 0.0};
    return {r, wrap_azimuth(theta), phi};
  }

  friend constexpr bool operator==(const BallCoord&, const BallCoord&) = default;
};

// A direction on the unit sphere: azimuth and polar angle.
struct Direction {
  double theta = 0.0;
  double phi = 0.0;
};

inline Vec3 to_cartesian(const BallCoord& p) {
  const double s = std::sin(p.phi);
  return {-p.r * s * std::cos(p.theta), p.r * std::cos(p.phi), p.r * s * std::sin(p.theta)};
}

inline Vec3 to_cartesian(const Direction& d) { return to_cartesian(BallCoord{1.0, d.theta, d.phi}); }

inline BallCoord to_ball(const Vec3& v) {
  const double r = norm(v);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double c = std::clamp(v.y / r, -1.0, 1.0);
  return BallCoord::make(r, std::atan2(v.z, -v.x), std::acos(c));
}

inline Direction to_direction(const Vec3& v) {
  const BallCoord b = to_ball(v);
  return {b.theta, b.phi};
}

// Angle between two directions, in [0, pi].
inline double angular_distance(Vec3 a, Vec3 b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

// Angle between two undirected axes, in [0, pi/2].
inline double axis_distance(Vec3 a, Vec3 b) {
  const double d = angular_distance(a, b);
  return std::min(d, kPi - d);
}

class Rotation {
 public:
  using Matrix = std::array<std::array<double, 3>, 3>;

  constexpr Rotation() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}
  explicit constexpr Rotation(const Matrix& m) : m_(m) {}

  static Rotation about_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Rotation(Matrix{{{1, 0, 0}, {0, c, -s}, {0, s, c}}});
  }
  static Rotation about_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Rotation(Matrix{{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}});
  }
  static Rotation about_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Rotation(Matrix{{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}});
  }

  // R_y(alpha) R_z(beta) R_y(gamma).
  static Rotation euler_yzy(double alpha, double beta, double gamma) {
    return about_y(alpha) * about_z(beta) * about_y(gamma);
  }

  // R_y(alpha) R_z(beta): carries the north pole to (theta = alpha, phi = beta).
  static Rotation aligning_pole(double alpha, double beta) { return about_y(alpha) * about_z(beta); }

  Rotation inverse() const {
    Matrix t{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t[i][j] = m_[j][i];
    return Rotation(t);
  }

  Vec3 apply(const Vec3& v) const {
    return {m_[0][0] * v.x + m_[0][1] * v.y + m_[0][2] * v.z,
            m_[1][0] * v.x + m_[1][1] * v.y + m_[1][2] * v.z,
            m_[2][0] * v.x + m_[2][1] * v.y + m_[2][2] * v.z};
  }

  BallCoord apply(const BallCoord& p) const { return to_ball(apply(to_cartesian(p))); }
  Direction apply(const Direction& d) const { return to_direction(apply(to_cartesian(d))); }

  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    Matrix c{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) c[i][j] += a.m_[i][k] * b.m_[k][j];
    return Rotation(c);
  }

  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

}  // namespace ballharm
