#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavrelay {

/// Planar position / displacement in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double dot(const Point2& o) const { return x * o.x + y * o.y; }
  /// z-component of the 2D cross product this x o.
  constexpr double cross(const Point2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Relay position relative to the user, expressed in the user->BS frame.
/// rho is the horizontal range from the user (m), theta the signed angle
/// from the user->BS direction (rad, positive counterclockwise).
struct PolarCoord {
  double rho = 0.0;
  double theta = 0.0;
};

/// Vertical layout of the three nodes (m above ground).
struct Heights {
  double h_uav;
  double h_bs;
  double h_user;

  Heights(double uav, double bs, double user) : h_uav(uav), h_bs(bs), h_user(user) {
    if (!(h_uav > h_bs) || !(h_bs > h_user) || !(h_user >= 0.0))
      throw std::invalid_argument("heights must satisfy h_uav > h_bs > h_user >= 0");
  }
};

/// Horizontal frame anchored at the user, with unit axis pointing at the BS.
struct AxisFrame {
  Point2 user;
  Point2 bs;
  Point2 u;  ///< unit vector user -> BS
  double L;  ///< horizontal user-BS separation (m)
};

inline AxisFrame make_frame(const Point2& user, const Point2& bs) {
  const Point2 d = bs - user;
  const double len = d.norm();
  if (len <= 0.0)
    throw std::invalid_argument("user and BS ground positions coincide; axis direction undefined");
  return AxisFrame{user, bs, d * (1.0 / len), len};
}

/// Unit vector at angle theta from the frame axis (rotation of u by theta).
inline Point2 radial_dir(const AxisFrame& f, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * f.u.x - s * f.u.y, s * f.u.x + c * f.u.y};
}

/// Derivative of radial_dir with respect to theta; unit length, orthogonal
/// to radial_dir (the transverse direction of increasing theta).
inline Point2 transverse_dir(const AxisFrame& f, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {-s * f.u.x - c * f.u.y, c * f.u.x - s * f.u.y};
}

inline Point2 from_polar(const AxisFrame& f, const PolarCoord& p) {
  if (p.rho < 0.0) throw std::invalid_argument("polar range must be nonnegative");
  return f.user + radial_dir(f, p.theta) * p.rho;
}

/**
 * Inverse of from_polar. theta is measured from the user->BS direction with
 * counterclockwise positive; a point at the user itself maps to theta = 0.
 */
inline PolarCoord to_polar(const AxisFrame& f, const Point2& x) {
  const Point2 z = x - f.user;
  const double rho = z.norm();
  if (rho == 0.0) return {0.0, 0.0};
  double c = z.dot(f.u) / rho;
  c = std::clamp(c, -1.0, 1.0);
  const double sgn = f.u.cross(z) > 0.0 ? 1.0 : -1.0;
  return {rho, sgn * std::acos(c)};
}

/// Convenience overloads building the frame from the two anchor points.
inline Point2 from_polar(const PolarCoord& p, const Point2& user, const Point2& bs) {
  return from_polar(make_frame(user, bs), p);
}
inline PolarCoord to_polar(const Point2& x, const Point2& user, const Point2& bs) {
  return to_polar(make_frame(user, bs), x);
}

/// 3D relay-user distance for a relay at horizontal position x.
inline double dist_to_user(const Point2& x, const Point2& user, const Heights& h) {
  const double dz = h.h_uav - h.h_user;
  const Point2 d = x - user;
  return std::sqrt(d.dot(d) + dz * dz);
}

/// 3D relay-BS distance for a relay at horizontal position x.
inline double dist_to_bs(const Point2& x, const Point2& bs, const Heights& h) {
  const double dz = h.h_uav - h.h_bs;
  const Point2 d = x - bs;
  return std::sqrt(d.dot(d) + dz * dz);
}

/// Polar form of dist_to_user: sqrt(rho^2 + (h_uav - h_user)^2).
inline double dist_to_user_polar(double rho, const Heights& h) {
  const double dz = h.h_uav - h.h_user;
  return std::sqrt(rho * rho + dz * dz);
}

/// Polar form of dist_to_bs: law of cosines in the horizontal plane plus the
/// BS-UAV height gap.
inline double dist_to_bs_polar(double rho, double theta, double L, const Heights& h) {
  const double dz = h.h_uav - h.h_bs;
  const double horiz2 = rho * rho + L * L - 2.0 * rho * L * std::cos(theta);
  return std::sqrt(std::max(horiz2, 0.0) + dz * dz);
}

/// Elevation angle (rad) from the user up to the relay; pi/2 directly overhead.
inline double elevation_angle(const Point2& x, const Point2& user, const Heights& h) {
  const double horiz = distance(x, user);
  const double dz = h.h_uav - h.h_user;
  return std::atan2(dz, horiz);
}

}  // namespace uavrelay
