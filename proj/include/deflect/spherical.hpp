#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "deflect/elements.hpp"
#include "deflect/vec3.hpp"

// Heliocentric spherical state (r, u, v, w, Theta, phi) and its mapping to
// the ecliptic Cartesian frame. Theta is the in-plane longitude, phi the
// latitude; u/v/w are the radial, tangential and normal velocity components.

namespace deflect {

struct SphericalState {
  double r = 1.0;       // LU
  double u = 0.0;       // SU, radial
  double v = 0.0;       // SU, tangential
  double w = 0.0;       // SU, normal
  double theta = 0.0;   // rad
  double phi = 0.0;     // rad
  double mass = 1.0;    // kg
  double epoch = 0.0;   // TU
};

using Mat3 = std::array<Vec3, 3>;  // rows

// Rotation taking ecliptic Cartesian vector components to (u, v, w).
inline Mat3 uvw_rotation(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  return {Vec3{ct * cp, st * cp, sp},
          Vec3{-st, ct, 0.0},
          Vec3{-ct * sp, -st * sp, cp}};
}

inline Vec3 apply(const Mat3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

inline Vec3 apply_transpose(const Mat3& m, const Vec3& v) {
  return {m[0].x * v.x + m[1].x * v.y + m[2].x * v.z,
          m[0].y * v.x + m[1].y * v.y + m[2].y * v.z,
          m[0].z * v.x + m[1].z * v.y + m[2].z * v.z};
}

inline SphericalState spherical_from_cartesian(const CartesianState& st, double mass) {
  const double r = st.position.norm();
  if (r <= 0.0) throw std::invalid_argument("spherical_from_cartesian: zero radius");
  const double sp = st.position.z / r;
  const double phi = std::asin(std::clamp(sp, -1.0, 1.0));
  if (std::cos(phi) < 1e-9)
    throw std::invalid_argument("spherical_from_cartesian: polar singularity");
  const double theta = std::atan2(st.position.y, st.position.x);

  const Vec3 uvw = apply(uvw_rotation(theta, phi), st.velocity);
  SphericalState out;
  out.r = r;
  out.u = uvw.x;
  out.v = uvw.y;
  out.w = uvw.z;
  out.theta = theta;
  out.phi = phi;
  out.mass = mass;
  out.epoch = st.epoch;
  return out;
}

inline CartesianState cartesian_from_spherical(const SphericalState& ss) {
  if (ss.r <= 0.0) throw std::invalid_argument("cartesian_from_spherical: zero radius");
  if (std::cos(ss.phi) < 1e-9)
    throw std::invalid_argument("cartesian_from_spherical: polar singularity");
  const double cp = std::cos(ss.phi), sp = std::sin(ss.phi);
  const double ct = std::cos(ss.theta), st = std::sin(ss.theta);
  CartesianState out;
  out.position = {ss.r * cp * ct, ss.r * cp * st, ss.r * sp};
  out.velocity = apply_transpose(uvw_rotation(ss.theta, ss.phi), Vec3{ss.u, ss.v, ss.w});
  out.epoch = ss.epoch;
  return out;
}

}  // namespace deflect
