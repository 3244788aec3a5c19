#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deflect/constants.hpp"
#include "deflect/vec3.hpp"

// Classical orbital elements, two-body conversions and Kepler propagation.
// Elliptic heliocentric orbits only; hyperbolic relative motion is handled by
// the flyby module with its own conic relations.

namespace deflect {

struct OrbitElements {
  double a = 1.0;        // semimajor axis (LU)
  double e = 0.0;        // eccentricity
  double i = 0.0;        // inclination (rad)
  double raan = 0.0;     // right ascension of ascending node (rad)
  double argp = 0.0;     // argument of periapsis (rad)
  double anomaly = 0.0;  // true anomaly (rad)
  double epoch = 0.0;    // TU
};

struct CartesianState {
  Vec3 position;  // LU
  Vec3 velocity;  // SU
  double epoch = 0.0;
};

inline double wrap_two_pi(double x) {
  x = std::fmod(x, constants::kTwoPi);
  if (x < 0.0) x += constants::kTwoPi;
  return x;
}

// Wrap to (-pi, pi].
inline double wrap_pi(double x) {
  x = wrap_two_pi(x);
  if (x > constants::kPi) x -= constants::kTwoPi;
  return x;
}

inline double eccentric_from_true(double f, double e) {
  return 2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(0.5 * f),
                          std::sqrt(1.0 + e) * std::cos(0.5 * f));
}

inline double true_from_eccentric(double E, double e) {
  return 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * E),
                          std::sqrt(1.0 - e) * std::cos(0.5 * E));
}

inline double mean_from_eccentric(double E, double e) { return E - e * std::sin(E); }

// Kepler's equation M = E - e sin E solved by Newton iteration seeded with
// E0 = M + e sin M; residual tolerance 1e-12, 50-iteration cap.
inline double eccentric_from_mean(double M, double e) {
  M = wrap_pi(M);
  double E = M + e * std::sin(M);
  for (int it = 0; it < 50; ++it) {
    const double g = E - e * std::sin(E) - M;
    if (std::abs(g) < 1e-12) return E;
    E -= g / (1.0 - e * std::cos(E));
  }
  if (std::abs(E - e * std::sin(E) - M) < 1e-12) return E;
  throw std::runtime_error("Kepler solver did not converge");
}

inline double mean_from_true(double f, double e) {
  return mean_from_eccentric(eccentric_from_true(f, e), e);
}

inline double true_from_mean(double M, double e) {
  return true_from_eccentric(eccentric_from_mean(M, e), e);
}

inline double orbit_period(const OrbitElements& el, double mu = 1.0) {
  return constants::kTwoPi * std::sqrt(el.a * el.a * el.a / mu);
}

inline CartesianState elements_to_cartesian(const OrbitElements& el, double mu) {
  if (el.e >= 1.0) throw std::invalid_argument("elements_to_cartesian: e >= 1 unsupported");
  if (el.e < 0.0) throw std::invalid_argument("elements_to_cartesian: negative eccentricity");
  if (el.a <= 0.0) throw std::invalid_argument("elements_to_cartesian: non-positive semimajor axis");
  if (mu <= 0.0) throw std::invalid_argument("elements_to_cartesian: non-positive mu");

  const double p = el.a * (1.0 - el.e * el.e);
  const double cf = std::cos(el.anomaly);
  const double sf = std::sin(el.anomaly);
  const double r = p / (1.0 + el.e * cf);
  const double vs = std::sqrt(mu / p);

  // perifocal frame
  const Vec3 r_pf{r * cf, r * sf, 0.0};
  const Vec3 v_pf{-vs * sf, vs * (el.e + cf), 0.0};

  const double cO = std::cos(el.raan), sO = std::sin(el.raan);
  const double ci = std::cos(el.i), si = std::sin(el.i);
  const double cw = std::cos(el.argp), sw = std::sin(el.argp);

  // rows of R3(-raan) R1(-i) R3(-argp)
  const Vec3 row1{cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci, sO * si};
  const Vec3 row2{sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci, -cO * si};
  const Vec3 row3{sw * si, cw * si, ci};

  CartesianState st;
  st.position = {dot(row1, r_pf), dot(row2, r_pf), dot(row3, r_pf)};
  st.velocity = {dot(row1, v_pf), dot(row2, v_pf), dot(row3, v_pf)};
  st.epoch = el.epoch;
  return st;
}

// Signed angle from u to v about axis n (all assumed in the plane normal to n).
inline double signed_angle(const Vec3& u, const Vec3& v, const Vec3& n) {
  return std::atan2(dot(cross(u, v), n), dot(u, v));
}

inline OrbitElements cartesian_to_elements(const CartesianState& st, double mu) {
  const Vec3& r = st.position;
  const Vec3& v = st.velocity;
  const double rn = r.norm();
  if (rn <= 0.0) throw std::invalid_argument("cartesian_to_elements: zero radius");

  const Vec3 h = cross(r, v);
  const double hn = h.norm();
  if (hn < 1e-12 * rn * v.norm() || hn == 0.0)
    throw std::invalid_argument("cartesian_to_elements: degenerate (rectilinear) state");
  const Vec3 h_hat = h / hn;

  const double energy = 0.5 * v.norm2() - mu / rn;
  if (energy >= 0.0)
    throw std::invalid_argument("cartesian_to_elements: non-elliptic state");

  OrbitElements el;
  el.a = -mu / (2.0 * energy);
  const Vec3 e_vec = cross(v, h) / mu - r / rn;
  el.e = e_vec.norm();
  el.i = std::acos(std::clamp(h.z / hn, -1.0, 1.0));
  el.epoch = st.epoch;

  constexpr double kPlanarTol = 1e-10;
  constexpr double kCircTol = 1e-12;

  Vec3 node{1.0, 0.0, 0.0};  // planar convention: node line along +x
  if (std::sin(el.i) > kPlanarTol) {
    node = normalized(Vec3{-h.y, h.x, 0.0});
    el.raan = wrap_two_pi(std::atan2(node.y, node.x));
  } else {
    el.raan = 0.0;
  }

  if (el.e > kCircTol) {
    el.argp = wrap_two_pi(signed_angle(node, e_vec, h_hat));
    el.anomaly = wrap_two_pi(signed_angle(e_vec, r, h_hat));
  } else {
    el.argp = 0.0;
    el.anomaly = wrap_two_pi(signed_angle(node, r, h_hat));
  }
  return el;
}

// Advances the anomaly by dt; all geometric elements are copied unchanged.
inline OrbitElements kepler_propagate(const OrbitElements& el, double dt, double mu) {
  if (el.e >= 1.0 || el.a <= 0.0)
    throw std::invalid_argument("kepler_propagate: elliptic orbit required");
  const double n = std::sqrt(mu / (el.a * el.a * el.a));
  const double M0 = mean_from_true(el.anomaly, el.e);
  OrbitElements out = el;
  out.anomaly = wrap_two_pi(true_from_mean(M0 + n * dt, el.e));
  out.epoch = el.epoch + dt;
  return out;
}

inline CartesianState state_at(const OrbitElements& el, double epoch, double mu) {
  return elements_to_cartesian(kepler_propagate(el, epoch - el.epoch, mu), mu);
}

inline double specific_energy(const CartesianState& st, double mu) {
  return 0.5 * st.velocity.norm2() - mu / st.position.norm();
}

}  // namespace deflect
