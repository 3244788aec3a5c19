#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deflect/dynamics.hpp"
#include "deflect/elements.hpp"
#include "deflect/vec3.hpp"

// Patched-conic quantities at SOI entry and the hyperbolic flyby map. Outside
// the SOI the motion is Sun-centered; inside, an Earth-centered hyperbola with
// Earth at the focus. The approach distance b is the perpendicular offset of
// the incoming relative-velocity line from Earth's center; the impact
// parameter b_i is the b that produces exactly the requested perigee after
// gravitational focusing.

namespace deflect {

struct RelativeGeometry {
  double ell = 0.0;      // LU
  double ell_dot = 0.0;  // SU
};

// ell = sqrt(re.re + ra.ra - 2 re.ra) and its time derivative.
inline RelativeGeometry relative_distance(const CartesianState& earth,
                                          const CartesianState& ast) {
  const Vec3& re = earth.position;
  const Vec3& ra = ast.position;
  const double ell2 = dot(re, re) + dot(ra, ra) - 2.0 * dot(re, ra);
  if (ell2 <= 0.0) throw std::invalid_argument("relative_distance: coincident positions");
  RelativeGeometry g;
  g.ell = std::sqrt(ell2);
  g.ell_dot = (dot(re, earth.velocity) + dot(ra, ast.velocity) -
               (dot(re, ast.velocity) + dot(ra, earth.velocity))) /
              g.ell;
  return g;
}

// Elevation angle of the inbound relative velocity above the local horizon at
// the SOI boundary: cos(phi_e + pi/2) = (v_inf . ell_vec) / (|v_inf| |ell_vec|).
inline double elevation_angle(const Vec3& ell_vec, const Vec3& v_inf) {
  const double vn = v_inf.norm();
  const double ln = ell_vec.norm();
  if (vn <= 0.0) throw std::invalid_argument("elevation_angle: zero relative velocity");
  const double c = std::clamp(dot(v_inf, ell_vec) / (vn * ln), -1.0, 1.0);
  return std::acos(c) - 0.5 * constants::kPi;
}

// Vector-rejection form: b = |(-ell_vec) - ((-ell_vec) . v_hat) v_hat|.
inline double approach_distance(const Vec3& ell_vec, const Vec3& v_inf) {
  const double vn = v_inf.norm();
  if (vn <= 0.0) throw std::invalid_argument("approach_distance: zero relative velocity");
  const Vec3 vhat = v_inf / vn;
  const Vec3 m = -ell_vec;
  const Vec3 rej = m - dot(m, vhat) * vhat;
  return rej.norm();
}

// b_i = ell_m sqrt(1 + 2 mu / (v_inf^2 ell_m)).
inline double impact_parameter(double miss_distance, double v_inf, double mu_earth) {
  if (miss_distance <= 0.0) throw std::invalid_argument("impact_parameter: miss must be positive");
  if (v_inf <= 0.0) throw std::invalid_argument("impact_parameter: v_inf must be positive");
  return miss_distance * std::sqrt(1.0 + 2.0 * mu_earth / (v_inf * v_inf * miss_distance));
}

// Hyperbolic perigee for asymptotic impact parameter b and excess speed v_inf;
// exact inverse of impact_parameter.
inline double perigee_from_b(double b, double v_inf, double mu_earth) {
  if (v_inf <= 0.0) throw std::invalid_argument("perigee_from_b: v_inf must be positive");
  if (b < 0.0) throw std::invalid_argument("perigee_from_b: negative b");
  const double k = v_inf * v_inf / mu_earth;
  return (std::sqrt(1.0 + b * b * k * k) - 1.0) / k;
}

struct FlybyGeometry {
  double ell = 0.0;         // LU, relative distance
  double ell_dot = 0.0;     // SU
  Vec3 v_inf_in;            // SU, relative velocity at the SOI boundary
  double elevation = 0.0;   // rad
  double b = 0.0;           // LU, approach distance
  double b_required = 0.0;  // LU, impact parameter for the requested miss
  double soi_radius = 0.0;  // LU
};

inline FlybyGeometry flyby_geometry_at_soi(const CartesianState& earth,
                                           const CartesianState& ast, double miss_distance,
                                           double soi_radius, double mu_earth) {
  FlybyGeometry g;
  const RelativeGeometry rel = relative_distance(earth, ast);
  g.ell = rel.ell;
  g.ell_dot = rel.ell_dot;
  g.v_inf_in = ast.velocity - earth.velocity;
  const Vec3 ell_vec = ast.position - earth.position;
  g.elevation = elevation_angle(ell_vec, g.v_inf_in);
  g.b = approach_distance(ell_vec, g.v_inf_in);
  g.b_required = impact_parameter(miss_distance, g.v_inf_in.norm(), mu_earth);
  g.soi_radius = soi_radius;
  return g;
}

struct FlybyOutcome {
  double perigee_distance = 0.0;  // LU
  Vec3 v_inf_out;                 // SU, relative velocity at SOI exit
  double turn_angle = 0.0;        // rad, between the asymptotes
  double e_hyp = 0.0;
  CartesianState post_state;      // heliocentric at SOI exit
  double exit_epoch = 0.0;        // TU
  double transit_time = 0.0;      // TU inside the SOI
  bool degenerate_impact = false; // b ~ 0: radial plunge, no encounter plane
};

// Maps an Earth-relative entry state on the SOI sphere to the exit state.
// The hyperbola is evaluated exactly from the conic invariants; the exit epoch
// adds the hyperbolic time of flight between the entry and exit anomalies.
inline FlybyOutcome flyby_map(const Vec3& rel_pos, const Vec3& rel_vel, double mu_earth,
                              const EarthModel& earth, double entry_epoch) {
  FlybyOutcome out;
  const double r = rel_pos.norm();
  const double v2 = rel_vel.norm2();
  const double energy = 0.5 * v2 - mu_earth / r;
  if (energy <= 0.0)
    throw std::invalid_argument("flyby_map: entry is not hyperbolic in the Earth frame");

  const Vec3 h = cross(rel_pos, rel_vel);
  const double hn = h.norm();

  if (hn < 1e-12 * r * std::sqrt(v2)) {
    // radial plunge through the focus; the encounter plane is undefined
    out.degenerate_impact = true;
    out.perigee_distance = 0.0;
    out.v_inf_out = rel_vel;
    out.e_hyp = 1.0 + 0.0;
    out.exit_epoch = entry_epoch;
    return out;
  }

  const Vec3 e_vec = cross(rel_vel, h) / mu_earth - rel_pos / r;
  const double e = e_vec.norm();
  const double a = -mu_earth / (2.0 * energy);  // < 0
  const double p = hn * hn / mu_earth;
  out.e_hyp = e;
  out.perigee_distance = a * (1.0 - e);
  out.turn_angle = 2.0 * std::asin(std::clamp(1.0 / e, 0.0, 1.0));

  // entry true anomaly (negative: inbound leg)
  const double cth = std::clamp((p / r - 1.0) / e, -1.0, 1.0);
  double th_in = std::acos(cth);
  if (dot(rel_pos, rel_vel) < 0.0) th_in = -th_in;
  const double th_out = -th_in;  // same radius, outbound leg

  // hyperbolic Kepler equation for the transit time
  auto hyp_anomaly = [&](double th) {
    const double th2 = std::tan(0.5 * th);
    const double H = 2.0 * std::atanh(std::clamp(std::sqrt((e - 1.0) / (e + 1.0)) * th2,
                                                 -1.0 + 1e-16, 1.0 - 1e-16));
    return e * std::sinh(H) - H;
  };
  const double n = std::sqrt(mu_earth / (-a * -a * -a));
  out.transit_time = (hyp_anomaly(th_out) - hyp_anomaly(th_in)) / n;
  out.exit_epoch = entry_epoch + out.transit_time;

  // perifocal basis of the hyperbola
  const Vec3 p_hat = e_vec / e;
  const Vec3 h_hat = h / hn;
  const Vec3 q_hat = cross(h_hat, p_hat);

  const double co = std::cos(th_out), so = std::sin(th_out);
  const double r_out = p / (1.0 + e * co);
  const Vec3 pos_out = r_out * (co * p_hat + so * q_hat);
  const double vc = std::sqrt(mu_earth / p);
  const Vec3 vel_out = vc * (-so * p_hat + (e + co) * q_hat);
  out.v_inf_out = vel_out;

  const CartesianState earth_exit = earth.state(out.exit_epoch);
  out.post_state.position = earth_exit.position + pos_out;
  out.post_state.velocity = earth_exit.velocity + vel_out;
  out.post_state.epoch = out.exit_epoch;
  return out;
}

}  // namespace deflect
