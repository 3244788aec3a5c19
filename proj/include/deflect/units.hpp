#pragma once

#include <cmath>

#include "deflect/constants.hpp"

namespace deflect {

// Canonical unit system: 1 LU = 1 au, 1 TU chosen so that the Sun's
// gravitational parameter is exactly 1 LU^3/TU^2 (equivalently, 1 TU is the
// Earth orbital period divided by 2*pi for a circular 1-au orbit).
struct CanonicalUnits {
  double length_unit = 0.0;      // meters per LU
  double time_unit = 0.0;        // seconds per TU
  double speed_unit = 0.0;       // m/s per SU (= LU/TU)
  double accel_unit = 0.0;       // m/s^2 per LU/TU^2
  double grav_param_sun = 1.0;   // LU^3/TU^2
  double grav_param_earth = 0.0;
  double grav_param_moon = 0.0;

  double to_lu(double meters) const { return meters / length_unit; }
  double to_meters(double lu) const { return lu * length_unit; }
  double to_tu(double seconds) const { return seconds / time_unit; }
  double to_seconds(double tu) const { return tu * time_unit; }
  double to_days(double tu) const { return tu * time_unit / constants::kSecondsPerDay; }
  double tu_from_days(double days) const { return days * constants::kSecondsPerDay / time_unit; }
  double to_su(double mps) const { return mps / speed_unit; }
  double to_mps(double su) const { return su * speed_unit; }
  double accel_to_canonical(double mps2) const { return mps2 / accel_unit; }
  double accel_to_si(double canonical) const { return canonical * accel_unit; }
};

inline CanonicalUnits make_canonical_units() {
  CanonicalUnits u;
  u.length_unit = constants::kAstronomicalUnitM;
  u.time_unit = std::sqrt(u.length_unit * u.length_unit * u.length_unit / constants::kGmSun);
  u.speed_unit = u.length_unit / u.time_unit;
  u.accel_unit = u.speed_unit / u.time_unit;
  u.grav_param_sun = 1.0;
  u.grav_param_earth = constants::kGmEarth / constants::kGmSun;
  u.grav_param_moon = constants::kGmMoon / constants::kGmSun;
  return u;
}

}  // namespace deflect
