#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "deflect/constants.hpp"
#include "deflect/dynamics.hpp"
#include "deflect/elements.hpp"
#include "deflect/laser.hpp"
#include "deflect/spherical.hpp"
#include "deflect/units.hpp"

// Collision scenarios: Earth and ECO phased so that, unperturbed, the ECO
// reaches Earth's center at epoch 0. Start times are then "time left to
// impact". The crossing branch selects which of the two orbit intersections
// hosts the impact: Inbound has the ECO descending toward perihelion there
// (the branch whose perihelion passes precede impact by ~0.89 and ~1.89
// periods for the reference orbit), Outbound the mirror case.

namespace deflect {

enum class CrossingBranch { Inbound, Outbound };

struct MoonSpec {
  double a_km = constants::kMoonSmaKm;
  double e = constants::kMoonEcc;
};

struct LunarSpec {
  double nominal_miss_re = 10.0;
  bool prograde = true;  // sign of the Earth-frame angular momentum of the pass
};

struct ScenarioConfig {
  double a_au = 1.2;
  double e = 0.6;
  double i_deg = 0.0;
  double diameter_m = 100.0;
  double density_kg_m3 = 3000.0;
  double mass_kg = 0.0;        // used only when mass_specified
  bool mass_specified = false;
  double power_mw = 10.0;
  double cm_ns_per_j = 5e-5;
  double eta_ab = 1.0;
  double miss_re = 2.0;
  double soi_m = constants::kSoiRadiusM;
  double earth_radius_au = 1.0;
  bool mass_loss = false;
  CrossingBranch crossing = CrossingBranch::Inbound;
  MoonSpec moon{};
  LunarSpec lunar{};
};

struct Scenario {
  ScenarioConfig config;
  CanonicalUnits units;
  OrbitElements eco_elements;  // anomaly = crossing anomaly at epoch 0 (impact)
  EarthModel earth;
  LaserConfig laser;
  double eco_mass_kg = 0.0;
  double sphere_mass_kg = 0.0;  // mass implied by density and diameter
  double miss_distance_lu = 0.0;
  double soi_radius_lu = 0.0;
  double impact_epoch = 0.0;

  double eco_period_tu() const { return orbit_period(eco_elements, units.grav_param_sun); }

  // Fraction of a period by which the most recent perihelion pass precedes
  // impact; perihelion passes sit at start times (lead + k) Tp.
  double perihelion_lead_tp() const {
    const double m_imp = mean_from_true(eco_elements.anomaly, eco_elements.e);
    return wrap_two_pi(m_imp) / constants::kTwoPi;
  }

  double a_max_si() const {
    return accel_from_power(laser, laser.power_max, eco_mass_kg);
  }
  double a_max_canonical() const { return units.accel_to_canonical(a_max_si()); }

  CartesianState eco_state_at(double epoch) const {
    return state_at(eco_elements, epoch, units.grav_param_sun);
  }

  SphericalState initial_state(double lead_time_tp) const {
    if (lead_time_tp <= 0.0)
      throw std::invalid_argument("initial_state: lead time must be positive");
    const double t0 = impact_epoch - lead_time_tp * eco_period_tu();
    return spherical_from_cartesian(eco_state_at(t0), eco_mass_kg);
  }
};

inline double eco_period(const OrbitElements& el) { return orbit_period(el, 1.0); }

// Epoch of the inbound SOI crossing of the unperturbed collision orbit; the
// construction places it a fraction of a TU before the nominal impact.
inline double reference_soi_crossing_epoch(const Scenario& s) {
  auto g = [&](double t) {
    const CartesianState a = s.eco_state_at(t);
    const CartesianState e = s.earth.state(t);
    return (a.position - e.position).norm() - s.soi_radius_lu;
  };
  double ta = -0.5, tb = 0.0;
  double ga = g(ta);
  if (!(ga > 0.0 && g(tb) < 0.0)) {
    ta = -2.0;
    ga = g(ta);
    if (!(ga > 0.0 && g(tb) < 0.0))
      throw std::runtime_error("scenario: no reference SOI crossing found");
  }
  for (int it = 0; it < 200; ++it) {
    const double tm = 0.5 * (ta + tb);
    const double gm = g(tm);
    if (std::abs(gm) < 1e-13 || tb - ta < 1e-14) return tm;
    if (gm > 0.0) ta = tm;
    else tb = tm;
  }
  return 0.5 * (ta + tb);
}

inline Scenario build_collision_scenario(const ScenarioConfig& cfg) {
  Scenario s;
  s.config = cfg;
  s.units = make_canonical_units();

  const double a = cfg.a_au;
  const double e = cfg.e;
  const double r_e = cfg.earth_radius_au;
  if (e < 0.0 || e >= 1.0) throw std::invalid_argument("scenario: eccentricity must be in [0, 1)");
  if (a <= 0.0) throw std::invalid_argument("scenario: semimajor axis must be positive");
  if (!(a * (1.0 - e) < r_e && r_e < a * (1.0 + e)))
    throw std::invalid_argument("scenario: ECO orbit does not cross Earth's orbit radius");

  s.earth.radius = r_e;
  s.earth.lon0 = 0.0;
  s.earth.mean_motion = std::sqrt(s.units.grav_param_sun / (r_e * r_e * r_e));

  // crossing true anomaly where r = r_earth
  const double p = a * (1.0 - e * e);
  const double cf = (p / r_e - 1.0) / e;
  if (cf < -1.0 || cf > 1.0)
    throw std::invalid_argument("scenario: no intersection-time solution");
  const double f_star = (cfg.crossing == CrossingBranch::Inbound) ? -std::acos(cf)
                                                                  : std::acos(cf);

  s.eco_elements.a = a;
  s.eco_elements.e = e;
  s.eco_elements.i = cfg.i_deg * constants::kDegToRad;
  s.eco_elements.raan = 0.0;
  // impact point sits at Earth's epoch-0 longitude
  s.eco_elements.argp = wrap_two_pi(s.earth.lon0 - s.eco_elements.raan - f_star);
  s.eco_elements.anomaly = wrap_two_pi(f_star);
  s.eco_elements.epoch = 0.0;

  s.laser = make_laser_config(cfg.power_mw * 1e6, cfg.cm_ns_per_j, cfg.eta_ab);

  const double radius_m = 0.5 * cfg.diameter_m;
  s.sphere_mass_kg = cfg.density_kg_m3 * (4.0 / 3.0) * constants::kPi * radius_m * radius_m *
                     radius_m;
  s.eco_mass_kg = cfg.mass_specified ? cfg.mass_kg : s.sphere_mass_kg;
  if (s.eco_mass_kg <= 0.0) throw std::invalid_argument("scenario: non-positive mass");

  s.miss_distance_lu = cfg.miss_re * constants::kEarthRadiusM / s.units.length_unit;
  s.soi_radius_lu = cfg.soi_m / s.units.length_unit;
  s.impact_epoch = 0.0;
  return s;
}

}  // namespace deflect
