#pragma once

#include <stdexcept>

// Lumped-parameter laser-ablation thrust model. The momentum coupling
// coefficient C_m converts incident power to thrust (F = P C_m); the specific
// ablation energy Q* = 2 eta / C_m^2 sets the mass-ejection rate M_dot = P/Q*.

namespace deflect {

struct LaserConfig {
  double power_max = 0.0;     // W
  double coupling_cm = 0.0;   // N s / J
  double ablation_eff = 1.0;  // dimensionless, (0, 1]
  double q_star = 0.0;        // J/kg, derived
};

inline LaserConfig make_laser_config(double power_max_w, double coupling_cm, double ablation_eff) {
  if (power_max_w <= 0.0) throw std::invalid_argument("laser: power_max must be positive");
  if (coupling_cm <= 0.0) throw std::invalid_argument("laser: coupling coefficient must be positive");
  if (ablation_eff <= 0.0 || ablation_eff > 1.0)
    throw std::invalid_argument("laser: ablation efficiency must be in (0, 1]");
  LaserConfig cfg;
  cfg.power_max = power_max_w;
  cfg.coupling_cm = coupling_cm;
  cfg.ablation_eff = ablation_eff;
  cfg.q_star = 2.0 * ablation_eff / (coupling_cm * coupling_cm);
  return cfg;
}

// a = P C_m / M  (m/s^2)
inline double accel_from_power(const LaserConfig& cfg, double power_w, double mass_kg) {
  if (power_w < 0.0 || power_w > cfg.power_max * (1.0 + 1e-12))
    throw std::invalid_argument("accel_from_power: power outside [0, power_max]");
  if (mass_kg <= 0.0) throw std::invalid_argument("accel_from_power: non-positive mass");
  return power_w * cfg.coupling_cm / mass_kg;
}

// M_dot = P / Q*  (kg/s)
inline double mass_loss_rate(const LaserConfig& cfg, double power_w) {
  if (power_w < 0.0) throw std::invalid_argument("mass_loss_rate: negative power");
  return power_w / cfg.q_star;
}

// Inverse of accel_from_power; rejects magnitudes beyond the laser's reach.
inline double power_from_accel(const LaserConfig& cfg, double accel_mps2, double mass_kg) {
  if (accel_mps2 < 0.0) throw std::invalid_argument("power_from_accel: negative acceleration");
  const double power = accel_mps2 * mass_kg / cfg.coupling_cm;
  if (power > cfg.power_max * (1.0 + 1e-9))
    throw std::domain_error("power_from_accel: control magnitude exceeds power_max");
  return power;
}

}  // namespace deflect
