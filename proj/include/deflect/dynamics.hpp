#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "deflect/control.hpp"
#include "deflect/integrator.hpp"
#include "deflect/laser.hpp"
#include "deflect/spherical.hpp"
#include "deflect/units.hpp"

// Thrust-perturbed heliocentric equations of motion in spherical state
// variables, plus the adaptive propagator with SOI-crossing event detection.

namespace deflect {

// Circular heliocentric Earth orbit: radius 1 LU, mean motion 1 rad/TU by
// default (canonical units make both exact).
struct EarthModel {
  double radius = 1.0;       // LU
  double lon0 = 0.0;         // longitude at epoch 0 (rad)
  double mean_motion = 1.0;  // rad/TU

  Vec3 position(double t) const {
    const double l = lon0 + mean_motion * t;
    return {radius * std::cos(l), radius * std::sin(l), 0.0};
  }
  Vec3 velocity(double t) const {
    const double l = lon0 + mean_motion * t;
    const double s = radius * mean_motion;
    return {-s * std::sin(l), s * std::cos(l), 0.0};
  }
  CartesianState state(double t) const { return {position(t), velocity(t), t}; }
};

struct SphericalDerivative {
  double r_dot, u_dot, v_dot, w_dot, theta_dot, phi_dot;
};

// Governing equations in the heliocentric spherical frame:
//   u_dot = v^2/r + w^2/r - mu/r^2 + a_l sin(sigma) cos(beta)
//   v_dot = -u v/r + v w tan(phi)/r + a_l cos(sigma) cos(beta)
//   w_dot = -u w/r + v^2 tan(phi)/r + a_l sin(beta)
//   theta_dot = v/(r cos(phi)),  phi_dot = w/r
inline SphericalDerivative eom_rhs(const SphericalState& st, const ControlSample& ctrl,
                                   double mu) {
  if (st.r <= 0.0) throw std::invalid_argument("eom_rhs: non-positive radius");
  const double cp = std::cos(st.phi);
  if (cp < 1e-9) throw std::invalid_argument("eom_rhs: polar singularity");
  const double sp = std::sin(st.phi);
  const double inv_r = 1.0 / st.r;
  const double al = ctrl.accel_mag;
  const double cb = std::cos(ctrl.beta);

  SphericalDerivative d;
  d.r_dot = st.u;
  d.u_dot = (st.v * st.v + st.w * st.w) * inv_r - mu * inv_r * inv_r +
            al * std::sin(ctrl.sigma) * cb;
  d.v_dot = -st.u * st.v * inv_r + st.v * st.w * sp / (st.r * cp) +
            al * std::cos(ctrl.sigma) * cb;
  d.w_dot = -st.u * st.w * inv_r + st.v * st.v * sp / (st.r * cp) + al * std::sin(ctrl.beta);
  d.theta_dot = st.v / (st.r * cp);
  d.phi_dot = st.w * inv_r;
  return d;
}

struct PropagateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  bool stop_at_soi = false;
  double soi_radius = 0.0;               // LU; needed for the event and the thrust cutoff
  bool thrust_cutoff_inside_soi = true;  // no ablation inside the SOI
  bool mass_loss = false;
  const LaserConfig* laser = nullptr;    // required if mass_loss
  const CanonicalUnits* units = nullptr; // required if mass_loss
  bool record = false;
  double record_dt = 0.0;                // >0: uniform sampling; else step points
  double event_value_tol = 1e-10;        // LU on |ell - ell_soi|
};

struct SoiEvent {
  double t = 0.0;
  SphericalState state;
  double ell_dot = 0.0;  // SU, negative for inbound crossings
};

struct PropagationResult {
  std::vector<std::pair<double, SphericalState>> trajectory;
  std::optional<SoiEvent> soi_event;
  SphericalState final_state;
  IntegrateStatus status = IntegrateStatus::ReachedEnd;
  bool no_crossing = false;  // stop_at_soi demanded but span ended first
  std::size_t n_accepted = 0, n_rejected = 0;
};

namespace detail {

// state layout: [r, u, v, w, theta, phi, mass]
using HelioState = StateVec<7>;

inline HelioState pack(const SphericalState& s) {
  return {s.r, s.u, s.v, s.w, s.theta, s.phi, s.mass};
}

inline SphericalState unpack(const HelioState& y, double epoch) {
  SphericalState s;
  s.r = y[0];
  s.u = y[1];
  s.v = y[2];
  s.w = y[3];
  s.theta = y[4];
  s.phi = y[5];
  s.mass = y[6];
  s.epoch = epoch;
  return s;
}

inline double ell_from_state(const HelioState& y, double t, const EarthModel& earth) {
  const double cp = std::cos(y[5]);
  const Vec3 r_ast{y[0] * cp * std::cos(y[4]), y[0] * cp * std::sin(y[4]),
                   y[0] * std::sin(y[5])};
  return (r_ast - earth.position(t)).norm();
}

}  // namespace detail

// Propagates the thrust-perturbed state from t0 to t1. With stop_at_soi the
// integration terminates at the first inbound crossing of ell = soi_radius
// (ell_dot < 0); an outbound crossing never terminates.
inline PropagationResult propagate(const SphericalState& initial, const ControlHistory& ctrl,
                                   double t0, double t1, const PropagateOptions& opt,
                                   const EarthModel& earth, double mu = 1.0) {
  if (opt.stop_at_soi && opt.soi_radius <= 0.0)
    throw std::invalid_argument("propagate: stop_at_soi requires soi_radius");
  if (opt.mass_loss && (opt.laser == nullptr || opt.units == nullptr))
    throw std::invalid_argument("propagate: mass_loss requires laser config and units");

  const double soi = opt.soi_radius;
  const bool cutoff = opt.thrust_cutoff_inside_soi && soi > 0.0;

  auto rhs = [&](double t, const detail::HelioState& y, detail::HelioState& dydt) {
    const double r = y[0];
    const double cp = std::cos(y[5]);
    const double sp = std::sin(y[5]);
    const double inv_r = 1.0 / r;

    ControlSample cs = ctrl.at(t);
    if (cs.accel_mag > 0.0 && cutoff &&
        detail::ell_from_state(y, t, earth) < soi) {
      cs.accel_mag = 0.0;  // no ablation inside the SOI
    }
    const double al = cs.accel_mag;
    const double cb = std::cos(cs.beta);

    dydt[0] = y[1];
    dydt[1] = (y[2] * y[2] + y[3] * y[3]) * inv_r - mu * inv_r * inv_r +
              al * std::sin(cs.sigma) * cb;
    dydt[2] = -y[1] * y[2] * inv_r + y[2] * y[3] * sp / (r * cp) +
              al * std::cos(cs.sigma) * cb;
    dydt[3] = -y[1] * y[3] * inv_r + y[2] * y[2] * sp / (r * cp) + al * std::sin(cs.beta);
    dydt[4] = y[2] / (r * cp);
    dydt[5] = y[3] * inv_r;

    if (opt.mass_loss && al > 0.0) {
      const double a_si = opt.units->accel_to_si(al);
      const double power_w = a_si * y[6] / opt.laser->coupling_cm;
      dydt[6] = -(power_w / opt.laser->q_star) * opt.units->time_unit;  // kg/TU
    } else {
      dydt[6] = 0.0;
    }
  };

  IntegrateOptions iopt;
  iopt.rel_tol = opt.rel_tol;
  iopt.abs_tol = opt.abs_tol;

  EventOptions eopt;
  eopt.direction = -1;  // inbound only
  eopt.value_tol = opt.event_value_tol;

  PropagationResult res;
  auto record_observer = [&](const DenseSegment<7>& seg, double t_new,
                             const detail::HelioState& y_new) {
    if (!opt.record) return;
    if (opt.record_dt > 0.0) {
      const double dir = seg.h > 0.0 ? 1.0 : -1.0;
      double t_next = res.trajectory.empty()
                          ? seg.t0
                          : res.trajectory.back().first + dir * opt.record_dt;
      while ((t_new - t_next) * dir >= -1e-15) {
        res.trajectory.emplace_back(t_next, detail::unpack(seg.eval(t_next), t_next));
        t_next += dir * opt.record_dt;
      }
    } else {
      res.trajectory.emplace_back(t_new, detail::unpack(y_new, t_new));
    }
  };

  const detail::HelioState y0 = detail::pack(initial);
  if (opt.record) res.trajectory.emplace_back(t0, initial);

  IntegrationReport<7> rep;
  if (opt.stop_at_soi) {
    auto event = [&](double t, const detail::HelioState& y) {
      return detail::ell_from_state(y, t, earth) - soi;
    };
    rep = integrate_dopri5<7>(rhs, y0, t0, t1, iopt, event, eopt, record_observer);
  } else {
    rep = integrate_dopri5<7>(rhs, y0, t0, t1, iopt, nullptr, eopt, record_observer);
  }

  res.status = rep.status;
  res.n_accepted = rep.n_accepted;
  res.n_rejected = rep.n_rejected;
  res.final_state = detail::unpack(rep.y_final, rep.t_final);

  if (rep.event_found) {
    SoiEvent ev;
    ev.t = rep.t_event;
    ev.state = detail::unpack(rep.y_event, rep.t_event);
    const CartesianState ast = cartesian_from_spherical(ev.state);
    const CartesianState ear = earth.state(rep.t_event);
    const Vec3 dr = ast.position - ear.position;
    const Vec3 dv = ast.velocity - ear.velocity;
    ev.ell_dot = dot(dr, dv) / dr.norm();
    res.soi_event = ev;
  } else if (opt.stop_at_soi && rep.status == IntegrateStatus::ReachedEnd) {
    res.no_crossing = true;
  }
  return res;
}

}  // namespace deflect
