#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "deflect/control.hpp"
#include "deflect/dynamics.hpp"
#include "deflect/flyby.hpp"
#include "deflect/nlp.hpp"
#include "deflect/scenario.hpp"

// Direct-shooting transcription of the minimum-energy deflection problem.
// Decision variables: t_soi, t_op and the control nodes on a normalized
// window [0,1] scaled by t_op. The burn arc is integrated numerically; the
// thrust-free coast from burn end to t_soi is advanced analytically, which
// the propagation oracle tests show is the same dynamics to integrator
// accuracy. Terminal conditions: ell = ell_soi, b = b_i, ell_dot < 0,
// t_op > 0, t_soi - t_op > 0.

namespace deflect {

enum class Regime { ConstantPower, VariablePower, BoundedProfile };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::ConstantPower: return "constant";
    case Regime::VariablePower: return "variable";
    case Regime::BoundedProfile: return "bounded";
  }
  return "?";
}

// Per-node lower bound on the control magnitude, as a fraction of a_max over
// the normalized window.
struct BoundedProfile {
  enum class Kind { ConstantFraction, LinearRamp };
  Kind kind = Kind::ConstantFraction;
  double frac_start = 0.0;
  double frac_end = 0.0;

  double floor_at(double s) const {
    const double f = (kind == Kind::ConstantFraction)
                         ? frac_start
                         : frac_start + (frac_end - frac_start) * s;
    return std::clamp(f, 0.0, 1.0);
  }

  static BoundedProfile constant(double c) {
    if (c < 0.0 || c > 1.0) throw std::invalid_argument("profile: fraction must be in [0, 1]");
    return {Kind::ConstantFraction, c, c};
  }
  static BoundedProfile ramp(double f0, double f1) {
    if (f0 < 0.0 || f0 > 1.0 || f1 < 0.0 || f1 > 1.0)
      throw std::invalid_argument("profile: fractions must be in [0, 1]");
    return {Kind::LinearRamp, f0, f1};
  }

  // "const:0.3", "ramp:0:0.9", "ramp:0.9:0"
  static BoundedProfile parse(const std::string& s) {
    const auto fail = [&] {
      throw std::invalid_argument("profile: expected const:<c> or ramp:<f0>:<f1>, got '" + s +
                                  "'");
    };
    const auto p1 = s.find(':');
    if (p1 == std::string::npos) fail();
    const std::string kind = s.substr(0, p1);
    try {
      if (kind == "const") return constant(std::stod(s.substr(p1 + 1)));
      if (kind == "ramp") {
        const auto p2 = s.find(':', p1 + 1);
        if (p2 == std::string::npos) fail();
        return ramp(std::stod(s.substr(p1 + 1, p2 - p1 - 1)), std::stod(s.substr(p2 + 1)));
      }
    } catch (const std::invalid_argument&) {
      fail();
    }
    fail();
    return {};
  }

  std::string str() const {
    char buf[64];
    if (kind == Kind::ConstantFraction)
      std::snprintf(buf, sizeof buf, "const:%g", frac_start);
    else
      std::snprintf(buf, sizeof buf, "ramp:%g:%g", frac_start, frac_end);
    return buf;
  }
};

struct TranscriptionSpec {
  int n_intervals = 60;
  Regime regime = Regime::ConstantPower;
  BoundedProfile profile{};
  int multistarts = 8;
  unsigned seed = 0;
  double shoot_rel_tol = 1e-11;
  double shoot_abs_tol = 1e-13;
  double resim_rel_tol = 1e-12;
  double resim_abs_tol = 1e-14;
  double residual_tol_lu = 1e-8;  // equality tolerance on ell and b residuals
  int max_outer = 12;
  int max_inner = 160;
};

struct SolutionReport {
  double ti_tp = 0.0;
  Regime regime = Regime::ConstantPower;
  std::string profile;
  int n_intervals = 0;

  double t_soi_tu = 0.0;    // elapsed from window start to SOI entry
  double window_days = 0.0; // decision t_op (full window)
  double t_op_days = 0.0;   // active burn span (above the idle threshold)
  double idle_days = 0.0;   // leading sub-threshold span
  double energy_kw_day = 0.0;
  double dv_mps = 0.0;
  double objective_value = 0.0;  // solver-scaled objective
  double mass_end_kg = 0.0;

  ControlHistory control;   // epoch-based (TU)
  double b_lu = 0.0, b_required_lu = 0.0;
  double residual_ell_lu = 0.0;  // ell_soi - ell
  double residual_b_lu = 0.0;    // b - b_i
  double ell_dot_su = 0.0;
  double resim_residual_b_lu = 0.0;
  double resim_ell_dot_su = 0.0;
  bool resim_ok = false;

  bool feasible = false;
  bool converged = false;
  std::string status;
  long n_evals = 0;
  int multistart_index = -1;
  VecX decision;  // raw vector, reusable as a warm start
};

struct ShootOutput {
  bool ok = false;
  double t_soi = 0.0, t_op = 0.0;
  double ell_lu = 0.0, ell_dot = 0.0;
  double b_lu = 0.0, b_required_lu = 0.0;
  double j_canonical = 0.0;  // trapezoidal dv integral (SU)
  CartesianState eco_at_soi;
  SphericalState burn_end;
  std::string error;
};

class DeflectionProblem {
 public:
  DeflectionProblem(const Scenario& scn, double ti_tp, const TranscriptionSpec& spec)
      : scn_(scn), spec_(spec), ti_tp_(ti_tp) {
    if (ti_tp <= 0.0) throw std::invalid_argument("transcription: start time must be positive");
    if (spec.n_intervals < 2) throw std::invalid_argument("transcription: need N >= 2");
    n_ = spec.n_intervals;
    tp_tu_ = scn.eco_period_tu();
    ti_tu_ = ti_tp * tp_tu_;
    init_state_ = scn.initial_state(ti_tp);
    a_max_ = scn.a_max_canonical();

    // zero-thrust SOI crossing (the collision construction guarantees one
    // shortly before the nominal impact epoch)
    t_cross0_ = find_reference_crossing();
    t_soi0_ = ti_tu_ + t_cross0_;

    const CartesianState eco0 = scn.eco_state_at(t_cross0_);
    const CartesianState ear0 = scn.earth.state(t_cross0_);
    v_inf0_ = (eco0.velocity - ear0.velocity).norm();
    b_i0_ = impact_parameter(scn.miss_distance_lu, v_inf0_, scn.units.grav_param_earth);

    t_ref_ = 0.1 * tp_tu_;
  }

  const Scenario& scenario() const { return scn_; }
  const TranscriptionSpec& spec() const { return spec_; }
  int n_nodes() const { return n_ + 1; }
  double ti_tu() const { return ti_tu_; }
  double tp_tu() const { return tp_tu_; }
  double t_soi0() const { return t_soi0_; }
  double a_max() const { return a_max_; }
  double b_i0() const { return b_i0_; }
  double t_op_estimate() const { return b_i0_ / (2.7 * t_soi0_) / a_max_; }
  const SphericalState& initial_state() const { return init_state_; }

  bool has_accel_nodes() const { return spec_.regime != Regime::ConstantPower; }
  std::size_t dim() const {
    return 2 + static_cast<std::size_t>(n_ + 1) * (has_accel_nodes() ? 2 : 1);
  }

  double node_floor(int k) const {
    if (spec_.regime == Regime::BoundedProfile)
      return spec_.profile.floor_at(static_cast<double>(k) / n_);
    return 0.0;
  }

  VecX lower() const {
    VecX lo(dim());
    lo[0] = t_soi0_ - 0.35;
    lo[1] = 1e-3;
    for (int k = 0; k <= n_; ++k) lo[2 + k] = -12.0;
    if (has_accel_nodes())
      for (int k = 0; k <= n_; ++k) lo[3 + n_ + k] = node_floor(k);
    return lo;
  }

  VecX upper() const {
    VecX hi(dim());
    hi[0] = t_soi0_ + 0.35;
    hi[1] = ti_tu_;
    for (int k = 0; k <= n_; ++k) hi[2 + k] = 12.0;
    if (has_accel_nodes())
      for (int k = 0; k <= n_; ++k) hi[3 + n_ + k] = 1.0;
    return hi;
  }

  VecX fd_steps() const {
    VecX h(dim());
    h[0] = 2e-6;   // t_soi (TU)
    h[1] = 1e-5;   // t_op (TU)
    for (int k = 0; k <= n_; ++k) h[2 + k] = 5e-3;  // sigma (rad)
    if (has_accel_nodes())
      for (int k = 0; k <= n_; ++k) h[3 + n_ + k] = 5e-3;  // accel fraction
    return h;
  }

  // Thrust direction opposing the asteroid's velocity on the undeflected
  // reference orbit at a given epoch.
  double anti_velocity_sigma(double epoch) const {
    const SphericalState s =
        spherical_from_cartesian(scn_.eco_state_at(epoch), scn_.eco_mass_kg);
    return std::atan2(-s.u, -s.v);
  }

  ControlHistory build_control(const VecX& x) const {
    const double t_op = x[1];
    std::vector<ControlSample> nodes(static_cast<std::size_t>(n_ + 1));
    for (int k = 0; k <= n_; ++k) {
      const double s = static_cast<double>(k) / n_;
      ControlSample& cs = nodes[static_cast<std::size_t>(k)];
      cs.node_time = -ti_tu_ + s * t_op;
      cs.sigma = x[2 + static_cast<std::size_t>(k)];
      cs.beta = 0.0;
      cs.accel_mag = has_accel_nodes()
                         ? a_max_ * x[3 + static_cast<std::size_t>(n_ + k)]
                         : a_max_;
    }
    return ControlHistory(std::move(nodes));
  }

  ShootOutput shoot(const VecX& x) const {
    ShootOutput out;
    out.t_soi = x[0];
    out.t_op = x[1];
    try {
      const ControlHistory ctrl = build_control(x);
      out.j_canonical = control_dv_integral(ctrl);

      PropagateOptions popt;
      popt.rel_tol = spec_.shoot_rel_tol;
      popt.abs_tol = spec_.shoot_abs_tol;
      popt.soi_radius = scn_.soi_radius_lu;
      popt.thrust_cutoff_inside_soi = true;
      popt.mass_loss = scn_.config.mass_loss;
      popt.laser = &scn_.laser;
      popt.units = &scn_.units;

      const double t0 = -ti_tu_;
      const double t_burn_end = t0 + out.t_op;
      const PropagationResult burn =
          propagate(init_state_, ctrl, t0, t_burn_end, popt, scn_.earth, 1.0);
      if (burn.status != IntegrateStatus::ReachedEnd) {
        out.error = "burn integration failed";
        return out;
      }
      out.burn_end = burn.final_state;

      // analytic coast to the decided SOI-entry epoch
      const CartesianState burn_cart = cartesian_from_spherical(burn.final_state);
      const OrbitElements el = cartesian_to_elements(burn_cart, 1.0);
      const double t_soi_epoch = t0 + out.t_soi;
      out.eco_at_soi = state_at(el, t_soi_epoch, 1.0);

      const CartesianState earth_soi = scn_.earth.state(t_soi_epoch);
      const RelativeGeometry rel = relative_distance(earth_soi, out.eco_at_soi);
      out.ell_lu = rel.ell;
      out.ell_dot = rel.ell_dot;
      const Vec3 ell_vec = out.eco_at_soi.position - earth_soi.position;
      const Vec3 v_inf = out.eco_at_soi.velocity - earth_soi.velocity;
      out.b_lu = approach_distance(ell_vec, v_inf);
      out.b_required_lu =
          impact_parameter(scn_.miss_distance_lu, v_inf.norm(), scn_.units.grav_param_earth);
      out.ok = true;
    } catch (const std::exception& ex) {
      out.error = ex.what();
      out.ok = false;
    }
    return out;
  }

  NlpEval eval(const VecX& x) const {
    NlpEval ev;
    const ShootOutput so = shoot(x);
    if (!so.ok) {
      ev.ok = false;
      return ev;
    }
    const double soi = scn_.soi_radius_lu;
    ev.f = (spec_.regime == Regime::ConstantPower) ? so.t_op / t_ref_
                                                   : so.j_canonical / (a_max_ * t_ref_);
    ev.ceq = {(so.ell_lu - soi) / soi, (so.b_lu - so.b_required_lu) / b_i0_};
    ev.cineq = {so.ell_dot, so.t_op - so.t_soi};
    return ev;
  }

  VecX eq_tols() const {
    return {spec_.residual_tol_lu / scn_.soi_radius_lu, spec_.residual_tol_lu / b_i0_};
  }

  // Seed with a given window length; sigma tracks the anti-velocity direction
  // along the reference orbit, acceleration fractions from frac_of_s.
  VecX make_seed(double t_op, const std::function<double(double)>& frac_of_s) const {
    VecX x(dim());
    x[0] = t_soi0_;
    x[1] = t_op;
    for (int k = 0; k <= n_; ++k) {
      const double s = static_cast<double>(k) / n_;
      x[2 + static_cast<std::size_t>(k)] = anti_velocity_sigma(-ti_tu_ + s * t_op);
    }
    // unwrap the seed angles
    for (int k = 1; k <= n_; ++k) {
      double& cur = x[2 + static_cast<std::size_t>(k)];
      const double prev = x[2 + static_cast<std::size_t>(k - 1)];
      cur = prev + wrap_pi(cur - prev);
    }
    if (has_accel_nodes()) {
      for (int k = 0; k <= n_; ++k) {
        const double s = static_cast<double>(k) / n_;
        x[3 + static_cast<std::size_t>(n_ + k)] =
            std::clamp(frac_of_s(s), node_floor(k), 1.0);
      }
    }
    return x;
  }

  // Maps a solution of a possibly different mesh / start time onto this
  // problem's decision layout.
  VecX adapt_warm_start(const VecX& w, int n_old, double ti_old_tu) const {
    const int m = n_old;
    VecX x(dim());
    x[0] = std::clamp(w[0] + (ti_tu_ - ti_old_tu), t_soi0_ - 0.3, t_soi0_ + 0.3);
    x[1] = std::min(w[1], ti_tu_);
    auto interp = [&](std::size_t base_old, std::size_t base_new) {
      for (int k = 0; k <= n_; ++k) {
        const double s = static_cast<double>(k) / n_ * m;
        const int j = std::min(static_cast<int>(s), m - 1);
        const double f = s - j;
        x[base_new + static_cast<std::size_t>(k)] =
            (1.0 - f) * w[base_old + static_cast<std::size_t>(j)] +
            f * w[base_old + static_cast<std::size_t>(j + 1)];
      }
    };
    interp(2, 2);
    if (has_accel_nodes()) {
      const bool warm_has_accel = w.size() == 2 + 2 * static_cast<std::size_t>(m + 1);
      if (warm_has_accel) {
        interp(3 + static_cast<std::size_t>(m), 3 + static_cast<std::size_t>(n_));
      } else {
        for (int k = 0; k <= n_; ++k) x[3 + static_cast<std::size_t>(n_ + k)] = 1.0;
      }
      for (int k = 0; k <= n_; ++k) {
        double& fr = x[3 + static_cast<std::size_t>(n_ + k)];
        fr = std::clamp(fr, node_floor(k), 1.0);
      }
    }
    return x;
  }

 private:
  double find_reference_crossing() const { return reference_soi_crossing_epoch(scn_); }

  const Scenario& scn_;
  TranscriptionSpec spec_;
  double ti_tp_;
  int n_ = 0;
  double tp_tu_ = 0.0, ti_tu_ = 0.0;
  SphericalState init_state_;
  double a_max_ = 0.0;
  double t_cross0_ = 0.0, t_soi0_ = 0.0;
  double v_inf0_ = 0.0, b_i0_ = 0.0;
  double t_ref_ = 0.0;
};

// Residuals in LU plus the inequality slacks, per the terminal conditions.
struct ConstraintEval {
  bool ok = false;
  double ell_lu = 0.0, ell_dot_su = 0.0;
  double b_lu = 0.0, b_required_lu = 0.0;
  double residual_ell_lu = 0.0;  // ell_soi - ell
  double residual_b_lu = 0.0;    // b - b_i
  double slack_t_op = 0.0;       // t_op (> 0 required)
  double slack_order = 0.0;      // t_soi - t_op (> 0 required)
};

inline ConstraintEval evaluate_constraints(const DeflectionProblem& prob, const VecX& x) {
  ConstraintEval ce;
  const ShootOutput so = prob.shoot(x);
  ce.ok = so.ok;
  if (!so.ok) return ce;
  ce.ell_lu = so.ell_lu;
  ce.ell_dot_su = so.ell_dot;
  ce.b_lu = so.b_lu;
  ce.b_required_lu = so.b_required_lu;
  ce.residual_ell_lu = prob.scenario().soi_radius_lu - so.ell_lu;
  ce.residual_b_lu = so.b_lu - so.b_required_lu;
  ce.slack_t_op = so.t_op;
  ce.slack_order = so.t_soi - so.t_op;
  return ce;
}

namespace detail {

inline std::vector<VecX> cold_seeds(const DeflectionProblem& prob, unsigned seed_jitter) {
  const double t_est = prob.t_op_estimate();
  const double lead = prob.scenario().perihelion_lead_tp();
  const double ti_tp = prob.ti_tu() / prob.tp_tu();
  const double tp = prob.tp_tu();

  std::mt19937 rng(seed_jitter);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto jitter = [&](double v) { return seed_jitter == 0 ? v : v * (1.0 + 0.05 * uni(rng)); };

  std::vector<double> windows;
  auto add = [&](double w) {
    w = jitter(w);
    if (w > 1e-3 && w < prob.ti_tu()) windows.push_back(w);
  };

  add(t_est);
  add(2.5 * t_est);
  // windows reaching the most recent pre-impact perihelion pass
  double k = std::floor(ti_tp - lead);
  const double gap_tp = ti_tp - lead - k;  // in [0,1)
  if (gap_tp * tp > 2.0 * t_est) {
    add(gap_tp * tp + 3.0 * t_est);
    add(gap_tp * tp + 8.0 * t_est);
    add(0.5 * gap_tp * tp);
  }
  add(5.0 * t_est);
  add(0.45 * t_est);
  add(8.0 * t_est);
  add(0.2 * t_est);
  add(15.0 * t_est);

  std::vector<VecX> seeds;
  const double peri_epoch = -(lead + k) * tp;  // most recent perihelion before impact
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const double w = windows[i];
    seeds.push_back(prob.make_seed(w, [](double) { return 1.0; }));
    if (prob.has_accel_nodes() && w > 4.0 * t_est) {
      // same window with thrust concentrated around the perihelion pass
      auto bump = [&, w](double s) {
        const double epoch = -prob.ti_tu() + s * w;
        return std::abs(epoch - peri_epoch) < 2.0 * t_est ? 1.0 : 0.05;
      };
      seeds.push_back(prob.make_seed(w, bump));
    }
  }
  return seeds;
}

}  // namespace detail

// Multi-start direct solve. Warm starts (raw decision vectors of a problem
// with meta (n_old, ti_old_tu)) are tried first; cold seeds fill the budget.
inline SolutionReport solve_deflection(
    const Scenario& scn, double ti_tp, const TranscriptionSpec& spec,
    const std::vector<std::tuple<VecX, int, double>>& warm_starts = {}) {
  const DeflectionProblem prob(scn, ti_tp, spec);

  std::vector<VecX> seeds;
  for (const auto& [w, n_old, ti_old] : warm_starts)
    seeds.push_back(prob.adapt_warm_start(w, n_old, ti_old));
  const std::size_t n_warm = seeds.size();
  for (auto& s : detail::cold_seeds(prob, spec.seed)) seeds.push_back(std::move(s));
  const std::size_t budget =
      n_warm > 0 ? std::min<std::size_t>(seeds.size(), n_warm + 2)
                 : std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(spec.multistarts));
  seeds.resize(budget);

  NlpOptions nopt;
  nopt.eq_tol = prob.eq_tols();
  nopt.fd_step = prob.fd_steps();
  nopt.max_outer = spec.max_outer;
  nopt.max_inner = spec.max_inner;

  const VecX lo = prob.lower();
  const VecX hi = prob.upper();
  const NlpFunc fn = [&prob](const VecX& x) { return prob.eval(x); };

  NlpResult best;
  int best_idx = -1;
  long total_evals = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    NlpResult r = solve_auglag(fn, seeds[i], lo, hi, nopt);
    total_evals += r.n_evals;
    const bool better = [&] {
      if (best_idx < 0) return true;
      if (r.feasible != best.feasible) return r.feasible;
      if (std::abs(r.f - best.f) > 1e-12) return r.f < best.f;
      return r.x[1] < best.x[1];
    }();
    if (better) {
      best = std::move(r);
      best_idx = static_cast<int>(i);
    }
  }

  // ---- assemble the report ----
  SolutionReport rep;
  rep.ti_tp = ti_tp;
  rep.regime = spec.regime;
  if (spec.regime == Regime::BoundedProfile) rep.profile = spec.profile.str();
  rep.n_intervals = spec.n_intervals;
  rep.multistart_index = best_idx;
  rep.n_evals = total_evals;
  rep.decision = best.x;
  rep.converged = best.converged;
  rep.feasible = best.feasible;
  rep.status = best.message;
  rep.objective_value = best.f;

  const ShootOutput so = prob.shoot(best.x);
  rep.t_soi_tu = so.t_soi;
  rep.control = prob.build_control(best.x);
  rep.b_lu = so.b_lu;
  rep.b_required_lu = so.b_required_lu;
  rep.residual_ell_lu = scn.soi_radius_lu - so.ell_lu;
  rep.residual_b_lu = so.b_lu - so.b_required_lu;
  rep.ell_dot_su = so.ell_dot;
  rep.mass_end_kg = so.burn_end.mass;

  const CanonicalUnits& u = scn.units;
  rep.window_days = u.to_days(so.t_op);
  rep.dv_mps = u.to_mps(so.j_canonical);

  // idle and active spans from the node profile
  const auto& nodes = rep.control.nodes();
  const double thr = 1e-3 * prob.a_max();
  double first_on = nodes.front().node_time, last_on = nodes.front().node_time;
  bool any_on = false;
  for (std::size_t kk = 0; kk < nodes.size(); ++kk) {
    if (nodes[kk].accel_mag >= thr) {
      if (!any_on) {
        first_on = nodes[kk].node_time;
        // linear-interpolated threshold crossing from the previous node
        if (kk > 0) {
          const auto& a = nodes[kk - 1];
          const auto& b = nodes[kk];
          const double da = b.accel_mag - a.accel_mag;
          if (da > 0.0)
            first_on = a.node_time + (thr - a.accel_mag) / da * (b.node_time - a.node_time);
        }
        any_on = true;
      }
      last_on = nodes[kk].node_time;
    }
  }
  if (any_on) {
    rep.idle_days = u.to_days(first_on - nodes.front().node_time);
    rep.t_op_days = u.to_days(last_on - first_on);
    if (spec.regime == Regime::ConstantPower) {
      rep.idle_days = 0.0;
      rep.t_op_days = rep.window_days;
    }
  } else {
    rep.idle_days = rep.window_days;
    rep.t_op_days = 0.0;
  }

  // energy: trapezoid of the node power signal (fixed mass), or the ablated
  // mass times Q* when mass loss is active
  if (scn.config.mass_loss) {
    const double de_j = (scn.eco_mass_kg - so.burn_end.mass) * scn.laser.q_star;
    rep.energy_kw_day = de_j / (1000.0 * constants::kSecondsPerDay);
  } else {
    double e_j = 0.0;
    for (std::size_t kk = 0; kk + 1 < nodes.size(); ++kk) {
      const double p0 =
          power_from_accel(scn.laser, u.accel_to_si(nodes[kk].accel_mag), scn.eco_mass_kg);
      const double p1 =
          power_from_accel(scn.laser, u.accel_to_si(nodes[kk + 1].accel_mag), scn.eco_mass_kg);
      const double h_s = u.to_seconds(nodes[kk + 1].node_time - nodes[kk].node_time);
      e_j += 0.5 * h_s * (p0 + p1);
    }
    rep.energy_kw_day = e_j / (1000.0 * constants::kSecondsPerDay);
  }

  // full re-simulation with event detection at tighter tolerance
  try {
    PropagateOptions ropt;
    ropt.rel_tol = spec.resim_rel_tol;
    ropt.abs_tol = spec.resim_abs_tol;
    ropt.stop_at_soi = true;
    ropt.soi_radius = scn.soi_radius_lu;
    ropt.mass_loss = scn.config.mass_loss;
    ropt.laser = &scn.laser;
    ropt.units = &scn.units;
    const double t0 = -prob.ti_tu();
    const PropagationResult rr = propagate(prob.initial_state(), rep.control, t0,
                                           t0 + so.t_soi + 0.5, ropt, scn.earth, 1.0);
    if (rr.soi_event) {
      const CartesianState ast = cartesian_from_spherical(rr.soi_event->state);
      const CartesianState ear = scn.earth.state(rr.soi_event->t);
      const Vec3 ell_vec = ast.position - ear.position;
      const Vec3 v_inf = ast.velocity - ear.velocity;
      const double b = approach_distance(ell_vec, v_inf);
      const double bi =
          impact_parameter(scn.miss_distance_lu, v_inf.norm(), scn.units.grav_param_earth);
      rep.resim_residual_b_lu = b - bi;
      rep.resim_ell_dot_su = rr.soi_event->ell_dot;
      rep.resim_ok = true;
    }
  } catch (const std::exception&) {
    rep.resim_ok = false;
  }
  return rep;
}

inline SolutionReport solve_constant_power(const Scenario& scn, double ti_tp,
                                           TranscriptionSpec spec = {}) {
  spec.regime = Regime::ConstantPower;
  return solve_deflection(scn, ti_tp, spec);
}

inline SolutionReport solve_variable_power(const Scenario& scn, double ti_tp,
                                           TranscriptionSpec spec = {}) {
  spec.regime = Regime::VariablePower;
  return solve_deflection(scn, ti_tp, spec);
}

inline SolutionReport solve_bounded(const Scenario& scn, double ti_tp,
                                    const BoundedProfile& profile,
                                    TranscriptionSpec spec = {}) {
  spec.regime = Regime::BoundedProfile;
  spec.profile = profile;
  return solve_deflection(scn, ti_tp, spec);
}

// Operational angle delta (thrust vs heliocentric velocity) at the active
// control nodes of a converged solution; pairs of (epoch TU, delta deg).
inline std::vector<std::pair<double, double>> operational_angles(const Scenario& scn,
                                                                 const SolutionReport& rep) {
  std::vector<std::pair<double, double>> out;
  const auto& nodes = rep.control.nodes();
  if (nodes.empty()) return out;

  PropagateOptions popt;
  popt.rel_tol = 1e-10;
  popt.abs_tol = 1e-12;
  popt.soi_radius = scn.soi_radius_lu;
  popt.mass_loss = scn.config.mass_loss;
  popt.laser = &scn.laser;
  popt.units = &scn.units;

  SphericalState st = spherical_from_cartesian(
      scn.eco_state_at(nodes.front().node_time), scn.eco_mass_kg);
  const double thr = 1e-3 * scn.a_max_canonical();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k > 0) {
      const PropagationResult leg = propagate(st, rep.control, nodes[k - 1].node_time,
                                              nodes[k].node_time, popt, scn.earth, 1.0);
      st = leg.final_state;
    }
    if (nodes[k].accel_mag < thr) continue;
    const double sig = nodes[k].sigma;
    const double tr = std::sin(sig), tt = std::cos(sig);
    const double cross = tr * st.v - tt * st.u;
    const double dotp = tr * st.u + tt * st.v;
    out.emplace_back(nodes[k].node_time,
                     wrap_two_pi(std::atan2(cross, dotp)) * constants::kRadToDeg);
  }
  return out;
}

struct SweepOptions {
  int jobs = 1;
  int anchor_stride = 8;
};

// Independent solves over a start-time grid; every anchor_stride-th point is
// solved cold, the rest warm-start from their segment's left anchor chain.
inline std::vector<SolutionReport> sweep_start_times(const Scenario& scn,
                                                     const std::vector<double>& ti_grid,
                                                     const TranscriptionSpec& spec,
                                                     const SweepOptions& sopt = {}) {
  std::vector<SolutionReport> out(ti_grid.size());
  if (ti_grid.empty()) return out;
  const int stride = std::max(1, sopt.anchor_stride);
  const double tp = scn.eco_period_tu();

  auto solve_segment = [&](std::size_t begin, std::size_t end) {
    // cold anchor, then a warm chain
    out[begin] = solve_deflection(scn, ti_grid[begin], spec);
    for (std::size_t i = begin + 1; i < end; ++i) {
      const SolutionReport& prev = out[i - 1];
      std::vector<std::tuple<VecX, int, double>> warm;
      if (!prev.decision.empty())
        warm.emplace_back(prev.decision, prev.n_intervals, prev.ti_tp * tp);
      out[i] = solve_deflection(scn, ti_grid[i], spec, warm);
      if (!out[i].feasible && !warm.empty()) {
        // warm chain went stale: retry cold
        SolutionReport cold = solve_deflection(scn, ti_grid[i], spec);
        if (cold.feasible || cold.objective_value < out[i].objective_value) out[i] = cold;
      }
    }
  };

  std::vector<std::pair<std::size_t, std::size_t>> segments;
  for (std::size_t b = 0; b < ti_grid.size(); b += static_cast<std::size_t>(stride))
    segments.emplace_back(b, std::min(ti_grid.size(), b + static_cast<std::size_t>(stride)));

  if (sopt.jobs > 1) {
    std::vector<std::future<void>> futs;
    futs.reserve(segments.size());
    for (const auto& [b, e] : segments)
      futs.push_back(std::async(std::launch::async, solve_segment, b, e));
    for (auto& f : futs) f.get();
  } else {
    for (const auto& [b, e] : segments) solve_segment(b, e);
  }
  return out;
}

}  // namespace deflect
