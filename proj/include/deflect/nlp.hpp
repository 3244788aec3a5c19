#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

// Augmented-Lagrangian NLP solver: equality constraints are penalized with
// running multiplier estimates, inequality constraints (g <= 0) use the
// clipped (Powell-Hestenes-Rockafellar) form, and box bounds are handled by
// projection inside the quasi-Newton inner loop. Gradients come from finite
// differences of the merit function, so the problem functions only need to be
// evaluable, not differentiable in closed form.

namespace deflect {

using VecX = std::vector<double>;

struct NlpEval {
  double f = 0.0;
  VecX ceq;    // want = 0
  VecX cineq;  // want <= 0
  bool ok = true;
};

using NlpFunc = std::function<NlpEval(const VecX&)>;

struct NlpOptions {
  VecX eq_tol;              // per-constraint absolute tolerance
  double ineq_tol = 1e-9;
  double grad_tol = 3e-7;
  int max_outer = 12;
  int max_inner = 160;
  double rho0 = 10.0;
  double rho_growth = 8.0;
  double rho_max = 1e10;
  VecX fd_step;             // per-variable finite-difference step (required)
  long max_evals = 2'000'000;
};

struct NlpResult {
  VecX x;
  double f = 0.0;
  VecX ceq, cineq;
  bool converged = false;
  bool feasible = false;
  int outer_iters = 0;
  long n_evals = 0;
  std::string message;
};

namespace detail {

class AugLagMerit {
 public:
  AugLagMerit(const NlpFunc& fn, long& evals, long max_evals)
      : fn_(fn), evals_(evals), max_evals_(max_evals) {}

  VecX lambda, mu;
  double rho = 10.0;

  // returns +inf on evaluation failure or budget exhaustion
  double operator()(const VecX& x, NlpEval* out = nullptr) const {
    if (evals_ >= max_evals_) return std::numeric_limits<double>::infinity();
    ++evals_;
    NlpEval ev = fn_(x);
    if (out) *out = ev;
    if (!ev.ok) return std::numeric_limits<double>::infinity();
    double phi = ev.f;
    for (std::size_t j = 0; j < ev.ceq.size(); ++j) {
      const double c = ev.ceq[j];
      phi += lambda[j] * c + 0.5 * rho * c * c;
    }
    for (std::size_t k = 0; k < ev.cineq.size(); ++k) {
      const double t = std::max(0.0, mu[k] + rho * ev.cineq[k]);
      phi += (t * t - mu[k] * mu[k]) / (2.0 * rho);
    }
    return phi;
  }

 private:
  const NlpFunc& fn_;
  long& evals_;
  long max_evals_;
};

inline void project(VecX& x, const VecX& lo, const VecX& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

// Forward-difference gradient of the merit; steps flip direction at bounds so
// the perturbed point never leaves the box.
inline bool fd_gradient(const AugLagMerit& merit, const VecX& x, double phi0, const VecX& lo,
                        const VecX& hi, const VecX& fd_step, VecX& grad) {
  const std::size_t n = x.size();
  grad.assign(n, 0.0);
  VecX xp = x;
  for (std::size_t i = 0; i < n; ++i) {
    double h = fd_step[i];
    if (x[i] + h > hi[i]) h = -h;
    if (x[i] + h < lo[i]) return false;  // degenerate box
    xp[i] = x[i] + h;
    const double phi = merit(xp);
    xp[i] = x[i];
    if (!std::isfinite(phi)) return false;
    grad[i] = (phi - phi0) / h;
  }
  return true;
}

}  // namespace detail

// Minimizes fn.f subject to fn.ceq = 0, fn.cineq <= 0 and lo <= x <= hi.
inline NlpResult solve_auglag(const NlpFunc& fn, VecX x0, const VecX& lo, const VecX& hi,
                              const NlpOptions& opt) {
  const std::size_t n = x0.size();
  NlpResult res;
  res.n_evals = 0;

  detail::AugLagMerit merit(fn, res.n_evals, opt.max_evals);
  merit.rho = opt.rho0;

  detail::project(x0, lo, hi);
  NlpEval ev0;
  double phi0 = merit(x0, &ev0);
  if (!std::isfinite(phi0)) {
    res.x = x0;
    res.message = "initial point not evaluable";
    return res;
  }
  merit.lambda.assign(ev0.ceq.size(), 0.0);
  merit.mu.assign(ev0.cineq.size(), 0.0);

  auto eq_violation = [&](const VecX& ceq) {
    double m = 0.0;
    for (std::size_t j = 0; j < ceq.size(); ++j)
      m = std::max(m, std::abs(ceq[j]) / opt.eq_tol[j]);
    return m;  // scaled: feasible iff <= 1
  };
  auto ineq_violation = [&](const VecX& ci) {
    double m = 0.0;
    for (double g : ci) m = std::max(m, g);
    return m;
  };

  VecX x = x0;
  NlpEval ev = ev0;
  double prev_viol = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < opt.max_outer; ++outer) {
    res.outer_iters = outer + 1;

    // ---- inner: projected BFGS on the merit ----
    std::vector<VecX> Hinv(n, VecX(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) Hinv[i][i] = 1.0;

    double phi = merit(x, &ev);
    VecX g(n), gnew(n), d(n), xnew(n), s(n), yv(n);
    bool have_grad = detail::fd_gradient(merit, x, phi, lo, hi, opt.fd_step, g);
    bool inner_converged = false;

    for (int inner = 0; inner < opt.max_inner && have_grad; ++inner) {
      // projected-gradient convergence measure
      double pg_norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double gi = g[i];
        if (x[i] <= lo[i] + 1e-14 && gi > 0.0) gi = 0.0;
        if (x[i] >= hi[i] - 1e-14 && gi < 0.0) gi = 0.0;
        pg_norm = std::max(pg_norm, std::abs(gi) * opt.fd_step[i]);
      }
      if (pg_norm < opt.grad_tol * (1.0 + std::abs(phi))) {
        inner_converged = true;
        break;
      }

      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += Hinv[i][k] * g[k];
        d[i] = -acc;
      }
      double gd = 0.0;
      for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
      if (gd > -1e-18) {  // not a descent direction: reset to steepest descent
        for (std::size_t i = 0; i < n; ++i) {
          std::fill(Hinv[i].begin(), Hinv[i].end(), 0.0);
          Hinv[i][i] = 1.0;
          d[i] = -g[i];
        }
        gd = 0.0;
        for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
        if (gd > -1e-20) break;
      }

      // Armijo backtracking along the projected path
      double alpha = 1.0;
      double phi_new = std::numeric_limits<double>::infinity();
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        for (std::size_t i = 0; i < n; ++i) xnew[i] = x[i] + alpha * d[i];
        detail::project(xnew, lo, hi);
        phi_new = merit(xnew);
        if (std::isfinite(phi_new) && phi_new <= phi + 1e-4 * alpha * gd) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        inner_converged = true;  // no further progress at this multiplier state
        break;
      }

      phi_new = merit(xnew, &ev);
      have_grad = detail::fd_gradient(merit, xnew, phi_new, lo, hi, opt.fd_step, gnew);
      if (!have_grad) break;

      double sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = xnew[i] - x[i];
        yv[i] = gnew[i] - g[i];
        sy += s[i] * yv[i];
      }
      double ss = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ss += s[i] * s[i];
        yy += yv[i] * yv[i];
      }
      if (sy > 1e-12 * std::sqrt(ss * yy)) {
        // BFGS update of the inverse Hessian (Sherman-Morrison form)
        VecX hy(n, 0.0);
        double yhy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (std::size_t k = 0; k < n; ++k) acc += Hinv[i][k] * yv[k];
          hy[i] = acc;
        }
        for (std::size_t i = 0; i < n; ++i) yhy += yv[i] * hy[i];
        const double c1 = (sy + yhy) / (sy * sy);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t k = 0; k < n; ++k) {
            Hinv[i][k] += c1 * s[i] * s[k] - (hy[i] * s[k] + s[i] * hy[k]) / sy;
          }
        }
      }
      x = xnew;
      g = gnew;
      phi = phi_new;
    }

    // ---- multiplier / penalty update ----
    merit(x, &ev);  // refresh constraint values at the inner solution
    --res.n_evals;  // bookkeeping eval, not budget-relevant
    const double viol = std::max(eq_violation(ev.ceq),
                                 ineq_violation(ev.cineq) / opt.ineq_tol);
    if (viol <= 1.0 && inner_converged) {
      res.converged = true;
      break;
    }
    for (std::size_t j = 0; j < ev.ceq.size(); ++j) merit.lambda[j] += merit.rho * ev.ceq[j];
    for (std::size_t k = 0; k < ev.cineq.size(); ++k)
      merit.mu[k] = std::max(0.0, merit.mu[k] + merit.rho * ev.cineq[k]);
    if (viol > 0.25 * prev_viol) merit.rho = std::min(merit.rho * opt.rho_growth, opt.rho_max);
    prev_viol = viol;
  }

  res.x = x;
  res.f = ev.f;
  res.ceq = ev.ceq;
  res.cineq = ev.cineq;
  res.feasible = eq_violation(ev.ceq) <= 1.0 && ineq_violation(ev.cineq) <= opt.ineq_tol;
  res.message = res.converged ? "converged" : (res.feasible ? "feasible" : "infeasible");
  return res;
}

}  // namespace deflect
