#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

// Embedded Dormand-Prince 5(4) integrator with the classic quartic dense
// interpolant, step-doubling-free error control and optional event location
// on the dense output. States are fixed-size arrays; callers supply the RHS
// as a callable void(t, y, dydt).

namespace deflect {

template <std::size_t N>
using StateVec = std::array<double, N>;

enum class IntegrateStatus {
  ReachedEnd,
  EventTriggered,
  StepUnderflow,
  MaxStepsExceeded,
};

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 => heuristic
  double max_step = 0.0;      // 0 => full span
  std::size_t max_steps = 5'000'000;
};

// direction < 0: trigger when g crosses from positive to non-positive;
// direction > 0: the reverse; 0: any sign change.
struct EventOptions {
  int direction = 0;
  double value_tol = 1e-12;
  double time_tol = 1e-14;
};

template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  StateVec<N> c1{}, c2{}, c3{}, c4{}, c5{};

  StateVec<N> eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    StateVec<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = c1[i] + th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
    return y;
  }
};

template <std::size_t N>
struct IntegrationReport {
  IntegrateStatus status = IntegrateStatus::ReachedEnd;
  double t_final = 0.0;
  StateVec<N> y_final{};
  bool event_found = false;
  double t_event = 0.0;
  StateVec<N> y_event{};
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
};

namespace detail {

// Dormand-Prince coefficients.
inline constexpr double dp_c2 = 1.0 / 5, dp_c3 = 3.0 / 10, dp_c4 = 4.0 / 5, dp_c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// weights of (5th order) - (4th order) for the error estimate
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace detail

// Integrates y' = rhs(t, y) from t0 to t1 (either direction). The observer,
// when provided, is called as observer(const DenseSegment<N>&, t_new, y_new)
// after every accepted step. The event function g(t, y), when provided, is
// monitored across each accepted step and localized on the dense output.
template <std::size_t N, class Rhs, class EventFn = std::nullptr_t,
          class Observer = std::nullptr_t>
IntegrationReport<N> integrate_dopri5(Rhs&& rhs, const StateVec<N>& y0, double t0, double t1,
                                      const IntegrateOptions& opt = {}, EventFn&& event = nullptr,
                                      const EventOptions& eopt = {}, Observer&& observer = nullptr) {
  using namespace detail;
  constexpr bool kHasEvent = !std::is_same_v<std::decay_t<EventFn>, std::nullptr_t>;
  constexpr bool kHasObserver = !std::is_same_v<std::decay_t<Observer>, std::nullptr_t>;

  IntegrationReport<N> rep;
  rep.t_final = t0;
  rep.y_final = y0;
  if (t1 == t0) return rep;

  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double h_max = (opt.max_step > 0.0) ? opt.max_step : span;

  StateVec<N> y = y0;
  StateVec<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  double t = t0;
  rhs(t, y, k1);

  double h;
  if (opt.initial_step > 0.0) {
    h = std::min(opt.initial_step, h_max);
  } else {
    // small trial step scaled to the state/derivative magnitudes
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    h = (d1n > 1e-30) ? 0.01 * std::sqrt(d0 / d1n) : 1e-6 * span;
    h = std::min(std::max(h, 1e-10 * span), h_max);
  }

  double g_prev = 0.0;
  if constexpr (kHasEvent) g_prev = event(t, y);

  while (rep.n_accepted + rep.n_rejected < opt.max_steps) {
    const double remaining = std::abs(t1 - t);
    if (remaining <= 1e-15 * std::abs(t1 - t0) || remaining == 0.0) break;
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (h < 1e-14 * std::max(std::abs(t), 1.0) && h < 1e-14 * span) {
      rep.status = IntegrateStatus::StepUnderflow;
      rep.t_final = t;
      rep.y_final = y;
      return rep;
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    rhs(t + dp_c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + dp_c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + dp_c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + dp_c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + hs, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + hs, ynew, k7);  // FSAL

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (err <= 1.0) {
      DenseSegment<N> seg;
      seg.t0 = t;
      seg.h = hs;
      for (std::size_t i = 0; i < N; ++i) {
        const double dy = ynew[i] - y[i];
        seg.c1[i] = y[i];
        seg.c2[i] = dy;
        seg.c3[i] = hs * k1[i] - dy;
        seg.c4[i] = dy - hs * k7[i] - seg.c3[i];
        seg.c5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                          d7 * k7[i]);
      }

      const double t_new = t + hs;
      ++rep.n_accepted;

      if constexpr (kHasEvent) {
        const double g_new = event(t_new, ynew);
        const bool crossed = (g_prev > 0.0 && g_new <= 0.0 && eopt.direction <= 0) ||
                             (g_prev < 0.0 && g_new >= 0.0 && eopt.direction >= 0);
        if (crossed) {
          // bisection on the dense interpolant
          double ta = t, tb = t_new, ga = g_prev;
          for (int it = 0; it < 200; ++it) {
            const double tm = 0.5 * (ta + tb);
            const StateVec<N> ym = seg.eval(tm);
            const double gm = event(tm, ym);
            if (std::abs(gm) < eopt.value_tol || std::abs(tb - ta) < eopt.time_tol) {
              ta = tb = tm;
              break;
            }
            if ((ga > 0.0) == (gm > 0.0)) {
              ta = tm;
              ga = gm;
            } else {
              tb = tm;
            }
          }
          rep.event_found = true;
          rep.t_event = 0.5 * (ta + tb);
          rep.y_event = seg.eval(rep.t_event);
          rep.status = IntegrateStatus::EventTriggered;
          rep.t_final = rep.t_event;
          rep.y_final = rep.y_event;
          if constexpr (kHasObserver) observer(seg, rep.t_event, rep.y_event);
          return rep;
        }
        g_prev = g_new;
      }

      if constexpr (kHasObserver) observer(seg, t_new, ynew);

      t = t_new;
      y = ynew;
      k1 = k7;

      double fac = 0.9 * std::pow(std::max(err, 1e-20), -0.2);
      fac = std::min(5.0, std::max(0.2, fac));
      h = std::min(h * fac, h_max);
      if (last && std::abs(t1 - t) <= 1e-15 * span) break;
    } else {
      ++rep.n_rejected;
      const double fac = std::max(0.1, 0.9 * std::pow(err, -0.2));
      h *= fac;
    }
  }

  if (rep.n_accepted + rep.n_rejected >= opt.max_steps) {
    rep.status = IntegrateStatus::MaxStepsExceeded;
  } else {
    rep.status = IntegrateStatus::ReachedEnd;
  }
  rep.t_final = t;
  rep.y_final = y;
  return rep;
}

}  // namespace deflect
