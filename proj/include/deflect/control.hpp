#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "deflect/elements.hpp"

namespace deflect {

// One node of the discretized control: thrust acceleration magnitude and
// direction angles at a given epoch. Magnitudes in canonical LU/TU^2.
struct ControlSample {
  double accel_mag = 0.0;  // >= 0
  double sigma = 0.0;      // in-plane angle (rad), measured from the tangential axis
  double beta = 0.0;       // out-of-plane angle (rad)
  double node_time = 0.0;  // TU
};

// Piecewise-linear control history over [t_start, t_end]; zero thrust outside.
// sigma is unwrapped across nodes before interpolation so the thrust direction
// never sweeps through a spurious 2*pi jump.
class ControlHistory {
 public:
  ControlHistory() = default;

  explicit ControlHistory(std::vector<ControlSample> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
      if (!(nodes_[k + 1].node_time > nodes_[k].node_time))
        throw std::invalid_argument("ControlHistory: node times must be strictly increasing");
    }
    for (auto& n : nodes_) {
      if (n.accel_mag < 0.0)
        throw std::invalid_argument("ControlHistory: negative acceleration magnitude");
    }
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      const double prev = nodes_[k - 1].sigma;
      nodes_[k].sigma = prev + wrap_pi(nodes_[k].sigma - prev);
    }
  }

  static ControlHistory zero() { return ControlHistory{}; }

  bool empty() const { return nodes_.empty(); }
  const std::vector<ControlSample>& nodes() const { return nodes_; }
  double t_start() const { return nodes_.empty() ? 0.0 : nodes_.front().node_time; }
  double t_end() const { return nodes_.empty() ? 0.0 : nodes_.back().node_time; }

  ControlSample at(double t) const {
    ControlSample s;
    s.node_time = t;
    if (nodes_.empty() || t < t_start() || t > t_end()) return s;  // zero thrust
    if (nodes_.size() == 1) return nodes_.front();
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                               [](double tt, const ControlSample& n) { return tt < n.node_time; });
    if (it == nodes_.begin()) return nodes_.front();
    if (it == nodes_.end()) {
      s = nodes_.back();
      s.node_time = t;
      return s;
    }
    const ControlSample& b = *it;
    const ControlSample& a = *(it - 1);
    const double f = (t - a.node_time) / (b.node_time - a.node_time);
    s.accel_mag = a.accel_mag + f * (b.accel_mag - a.accel_mag);
    s.sigma = a.sigma + f * (b.sigma - a.sigma);
    s.beta = a.beta + f * (b.beta - a.beta);
    return s;
  }

 private:
  std::vector<ControlSample> nodes_;
};

// Trapezoidal quadrature of |u| over the node mesh (the transcription
// objective); returns canonical delta-v (SU).
inline double control_dv_integral(const ControlHistory& ctrl) {
  const auto& n = ctrl.nodes();
  double j = 0.0;
  for (std::size_t k = 0; k + 1 < n.size(); ++k) {
    const double h = n[k + 1].node_time - n[k].node_time;
    j += 0.5 * h * (n[k].accel_mag + n[k + 1].accel_mag);
  }
  return j;
}

}  // namespace deflect
