#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinorrt/types.hpp"

namespace kinorrt {

// Indirect optimal control for the torque-driven pendulum.
//
// With running cost C = w + u^2/2 the Hamiltonian is minimized by
// u* = -lam_omega, and the coupled state/costate/cost system integrated here
// is
//   theta'     = omega
//   omega'     = sin(theta) - lam_omega
//   lam_theta' = -lam_omega cos(theta)
//   lam_omega' = -lam_theta
//   cost'      = w + lam_omega^2 / 2
//
// Other input-affine systems can plug into integrate() by providing the same
// augmented_derivative interface.

struct AugmentedRate {
  double dtheta = 0.0;
  double domega = 0.0;
  double dlam_theta = 0.0;
  double dlam_omega = 0.0;
  double dcost = 0.0;
};

struct PendulumSystem {
  static std::pair<double, double> state_derivative(const State& x, double u) {
    return {x.omega, std::sin(x.theta) + u};
  }

  static double optimal_input(const Costate& lam) { return -lam.lam_omega; }

  static double optimal_hamiltonian(const State& x, const Costate& lam, CostWeight w) {
    return w.w + lam.lam_theta * x.omega + lam.lam_omega * std::sin(x.theta) -
           0.5 * lam.lam_omega * lam.lam_omega;
  }

  static AugmentedRate augmented_derivative(const State& x, const Costate& lam, CostWeight w) {
    AugmentedRate r;
    r.dtheta = x.omega;
    r.domega = std::sin(x.theta) - lam.lam_omega;
    r.dlam_theta = -lam.lam_omega * std::cos(x.theta);
    r.dlam_omega = -lam.lam_theta;
    r.dcost = w.w + 0.5 * lam.lam_omega * lam.lam_omega;
    return r;
  }
};

struct TrajectorySample {
  double t = 0.0;
  State x;
  Costate lam;
  double running_cost = 0.0;
};

// Caps that end a data-generation rollout: accumulated cost above cost_cap,
// or Euclidean distance from the rollout's initial state above state_cap.
struct StopRule {
  double cost_cap = 0.0;
  double state_cap = 0.0;

  bool triggered(const TrajectorySample& s, const State& x0) const {
    return s.running_cost > cost_cap || state_distance(s.x, x0) > state_cap;
  }
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  double final_time = 0.0;        // time of the last stored sample
  bool stopped_early = false;     // a StopRule fired before t_f

  const TrajectorySample& back() const { return samples.back(); }
  const State& end_state() const { return samples.back().x; }
  double cost() const { return samples.back().running_cost; }
};

class IntegrationDivergedError : public std::runtime_error {
 public:
  IntegrationDivergedError(std::size_t step, double t)
      : std::runtime_error("integration diverged at step " + std::to_string(step) +
                           " (t=" + std::to_string(t) + ")"),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

namespace detail {

struct AugmentedPoint {
  State x;
  Costate lam;
  double cost = 0.0;
};

template <typename System>
inline AugmentedRate rate(const System& sys, const AugmentedPoint& p, CostWeight w) {
  return sys.augmented_derivative(p.x, p.lam, w);
}

inline AugmentedPoint advance(const AugmentedPoint& p, const AugmentedRate& r, double h) {
  AugmentedPoint q;
  q.x.theta = p.x.theta + h * r.dtheta;
  q.x.omega = p.x.omega + h * r.domega;
  q.lam.lam_theta = p.lam.lam_theta + h * r.dlam_theta;
  q.lam.lam_omega = p.lam.lam_omega + h * r.dlam_omega;
  q.cost = p.cost + h * r.dcost;
  return q;
}

// One classical RK4 step of size h.
template <typename System>
inline AugmentedPoint rk4_step(const System& sys, const AugmentedPoint& p, double h, CostWeight w) {
  const AugmentedRate k1 = rate(sys, p, w);
  const AugmentedRate k2 = rate(sys, advance(p, k1, 0.5 * h), w);
  const AugmentedRate k3 = rate(sys, advance(p, k2, 0.5 * h), w);
  const AugmentedRate k4 = rate(sys, advance(p, k3, h), w);
  AugmentedRate sum;
  sum.dtheta = (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta) / 6.0;
  sum.domega = (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega) / 6.0;
  sum.dlam_theta =
      (k1.dlam_theta + 2.0 * k2.dlam_theta + 2.0 * k3.dlam_theta + k4.dlam_theta) / 6.0;
  sum.dlam_omega =
      (k1.dlam_omega + 2.0 * k2.dlam_omega + 2.0 * k3.dlam_omega + k4.dlam_omega) / 6.0;
  sum.dcost = (k1.dcost + 2.0 * k2.dcost + 2.0 * k3.dcost + k4.dcost) / 6.0;
  return advance(p, sum, h);
}

inline bool finite(const AugmentedPoint& p) {
  return is_finite(p.x) && is_finite(p.lam) && std::isfinite(p.cost);
}

}  // namespace detail

// Fixed-step RK4 from t=0 to t_f; the last step is truncated so the final
// sample lands on t_f exactly. Cost rides along as a third augmented ODE so
// every stored sample carries a cost consistent with its state. If `stop`
// fires, the trajectory is truncated at the step that triggered it and
// marked stopped_early; that final sample is the one violating the caps.
template <typename System>
Trajectory integrate(const System& sys, const State& x0, const Costate& lam0, double t_f,
                     double dt, CostWeight w, const StopRule* stop = nullptr) {
  if (!(t_f > 0.0)) throw std::invalid_argument("integrate: t_f must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (dt > t_f + 1e-12) throw std::invalid_argument("integrate: dt must not exceed t_f");
  if (!(w.w > 0.0)) throw std::invalid_argument("integrate: cost weight must be positive");
  if (!is_finite(x0) || !is_finite(lam0)) {
    throw std::invalid_argument("integrate: non-finite initial condition");
  }

  const auto n_full = static_cast<std::size_t>(std::floor(t_f / dt + 1e-9));
  const double remainder = t_f - static_cast<double>(n_full) * dt;
  const bool has_partial = remainder > 1e-9;
  const std::size_t n_steps = n_full + (has_partial ? 1 : 0);

  Trajectory traj;
  traj.dt = dt;
  traj.samples.reserve(n_steps + 1);

  detail::AugmentedPoint p{x0, lam0, 0.0};
  traj.samples.push_back({0.0, p.x, p.lam, 0.0});

  for (std::size_t step = 1; step <= n_steps; ++step) {
    const bool partial = has_partial && step == n_steps;
    const double h = partial ? remainder : dt;
    const double t = partial ? t_f : static_cast<double>(step) * dt;
    p = detail::rk4_step(sys, p, h, w);
    if (!detail::finite(p)) throw IntegrationDivergedError(step, t);
    traj.samples.push_back({t, p.x, p.lam, p.cost});
    if (stop && stop->triggered(traj.samples.back(), x0)) {
      traj.stopped_early = true;
      break;
    }
  }
  traj.final_time = traj.samples.back().t;
  return traj;
}

inline Trajectory integrate(const State& x0, const Costate& lam0, double t_f, double dt,
                            CostWeight w, const StopRule* stop = nullptr) {
  return integrate(PendulumSystem{}, x0, lam0, t_f, dt, w, stop);
}

}  // namespace kinorrt
