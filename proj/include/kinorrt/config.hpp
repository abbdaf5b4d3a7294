#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "kinorrt/experiment.hpp"
#include "kinorrt/io.hpp"

namespace kinorrt {

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(ConfigMap kv) : kv_(std::move(kv)) {}

  double num(const std::string& key, double fallback) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    seen_.insert(key);
    return parse_double(it->second, "config key '" + key + "'");
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    seen_.insert(key);
    return parse_uint(it->second, "config key '" + key + "'");
  }

  void check_all_consumed() const {
    for (const auto& [key, value] : kv_) {
      if (!seen_.count(key)) throw IoError("unknown config key '" + key + "'");
    }
  }

 private:
  ConfigMap kv_;
  std::set<std::string> seen_;
};

}  // namespace detail

// Applies a flat key = value config on top of the built-in defaults.
// Unknown keys are errors.
inline ExperimentConfig config_from_map(const ConfigMap& kv) {
  ExperimentConfig c;
  detail::ConfigReader r(kv);

  c.gen.n_sims = r.uint("n_sims", c.gen.n_sims);
  c.gen.dt = r.num("dt", c.gen.dt);
  c.gen.cost_cap = r.num("cost_cap", c.gen.cost_cap);
  c.gen.state_cap = r.num("state_cap", c.gen.state_cap);
  c.gen.theta_range.lo = r.num("theta_min", c.gen.theta_range.lo);
  c.gen.theta_range.hi = r.num("theta_max", c.gen.theta_range.hi);
  c.gen.omega_range.lo = r.num("omega_min", c.gen.omega_range.lo);
  c.gen.omega_range.hi = r.num("omega_max", c.gen.omega_range.hi);
  c.gen.phi_range.lo = r.num("phi_min", c.gen.phi_range.lo);
  c.gen.phi_range.hi = r.num("phi_max", c.gen.phi_range.hi);
  c.gen.w.w = r.num("w", c.gen.w.w);
  c.gen.harvest_stride = static_cast<int>(r.uint("harvest_stride", c.gen.harvest_stride));

  c.clean.d = r.num("d", c.clean.d);
  c.clean.k_max = static_cast<int>(r.uint("k_max", c.clean.k_max));

  c.surrogate.k = static_cast<std::size_t>(r.uint("k", c.surrogate.k));
  c.surrogate.cost_floor = r.num("cost_floor", c.surrogate.cost_floor);
  c.surrogate.cost_ceiling = r.num("cost_ceiling", c.surrogate.cost_ceiling);
  c.surrogate.validity_percentile = r.num("validity_percentile", c.surrogate.validity_percentile);
  c.surrogate.validity_scale = r.num("validity_scale", c.surrogate.validity_scale);
  c.surrogate.validity_threshold = r.num("validity_threshold", c.surrogate.validity_threshold);

  c.planner.x_init.theta = r.num("x_init_theta", c.planner.x_init.theta);
  c.planner.x_init.omega = r.num("x_init_omega", c.planner.x_init.omega);
  c.planner.x_goal.theta = r.num("x_goal_theta", c.planner.x_goal.theta);
  c.planner.x_goal.omega = r.num("x_goal_omega", c.planner.x_goal.omega);
  c.planner.goal_radius = r.num("goal_radius", c.planner.goal_radius);
  c.planner.goal_bias = r.num("goal_bias", c.planner.goal_bias);
  c.planner.sigma = r.num("sigma", c.planner.sigma);
  c.planner.sigma_goal = r.num("sigma_goal", c.planner.sigma_goal);
  c.planner.max_nodes = static_cast<std::size_t>(r.uint("max_nodes", c.planner.max_nodes));
  c.planner.max_iterations =
      static_cast<std::size_t>(r.uint("max_iterations", c.planner.max_iterations));
  c.planner.quantum = r.num("quantum", c.planner.quantum);

  c.n_epochs = static_cast<std::size_t>(r.uint("epochs", c.n_epochs));
  c.runs_per_epoch = static_cast<std::size_t>(r.uint("runs_per_epoch", c.runs_per_epoch));
  c.holdout_fraction = r.num("holdout_fraction", c.holdout_fraction);

  r.check_all_consumed();

  // The planner samples targets over the same ranges the data covers, and
  // the steering floor tracks the integration step.
  c.planner.theta_bounds = c.gen.theta_range;
  c.planner.omega_bounds = c.gen.omega_range;
  c.planner.dt = c.gen.dt;
  c.planner.w = c.gen.w;
  c.surrogate.t_f_floor = c.gen.dt;
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  return config_from_map(read_config_file(path));
}

// Writes the fully documented default configuration.
inline void write_default_config(const std::string& path) {
  auto f = detail::open_out(path);
  const ExperimentConfig c;
  f << "# Pendulum swing-up pipeline configuration.\n"
       "# Flat key = value format; '#' starts a comment.\n"
       "\n"
       "# ---- data generation ----\n"
       "n_sims = " << c.gen.n_sims << "            # rollouts per epoch\n"
       "dt = " << c.gen.dt << "                 # RK4 step [s]\n"
       "cost_cap = " << c.gen.cost_cap << "              # rollout ends when cost exceeds this\n"
       "state_cap = " << c.gen.state_cap << "           # ... or when ||x - x0|| exceeds this\n"
       "theta_min = " << detail::format_double(c.gen.theta_range.lo) << "  # initial-angle range [rad]\n"
       "theta_max = " << detail::format_double(c.gen.theta_range.hi) << "\n"
       "omega_min = " << detail::format_double(c.gen.omega_range.lo) << "  # initial-velocity range [rad/s]\n"
       "omega_max = " << detail::format_double(c.gen.omega_range.hi) << "\n"
       "phi_min = " << detail::format_double(c.gen.phi_range.lo) << "    # costate-parameter range [rad]\n"
       "phi_max = " << detail::format_double(c.gen.phi_range.hi) << "\n"
       "w = " << c.gen.w.w << "                     # time weight in the running cost w + u^2/2\n"
       "harvest_stride = " << c.gen.harvest_stride << "       # one dataset entry per this many steps\n"
       "\n"
       "# ---- dataset cleaning ----\n"
       "d = " << c.clean.d << "                  # neighbourhood radius in query space\n"
       "k_max = " << c.clean.k_max << "              # consecutive misses before stopping\n"
       "\n"
       "# ---- k-NN surrogate ----\n"
       "k = " << c.surrogate.k << "                     # neighbours for cost/steering/validity\n"
       "cost_floor = " << detail::format_double(c.surrogate.cost_floor) << "       # predicted cost saturation bounds\n"
       "cost_ceiling = " << detail::format_double(c.surrogate.cost_ceiling) << "\n"
       "validity_percentile = " << c.surrogate.validity_percentile << "  # threshold calibration over training sums\n"
       "validity_scale = " << c.surrogate.validity_scale << "\n"
       "validity_threshold = 0   # > 0 overrides the calibration\n"
       "\n"
       "# ---- planner ----\n"
       "x_init_theta = " << detail::format_double(c.planner.x_init.theta) << "  # stable equilibrium\n"
       "x_init_omega = " << detail::format_double(c.planner.x_init.omega) << "\n"
       "x_goal_theta = " << detail::format_double(c.planner.x_goal.theta) << "   # upright equilibrium\n"
       "x_goal_omega = " << detail::format_double(c.planner.x_goal.omega) << "\n"
       "goal_radius = " << c.planner.goal_radius << "\n"
       "goal_bias = " << c.planner.goal_bias << "\n"
       "sigma = " << detail::format_double(c.planner.sigma) << "   # steering noise (pi/4)\n"
       "sigma_goal = " << detail::format_double(c.planner.sigma_goal) << "  # ... when the target is the goal (pi/2)\n"
       "max_nodes = " << c.planner.max_nodes << "\n"
       "max_iterations = " << c.planner.max_iterations << "\n"
       "quantum = " << c.planner.quantum << "  # steering parameters round to this grid\n"
       "\n"
       "# ---- benchmark ----\n"
       "epochs = " << c.n_epochs << "\n"
       "runs_per_epoch = " << c.runs_per_epoch << "\n"
       "holdout_fraction = " << c.holdout_fraction << "  # simulations held out for steering scoring\n";
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace kinorrt
