#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kinorrt/dynamics.hpp"
#include "kinorrt/rng.hpp"
#include "kinorrt/surrogate.hpp"
#include "kinorrt/types.hpp"

namespace kinorrt {

struct TreeNode {
  State state;
  std::int32_t parent = -1;  // -1 marks the root
  std::optional<SteeringParams> edge_params;
  double edge_cost = 0.0;
  double cost_to_come = 0.0;
};

using Tree = std::vector<TreeNode>;

struct PlannerConfig {
  State x_init{-M_PI, 0.0};
  State x_goal{0.0, 0.0};
  double goal_radius = 0.1;
  double goal_bias = 0.1;
  double sigma = M_PI / 4.0;       // steering-parameter noise
  double sigma_goal = M_PI / 2.0;  // used when the sampled target is the goal
  std::size_t max_nodes = 2000;
  std::size_t max_iterations = 50000;
  double quantum = 0.01;  // parameters round to this grid
  Interval theta_bounds{-1.5 * M_PI, 0.5 * M_PI};
  Interval omega_bounds{-M_PI, M_PI};
  double dt = 0.01;
  CostWeight w{1.0};
  std::uint64_t seed = 0;

  void validate() const {
    if (!is_finite(x_init) || !is_finite(x_goal)) {
      throw std::invalid_argument("planner: non-finite endpoint");
    }
    if (!(goal_radius > 0.0)) throw std::invalid_argument("planner: goal_radius must be positive");
    if (goal_bias < 0.0 || goal_bias > 1.0) {
      throw std::invalid_argument("planner: goal_bias must lie in [0, 1]");
    }
    if (!(sigma > 0.0) || !(sigma_goal > 0.0)) {
      throw std::invalid_argument("planner: sigmas must be positive");
    }
    if (!(quantum > 0.0)) throw std::invalid_argument("planner: quantum must be positive");
    if (max_nodes < 1 || max_iterations < 1) {
      throw std::invalid_argument("planner: budgets must be positive");
    }
    if (!theta_bounds.valid() || !omega_bounds.valid()) {
      throw std::invalid_argument("planner: sample bounds must be non-empty intervals");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("planner: dt must be positive");
    if (!theta_bounds.contains(x_init.theta) || !omega_bounds.contains(x_init.omega)) {
      throw std::invalid_argument("planner: x_init outside sample bounds");
    }
  }
};

struct PlanStats {
  std::size_t expansions = 0;
  std::size_t skipped_no_valid = 0;
  std::size_t diverged_expansions = 0;
  std::size_t jhat_consulted = 0;
  double jhat_min = std::numeric_limits<double>::infinity();
  double jhat_max = -std::numeric_limits<double>::infinity();
};

struct PlanResult {
  Tree tree;
  std::vector<std::size_t> path;  // node ids, root first; empty on failure
  std::size_t iterations_used = 0;
  double wall_time = 0.0;  // seconds
  bool success = false;
  PlanStats stats;
};

struct PathStep {
  State state;
  std::optional<SteeringParams> params;  // edge into this state; none at the root
};

// Goal-biased target draw: the goal itself with probability goal_bias,
// otherwise uniform over the sample bounds. was_goal reports which branch
// fired (the goal query widens the steering noise).
inline State sample_target(const PlannerConfig& cfg, Rng& rng, bool* was_goal = nullptr) {
  const bool goal = rng.uniform() < cfg.goal_bias;
  if (was_goal) *was_goal = goal;
  if (goal) return cfg.x_goal;
  return State{rng.uniform(cfg.theta_bounds.lo, cfg.theta_bounds.hi),
               rng.uniform(cfg.omega_bounds.lo, cfg.omega_bounds.hi)};
}

// Among tree nodes whose connection to x_target the model considers valid,
// the one with the lowest predicted cost-to-go; nullopt when no node
// qualifies (the planner skips that iteration). Cost ties keep the lowest
// node id.
inline std::optional<std::size_t> nearest_valid(const Tree& tree, const SurrogateModel& model,
                                                const State& x_target,
                                                PlanStats* stats = nullptr) {
  std::optional<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto ev = model.evaluate({tree[i].state, x_target});
    if (ev.summed_distance > model.validity_threshold()) continue;
    const double jhat = model.clamp_cost(ev.mean_cost);
    if (stats) {
      ++stats->jhat_consulted;
      stats->jhat_min = std::min(stats->jhat_min, jhat);
      stats->jhat_max = std::max(stats->jhat_max, jhat);
    }
    if (jhat < best_cost) {
      best_cost = jhat;
      best = i;
    }
  }
  return best;
}

// Probabilistic steering: each parameter is redrawn from a normal centred on
// the prediction, truncated to the quantized parameter domain, then snapped
// to the quantum grid. Truncating to grid points inside [lo, hi] keeps the
// rounded sample both in-domain and an exact grid multiple. t_f is floored
// at t_f_floor afterwards.
inline SteeringParams perturb_and_quantize(const SteeringParams& params, double sigma,
                                           const std::array<double, 3>& lo,
                                           const std::array<double, 3>& hi, double quantum,
                                           double t_f_floor, Rng& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("perturb: sigma must be positive");
  const std::array<double, 3> mean{params.lam_theta0, params.lam_omega0, params.t_f};
  std::array<double, 3> out{};
  for (int a = 0; a < 3; ++a) {
    const double qlo = std::ceil(lo[a] / quantum - 1e-9) * quantum;
    const double qhi = std::floor(hi[a] / quantum + 1e-9) * quantum;
    double v;
    if (qlo > qhi) {
      // Domain narrower than one quantum; nothing to sample.
      v = std::min(std::max(mean[a], lo[a]), hi[a]);
    } else {
      v = rng.truncated_normal(mean[a], sigma, qlo, qhi);
    }
    out[a] = std::round(v / quantum) * quantum;
  }
  out[2] = std::max(out[2], t_f_floor);
  return {out[0], out[1], out[2]};
}

// Grows the tree by integrating the steering parameters from the given node
// (no caps: an edge is whatever the parameters produce). Returns the new
// node id, or nullopt when the integration diverges and the expansion is
// discarded.
inline std::optional<std::size_t> expand(Tree& tree, std::size_t from, const SteeringParams& params,
                                         const PlannerConfig& cfg) {
  if (from >= tree.size()) throw std::invalid_argument("expand: no such node");
  if (!(params.t_f > 0.0)) throw std::invalid_argument("expand: t_f must be positive");
  Trajectory traj;
  try {
    traj = integrate(PendulumSystem{}, tree[from].state,
                     Costate{params.lam_theta0, params.lam_omega0}, params.t_f, cfg.dt, cfg.w);
  } catch (const IntegrationDivergedError&) {
    return std::nullopt;
  }
  TreeNode node;
  node.state = traj.end_state();
  node.parent = static_cast<std::int32_t>(from);
  node.edge_params = params;
  node.edge_cost = traj.cost();
  node.cost_to_come = tree[from].cost_to_come + traj.cost();
  tree.push_back(node);
  return tree.size() - 1;
}

namespace detail {

inline std::vector<std::size_t> chain_to_root(const Tree& tree, std::size_t goal_id) {
  std::vector<std::size_t> path;
  std::int32_t v = static_cast<std::int32_t>(goal_id);
  while (v >= 0) {
    path.push_back(static_cast<std::size_t>(v));
    v = tree[v].parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

// The online learning-RRT loop: sample a goal-biased target, pick the
// lowest-predicted-cost valid node, steer with the perturbed quantized
// prediction, and grow the tree by integration. Succeeds when a new node
// lands within goal_radius of the goal; fails when the node or iteration
// budget runs out. Deterministic per seed.
inline PlanResult plan(const PlannerConfig& cfg, const SurrogateModel& model) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  PlanResult res;
  Rng rng(cfg.seed);
  res.tree.push_back(TreeNode{cfg.x_init, -1, std::nullopt, 0.0, 0.0});

  std::optional<std::size_t> goal_id;
  if (state_distance(cfg.x_init, cfg.x_goal) <= cfg.goal_radius) goal_id = 0;

  while (!goal_id && res.tree.size() < cfg.max_nodes &&
         res.iterations_used < cfg.max_iterations) {
    ++res.iterations_used;
    bool target_is_goal = false;
    const State target = sample_target(cfg, rng, &target_is_goal);
    const auto near = nearest_valid(res.tree, model, target, &res.stats);
    if (!near) {
      ++res.stats.skipped_no_valid;
      continue;
    }
    const SteeringParams predicted = model.predict_steering({res.tree[*near].state, target});
    const SteeringParams params = perturb_and_quantize(
        predicted, target_is_goal ? cfg.sigma_goal : cfg.sigma, model.param_domain_lo(),
        model.param_domain_hi(), cfg.quantum, cfg.dt, rng);
    const auto added = expand(res.tree, *near, params, cfg);
    if (!added) {
      ++res.stats.diverged_expansions;
      continue;
    }
    ++res.stats.expansions;
    if (state_distance(res.tree[*added].state, cfg.x_goal) <= cfg.goal_radius) {
      goal_id = added;
    }
  }

  res.success = goal_id.has_value();
  if (res.success) res.path = detail::chain_to_root(res.tree, *goal_id);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

// Parent-chain walk from the goal node, returned root-first with the edge
// parameters leading into each state (none at the root). Replaying the
// parameter sequence from the root state by integration reproduces every
// node on the path.
inline std::vector<PathStep> extract_path(const Tree& tree, std::size_t goal_id) {
  if (goal_id >= tree.size()) throw std::invalid_argument("extract_path: no such node");
  std::vector<PathStep> steps;
  for (std::size_t id : detail::chain_to_root(tree, goal_id)) {
    steps.push_back({tree[id].state, tree[id].edge_params});
  }
  return steps;
}

// Comparison heuristic: Euclidean nearest node and steering parameters drawn
// uniformly from the model's quantized parameter domain. Same tree, goal,
// and budget machinery as plan().
inline PlanResult baseline_plan(const PlannerConfig& cfg, const SurrogateModel& model) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  PlanResult res;
  Rng rng(cfg.seed);
  res.tree.push_back(TreeNode{cfg.x_init, -1, std::nullopt, 0.0, 0.0});

  const auto& lo = model.param_domain_lo();
  const auto& hi = model.param_domain_hi();
  std::array<double, 3> qlo{}, qhi{};
  std::array<std::uint64_t, 3> cells{};
  for (int a = 0; a < 3; ++a) {
    qlo[a] = std::ceil(lo[a] / cfg.quantum - 1e-9) * cfg.quantum;
    qhi[a] = std::floor(hi[a] / cfg.quantum + 1e-9) * cfg.quantum;
    cells[a] = qlo[a] > qhi[a]
                   ? 1
                   : static_cast<std::uint64_t>(std::round((qhi[a] - qlo[a]) / cfg.quantum)) + 1;
  }

  std::optional<std::size_t> goal_id;
  if (state_distance(cfg.x_init, cfg.x_goal) <= cfg.goal_radius) goal_id = 0;

  while (!goal_id && res.tree.size() < cfg.max_nodes &&
         res.iterations_used < cfg.max_iterations) {
    ++res.iterations_used;
    const State target = sample_target(cfg, rng);
    std::size_t near = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.tree.size(); ++i) {
      const double d = state_distance(res.tree[i].state, target);
      if (d < best) {
        best = d;
        near = i;
      }
    }
    SteeringParams params{qlo[0] + static_cast<double>(rng.uniform_below(cells[0])) * cfg.quantum,
                          qlo[1] + static_cast<double>(rng.uniform_below(cells[1])) * cfg.quantum,
                          qlo[2] + static_cast<double>(rng.uniform_below(cells[2])) * cfg.quantum};
    params.t_f = std::max(params.t_f, cfg.dt);
    const auto added = expand(res.tree, near, params, cfg);
    if (!added) {
      ++res.stats.diverged_expansions;
      continue;
    }
    ++res.stats.expansions;
    if (state_distance(res.tree[*added].state, cfg.x_goal) <= cfg.goal_radius) goal_id = added;
  }

  res.success = goal_id.has_value();
  if (res.success) res.path = detail::chain_to_root(res.tree, *goal_id);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace kinorrt
