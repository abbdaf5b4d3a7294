#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "kinorrt/dynamics.hpp"
#include "kinorrt/rng.hpp"
#include "kinorrt/types.hpp"

namespace kinorrt {

struct GenConfig {
  std::uint64_t n_sims = 40000;
  double dt = 0.01;
  double cost_cap = 2.0;
  double state_cap = 1.5;
  Interval theta_range{-1.5 * M_PI, 0.5 * M_PI};
  Interval omega_range{-M_PI, M_PI};
  Interval phi_range{-0.5 * M_PI, 1.5 * M_PI};
  CostWeight w{1.0};
  int harvest_stride = 10;  // one entry per this many integration steps
  std::uint64_t seed = 0;
  unsigned jobs = 1;  // worker fan-out; the output is invariant to it

  void validate() const {
    if (n_sims == 0) throw std::invalid_argument("gen: n_sims must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("gen: dt must be positive");
    if (!(cost_cap > 0.0) || !(state_cap > 0.0)) {
      throw std::invalid_argument("gen: caps must be positive");
    }
    if (!theta_range.valid() || !omega_range.valid() || !phi_range.valid()) {
      throw std::invalid_argument("gen: sampling ranges must be non-empty intervals");
    }
    if (!(w.w > 0.0)) throw std::invalid_argument("gen: cost weight must be positive");
    if (harvest_stride < 1) throw std::invalid_argument("gen: harvest_stride must be >= 1");
  }
};

class EmptyDatasetError : public std::runtime_error {
 public:
  explicit EmptyDatasetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Initial costate satisfying the free-final-time constraint H*(x0, lam) = 0,
// parametrized by the angle phi:
//
//   lam_theta = tan(phi)
//   lam_omega = sin(theta0) + sign(cos(phi)) * sqrt(sin(theta0)^2 + 2w + 2 tan(phi) omega0)
//
// which is the quadratic-in-lam_omega solution of H* = 0, with the branch
// picked by the sign of cos(phi). Returns nullopt when the draw must be
// disregarded: phi at a tangent singularity, negative discriminant (complex
// root), or a root whose H* residual cannot be verified to 1e-9 in double
// precision (|tan(phi)| extreme enough that the product terms swamp the
// tolerance).
inline std::optional<Costate> sample_costate(const State& x0, double phi, CostWeight w) {
  if (!is_finite(x0) || !std::isfinite(phi)) {
    throw std::invalid_argument("sample_costate: non-finite input");
  }
  // Distance from phi to the nearest pole of tan, pi/2 + k*pi.
  const double to_pole = std::abs(std::remainder(phi - 0.5 * M_PI, M_PI));
  if (to_pole < 1e-9) return std::nullopt;

  const double t = std::tan(phi);
  const double s = std::sin(x0.theta);
  const double disc = s * s + 2.0 * w.w + 2.0 * t * x0.omega;
  if (disc < 0.0) return std::nullopt;

  const double sign = std::cos(phi) >= 0.0 ? 1.0 : -1.0;
  Costate lam{t, s + sign * std::sqrt(disc)};
  if (!is_finite(lam)) return std::nullopt;
  if (std::abs(PendulumSystem::optimal_hamiltonian(x0, lam, w)) > 1e-9) return std::nullopt;
  return lam;
}

namespace detail {

// Cost grows at least at rate w, so the cost cap fires strictly before
// cost_cap / w; a couple of spare steps absorb the triggering step itself.
inline double rollout_horizon(const GenConfig& cfg) {
  return cfg.cost_cap / cfg.w.w + 2.0 * cfg.dt;
}

inline void run_simulation(const GenConfig& cfg, std::uint32_t sim_id,
                           std::vector<DatasetEntry>& out) {
  Rng rng(derive_seed(cfg.seed, sim_id));
  State x0;
  std::optional<Costate> lam0;
  // Rejected costate draws are disregarded and redrawn; they do not count
  // as simulations. A config that can never produce a valid draw gives up
  // after the retry cap, yielding an empty simulation.
  for (int attempt = 0; attempt < 1000 && !lam0; ++attempt) {
    x0.theta = rng.uniform(cfg.theta_range.lo, cfg.theta_range.hi);
    x0.omega = rng.uniform(cfg.omega_range.lo, cfg.omega_range.hi);
    const double phi = rng.uniform(cfg.phi_range.lo, cfg.phi_range.hi);
    lam0 = sample_costate(x0, phi, cfg.w);
  }
  if (!lam0) return;

  const StopRule stop{cfg.cost_cap, cfg.state_cap};
  const Trajectory traj =
      integrate(PendulumSystem{}, x0, *lam0, rollout_horizon(cfg), cfg.dt, cfg.w, &stop);

  // Harvest every harvest_stride-th step strictly before the step that
  // triggered the stop (that one violates a cap and is discarded).
  const std::size_t last = traj.samples.size() - 1;
  const std::size_t end = traj.stopped_early ? last : last + 1;
  for (std::size_t i = cfg.harvest_stride; i < end;
       i += static_cast<std::size_t>(cfg.harvest_stride)) {
    const TrajectorySample& s = traj.samples[i];
    DatasetEntry e;
    e.x0 = x0;
    e.x1 = s.x;
    e.cost = s.running_cost;
    e.params = {lam0->lam_theta, lam0->lam_omega, s.t};
    e.sim_id = sim_id;
    out.push_back(e);
  }
}

}  // namespace detail

// Runs cfg.n_sims independent rollouts and emits the harvested segments in
// simulation order. Each simulation draws from its own seed stream derived
// from (cfg.seed, sim index), so the result is byte-identical for any jobs
// count.
inline Dataset generate_dataset(const GenConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_sims);
  std::vector<std::vector<DatasetEntry>> per_sim(n);

  unsigned jobs = cfg.jobs == 0 ? std::thread::hardware_concurrency() : cfg.jobs;
  if (jobs == 0) jobs = 1;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(n));

  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      detail::run_simulation(cfg, static_cast<std::uint32_t>(i), per_sim[i]);
    }
  } else {
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned wkr = 0; wkr < jobs; ++wkr) {
      workers.emplace_back([&, wkr] {
        for (std::size_t i = wkr; i < n; i += jobs) {
          detail::run_simulation(cfg, static_cast<std::uint32_t>(i), per_sim[i]);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  Dataset out;
  std::size_t total = 0;
  for (const auto& v : per_sim) total += v.size();
  if (total == 0) {
    throw EmptyDatasetError("generate_dataset: configuration produced no entries");
  }
  out.reserve(total);
  for (const auto& v : per_sim) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace kinorrt
