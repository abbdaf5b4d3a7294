#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kinorrt/cleaning.hpp"
#include "kinorrt/datagen.hpp"
#include "kinorrt/io.hpp"
#include "kinorrt/planner.hpp"
#include "kinorrt/surrogate.hpp"

namespace kinorrt {

struct ExperimentConfig {
  std::size_t n_epochs = 10;
  std::size_t runs_per_epoch = 300;
  GenConfig gen;
  CleanConfig clean;
  SurrogateConfig surrogate;
  PlannerConfig planner;
  double holdout_fraction = 0.05;  // of simulations, split by sim id
  std::uint64_t master_seed = 0;
  unsigned jobs = 0;  // 0 = hardware concurrency

  void validate() const {
    if (n_epochs < 1 || runs_per_epoch < 1) {
      throw std::invalid_argument("experiment: epochs and runs must be positive");
    }
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
      throw std::invalid_argument("experiment: holdout_fraction must lie in [0, 1)");
    }
    gen.validate();
    clean.validate();
    surrogate.validate();
    planner.validate();
  }
};

struct RunRecord {
  std::size_t epoch = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::size_t nodes = 0;
  std::size_t iterations = 0;
  double plan_seconds = 0.0;
  double path_cost = 0.0;  // cost-to-come of the goal node; 0 on failure
};

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct EpochStats {
  std::size_t epoch = 0;
  std::size_t raw_entries = 0;
  std::size_t clean_entries = 0;
  std::size_t held_entries = 0;
  double offline_seconds = 0.0;  // generate + clean + model build
  double steering_error_median = 0.0;
  std::size_t n_runs = 0;
  std::size_t n_success = 0;
  double success_rate = 0.0;
  Quartiles nodes;         // over all runs
  Quartiles plan_seconds;  // over successful runs
};

struct MetricsReport {
  std::vector<EpochStats> epochs;
  std::vector<RunRecord> runs;
  double success_rate = 0.0;
  Quartiles nodes;
  Quartiles plan_seconds;
  double steering_error_median = 0.0;  // median of the per-epoch medians
  double total_offline_seconds = 0.0;
};

namespace detail {

inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto i0 = static_cast<std::size_t>(pos);
  const std::size_t i1 = std::min(i0 + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(i0);
  return (1.0 - frac) * v[i0] + frac * v[i1];
}

inline Quartiles quartiles(const std::vector<double>& v) {
  return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
}

inline double median(const std::vector<double>& v) { return quantile(v, 0.5); }

inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace detail

// Splits a dataset by simulation id so no trajectory contributes to both
// sides. Each simulation lands in the holdout with probability `fraction`,
// decided by a hash of (seed, sim id).
inline std::pair<Dataset, Dataset> split_holdout(const Dataset& data, double fraction,
                                                 std::uint64_t seed) {
  const auto threshold =
      static_cast<std::uint64_t>(fraction * 18446744073709551616.0 /* 2^64 */);
  Dataset train, held;
  for (const DatasetEntry& e : data) {
    if (derive_seed(seed, e.sim_id) < threshold) {
      held.push_back(e);
    } else {
      train.push_back(e);
    }
  }
  return {std::move(train), std::move(held)};
}

// Median squared endpoint error of the steering predictor over a held-out
// set: integrate each query's unperturbed, unquantized prediction and
// measure how far from the recorded endpoint it lands.
inline double steering_error(const SurrogateModel& model, const Dataset& held_out,
                             double dt = 0.01, CostWeight w = {1.0}, unsigned jobs = 1) {
  if (held_out.empty()) throw std::invalid_argument("steering_error: empty held-out set");
  std::vector<double> errs(held_out.size());
  detail::parallel_for(held_out.size(), jobs, [&](std::size_t i) {
    const DatasetEntry& e = held_out[i];
    const SteeringParams p = model.predict_steering({e.x0, e.x1});
    const auto traj =
        integrate(PendulumSystem{}, e.x0, Costate{p.lam_theta0, p.lam_omega0}, p.t_f, dt, w);
    const double dth = traj.end_state().theta - e.x1.theta;
    const double dom = traj.end_state().omega - e.x1.omega;
    errs[i] = dth * dth + dom * dom;
  });
  return detail::median(errs);
}

struct EpochArtifacts {
  EpochStats stats;
  std::vector<RunRecord> records;
  PlanResult sample_run;  // first successful run of the epoch, for tree dumps
  bool has_sample_run = false;
};

namespace detail {

inline EpochStats summarize_epoch(std::size_t epoch, const std::vector<RunRecord>& records) {
  EpochStats st;
  st.epoch = epoch;
  st.n_runs = records.size();
  std::vector<double> nodes, times;
  for (const RunRecord& r : records) {
    nodes.push_back(static_cast<double>(r.nodes));
    if (r.success) {
      ++st.n_success;
      times.push_back(r.plan_seconds);
    }
  }
  st.success_rate = records.empty()
                        ? 0.0
                        : static_cast<double>(st.n_success) / static_cast<double>(records.size());
  st.nodes = quartiles(nodes);
  st.plan_seconds = quartiles(times);
  return st;
}

}  // namespace detail

// One epoch of the full pipeline: generate, clean, build the model, score
// steering on the held-out split, then run the seeded planner epochs.
inline EpochArtifacts run_epoch(const ExperimentConfig& cfg, std::size_t epoch) {
  EpochArtifacts art;
  const auto t0 = std::chrono::steady_clock::now();

  GenConfig gen = cfg.gen;
  gen.seed = derive_seed(cfg.master_seed, epoch * 4 + 1);
  gen.jobs = cfg.jobs;
  const Dataset raw = generate_dataset(gen);

  auto [train_raw, held] = split_holdout(raw, cfg.holdout_fraction,
                                         derive_seed(cfg.master_seed, epoch * 4 + 2));
  if (train_raw.empty()) throw std::runtime_error("run_epoch: empty training split");

  CleanConfig clean = cfg.clean;
  clean.seed = derive_seed(cfg.master_seed, epoch * 4 + 3);
  const Dataset cleaned = clean_dataset(train_raw, clean);

  SurrogateModel model(cleaned, cfg.surrogate);
  const auto t1 = std::chrono::steady_clock::now();

  art.stats.epoch = epoch;
  art.stats.raw_entries = raw.size();
  art.stats.clean_entries = cleaned.size();
  art.stats.held_entries = held.size();
  art.stats.offline_seconds = std::chrono::duration<double>(t1 - t0).count();
  art.stats.steering_error_median =
      held.empty() ? 0.0 : steering_error(model, held, cfg.planner.dt, cfg.planner.w, cfg.jobs);

  art.records.resize(cfg.runs_per_epoch);
  std::vector<PlanResult> results(cfg.runs_per_epoch);
  detail::parallel_for(cfg.runs_per_epoch, cfg.jobs, [&](std::size_t r) {
    PlannerConfig pc = cfg.planner;
    pc.seed = derive_seed(cfg.master_seed, 1000000 + epoch * cfg.runs_per_epoch + r);
    results[r] = plan(pc, model);
    RunRecord rec;
    rec.epoch = epoch;
    rec.run = r;
    rec.seed = pc.seed;
    rec.success = results[r].success;
    rec.nodes = results[r].tree.size();
    rec.iterations = results[r].iterations_used;
    rec.plan_seconds = results[r].wall_time;
    rec.path_cost = results[r].success ? results[r].tree[results[r].path.back()].cost_to_come : 0.0;
    art.records[r] = rec;
  });

  for (std::size_t r = 0; r < results.size(); ++r) {
    if (results[r].success) {
      art.sample_run = std::move(results[r]);
      art.has_sample_run = true;
      break;
    }
  }

  const auto epoch_stats = detail::summarize_epoch(epoch, art.records);
  art.stats.n_runs = epoch_stats.n_runs;
  art.stats.n_success = epoch_stats.n_success;
  art.stats.success_rate = epoch_stats.success_rate;
  art.stats.nodes = epoch_stats.nodes;
  art.stats.plan_seconds = epoch_stats.plan_seconds;
  return art;
}

// Pools per-run records into the report; regeneration from the same records
// is deterministic.
inline MetricsReport summarize(const std::vector<EpochStats>& epochs,
                               const std::vector<RunRecord>& runs) {
  MetricsReport rep;
  rep.epochs = epochs;
  rep.runs = runs;
  std::vector<double> nodes, times, steering;
  std::size_t n_success = 0;
  for (const RunRecord& r : runs) {
    nodes.push_back(static_cast<double>(r.nodes));
    if (r.success) {
      ++n_success;
      times.push_back(r.plan_seconds);
    }
  }
  rep.success_rate =
      runs.empty() ? 0.0 : static_cast<double>(n_success) / static_cast<double>(runs.size());
  rep.nodes = detail::quartiles(nodes);
  rep.plan_seconds = detail::quartiles(times);
  for (const EpochStats& e : epochs) {
    steering.push_back(e.steering_error_median);
    rep.total_offline_seconds += e.offline_seconds;
  }
  rep.steering_error_median = detail::median(steering);
  return rep;
}

struct ExperimentResult {
  MetricsReport report;
  std::vector<PlanResult> sample_runs;  // one per epoch that had a success
  std::vector<std::size_t> sample_run_epochs;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult out;
  std::vector<EpochStats> epochs;
  std::vector<RunRecord> runs;
  for (std::size_t e = 0; e < cfg.n_epochs; ++e) {
    EpochArtifacts art = run_epoch(cfg, e);
    epochs.push_back(art.stats);
    runs.insert(runs.end(), art.records.begin(), art.records.end());
    if (art.has_sample_run) {
      out.sample_runs.push_back(std::move(art.sample_run));
      out.sample_run_epochs.push_back(e);
    }
  }
  out.report = summarize(epochs, runs);
  return out;
}

}  // namespace kinorrt
