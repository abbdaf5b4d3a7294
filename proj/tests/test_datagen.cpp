#include "kinorrt/datagen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"

using namespace kinorrt;

namespace {

constexpr CostWeight kW{1.0};

GenConfig tiny_config() {
  GenConfig cfg;
  cfg.n_sims = 50;
  cfg.seed = 99;
  return cfg;
}

TEST(SampleCostate, MatchesQuadraticRootOracle) {
  // phi = 0 at theta = 0: lam = (0, sqrt(2)).
  const auto a = sample_costate({0.0, 0.7}, 0.0, kW);
  ASSERT_TRUE(a.has_value());
  EXPECT_DOUBLE_EQ(a->lam_theta, 0.0);
  EXPECT_NEAR(a->lam_omega, std::sqrt(2.0), 1e-12);

  // phi = 0 at theta = pi/2: lam = (0, 1 + sqrt(3)).
  const auto b = sample_costate({M_PI / 2.0, 0.0}, 0.0, kW);
  ASSERT_TRUE(b.has_value());
  EXPECT_NEAR(b->lam_omega, 1.0 + std::sqrt(3.0), 1e-12);

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const State x{rng.uniform(-1.5 * M_PI, 0.5 * M_PI), rng.uniform(-M_PI, M_PI)};
    const double phi = rng.uniform(-0.5 * M_PI, 1.5 * M_PI);
    const auto lam = sample_costate(x, phi, kW);
    const auto ref = oracles::costate_root(x.theta, x.omega, phi, 1.0);
    if (!lam) continue;
    ASSERT_TRUE(ref.has_value());
    EXPECT_NEAR(lam->lam_theta, ref->first, 1e-9 * std::max(1.0, std::abs(ref->first)));
    EXPECT_NEAR(lam->lam_omega, ref->second, 1e-9 * std::max(1.0, std::abs(ref->second)));
  }
}

TEST(SampleCostate, SatisfiesConstraintToTolerance) {
  Rng rng(17);
  int accepted = 0;
  while (accepted < 1000) {
    const State x{rng.uniform(-1.5 * M_PI, 0.5 * M_PI), rng.uniform(-M_PI, M_PI)};
    const auto lam = sample_costate(x, rng.uniform(-0.5 * M_PI, 1.5 * M_PI), kW);
    if (!lam) continue;
    ++accepted;
    EXPECT_LE(std::abs(PendulumSystem::optimal_hamiltonian(x, *lam, kW)), 1e-9);
  }
}

TEST(SampleCostate, RejectsNegativeDiscriminant) {
  // tan(0.8) ~ 1.03, discriminant = 2 - 6.18 < 0.
  EXPECT_FALSE(sample_costate({0.0, -3.0}, 0.8, kW).has_value());
}

TEST(SampleCostate, RejectsTangentSingularity) {
  EXPECT_FALSE(sample_costate({0.0, 0.0}, M_PI / 2.0, kW).has_value());
  EXPECT_FALSE(sample_costate({0.0, 0.0}, M_PI / 2.0 + 5e-10, kW).has_value());
  EXPECT_FALSE(sample_costate({0.0, 0.0}, -M_PI / 2.0, kW).has_value());
  EXPECT_FALSE(sample_costate({0.0, 0.0}, 1.5 * M_PI, kW).has_value());
  EXPECT_TRUE(sample_costate({0.0, 0.0}, 0.3, kW).has_value());
}

TEST(GenerateDataset, SingleForcedSimulationMatchesDirectIntegration) {
  GenConfig cfg;
  cfg.n_sims = 1;
  cfg.theta_range = {0.0, 0.0};
  cfg.omega_range = {0.0, 0.0};
  cfg.phi_range = {0.0, 0.0};
  cfg.seed = 1;
  const Dataset data = generate_dataset(cfg);
  ASSERT_FALSE(data.empty());

  // All entries share x0 = (0,0) and lam0 = (0, sqrt(2)); t_f walks the
  // harvest grid; the rollout halts before cost exceeds 2.
  for (std::size_t i = 0; i < data.size(); ++i) {
    const DatasetEntry& e = data[i];
    EXPECT_DOUBLE_EQ(e.x0.theta, 0.0);
    EXPECT_DOUBLE_EQ(e.x0.omega, 0.0);
    EXPECT_DOUBLE_EQ(e.params.lam_theta0, 0.0);
    EXPECT_NEAR(e.params.lam_omega0, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(e.params.t_f, 0.1 * static_cast<double>(i + 1), 1e-9);
    EXPECT_LE(e.cost, cfg.cost_cap);
    EXPECT_LE(state_distance(e.x0, e.x1), cfg.state_cap);
    const oracles::Aug ref =
        oracles::ref_integrate(0.0, 0.0, 0.0, std::sqrt(2.0), e.params.t_f, cfg.dt, 1.0);
    EXPECT_NEAR(e.x1.theta, ref[0], 1e-9);
    EXPECT_NEAR(e.x1.omega, ref[1], 1e-9);
    EXPECT_NEAR(e.cost, ref[4], 1e-9);
    if (i > 0) EXPECT_GE(e.cost, data[i - 1].cost);
  }
}

TEST(GenerateDataset, ReplayIdentity) {
  const Dataset data = generate_dataset(tiny_config());
  ASSERT_FALSE(data.empty());
  for (const DatasetEntry& e : data) {
    const Trajectory traj = integrate(e.x0, {e.params.lam_theta0, e.params.lam_omega0},
                                      e.params.t_f, 0.01, kW);
    EXPECT_NEAR(traj.end_state().theta, e.x1.theta, 1e-9);
    EXPECT_NEAR(traj.end_state().omega, e.x1.omega, 1e-9);
    EXPECT_NEAR(traj.cost(), e.cost, 1e-9);
  }
}

TEST(GenerateDataset, ConstraintAndCapInvariants) {
  GenConfig cfg = tiny_config();
  cfg.n_sims = 300;
  const Dataset data = generate_dataset(cfg);
  for (const DatasetEntry& e : data) {
    EXPECT_LE(std::abs(PendulumSystem::optimal_hamiltonian(
                  e.x0, {e.params.lam_theta0, e.params.lam_omega0}, kW)),
              1e-9);
    EXPECT_GE(e.cost, 0.0);
    EXPECT_LE(e.cost, cfg.cost_cap);
    EXPECT_LE(state_distance(e.x0, e.x1), cfg.state_cap);
    EXPECT_GE(e.params.t_f, cfg.dt);
  }
}

TEST(GenerateDataset, MonotoneHarvestPerSimulation) {
  GenConfig cfg = tiny_config();
  cfg.n_sims = 200;
  const Dataset data = generate_dataset(cfg);
  std::map<std::uint32_t, const DatasetEntry*> last;
  for (const DatasetEntry& e : data) {
    const auto it = last.find(e.sim_id);
    if (it != last.end()) {
      EXPECT_GT(e.params.t_f, it->second->params.t_f);
      EXPECT_GE(e.cost, it->second->cost);
    }
    last[e.sim_id] = &e;
  }
}

TEST(GenerateDataset, DeterministicAndWorkerCountInvariant) {
  GenConfig cfg = tiny_config();
  cfg.n_sims = 200;
  const Dataset a = generate_dataset(cfg);
  const Dataset b = generate_dataset(cfg);
  GenConfig par = cfg;
  par.jobs = 4;
  const Dataset c = generate_dataset(par);
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.size(), c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sim_id, b[i].sim_id);
    EXPECT_EQ(a[i].x1.theta, b[i].x1.theta);
    EXPECT_EQ(a[i].x1.theta, c[i].x1.theta);
    EXPECT_EQ(a[i].cost, c[i].cost);
    EXPECT_EQ(a[i].params.t_f, c[i].params.t_f);
  }
}

TEST(GenerateDataset, EmptyDatasetRaises) {
  // Cost cap below one step of running cost: every rollout stops at step 1,
  // before the first harvest point.
  GenConfig cfg = tiny_config();
  cfg.cost_cap = 1e-4;
  EXPECT_THROW(generate_dataset(cfg), EmptyDatasetError);

  // A phi range pinned at the tangent pole can never produce a costate.
  GenConfig pole = tiny_config();
  pole.n_sims = 3;
  pole.phi_range = {M_PI / 2.0, M_PI / 2.0};
  EXPECT_THROW(generate_dataset(pole), EmptyDatasetError);
}

TEST(GenerateDataset, ValidatesConfig) {
  GenConfig cfg;
  cfg.n_sims = 0;
  EXPECT_THROW(generate_dataset(cfg), std::invalid_argument);
  cfg = GenConfig{};
  cfg.harvest_stride = 0;
  EXPECT_THROW(generate_dataset(cfg), std::invalid_argument);
  cfg = GenConfig{};
  cfg.theta_range = {1.0, -1.0};
  EXPECT_THROW(generate_dataset(cfg), std::invalid_argument);
}

}  // namespace
