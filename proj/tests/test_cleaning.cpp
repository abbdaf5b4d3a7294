#include "kinorrt/cleaning.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kinorrt/rng.hpp"
#include "oracles.hpp"

using namespace kinorrt;

namespace {

DatasetEntry entry_at(const Query& q, double cost, std::uint32_t sim = 0) {
  DatasetEntry e;
  e.x0 = q.x0;
  e.x1 = q.x1;
  e.cost = cost;
  e.sim_id = sim;
  return e;
}

// 1-D synthetic benchmark embedded in query space: queries at (s, 0, 0, 0)
// so distances reduce to |s - s'|. A dense grid carries the analytic lower
// envelope; a cluster of higher-cost points sits over the middle region.
struct Synthetic {
  Dataset data;
  double lipschitz = 0.3;
  double envelope(double s) const { return 0.5 + lipschitz * s; }

  Synthetic() {
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      data.push_back(entry_at({{s, 0.0}, {0.0, 0.0}}, envelope(s)));
    }
    Rng rng(2024);
    for (int i = 0; i < 120; ++i) {
      const double s = rng.uniform(0.4, 0.6);
      data.push_back(entry_at({{s, 0.0}, {0.0, 0.0}}, envelope(s) + 0.5 + rng.uniform(0.0, 0.2)));
    }
  }

  double s_of(const DatasetEntry& e) const { return e.x0.theta; }
  bool is_cluster(const DatasetEntry& e) const { return e.cost > envelope(s_of(e)) + 0.25; }
};

double nearest_retained_cost(const Dataset& d, double s) {
  double best = std::numeric_limits<double>::infinity();
  double best_cost = 0.0;
  for (const DatasetEntry& e : d) {
    const double dist = std::abs(e.x0.theta - s);
    if (dist < best) {
      best = dist;
      best_cost = e.cost;
    }
  }
  return best_cost;
}

TEST(QueryDistance, KnownValues) {
  const auto a = entry_at({{1.0, 2.0}, {3.0, 4.0}}, 1.0);
  const auto b = entry_at({{1.0, 2.0}, {3.0, 4.0}}, 7.0);
  EXPECT_DOUBLE_EQ(query_distance(a, b), 0.0);

  const auto c = entry_at({{0.0, 0.0}, {1.0, 0.0}}, 1.0);
  const auto d = entry_at({{0.0, 0.0}, {0.0, 0.0}}, 1.0);
  EXPECT_DOUBLE_EQ(query_distance(c, d), 1.0);

  const auto e = entry_at({{0.0, 0.0}, {3.0, 4.0}}, 1.0);
  EXPECT_DOUBLE_EQ(query_distance(e, d), 5.0);
}

TEST(CleanDataset, DuplicateQueryKeepsLowerCost) {
  Dataset data;
  data.push_back(entry_at({{0.1, 0.2}, {0.3, 0.4}}, 2.0));
  data.push_back(entry_at({{0.1, 0.2}, {0.3, 0.4}}, 1.0));
  CleanConfig cfg;
  cfg.exhaustive = true;
  const Dataset out = clean_dataset(data, cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].cost, 1.0);
}

TEST(CleanDataset, FarApartEntriesAllSurvive) {
  Dataset data;
  data.push_back(entry_at({{0.0, 0.0}, {0.0, 0.0}}, 3.0));
  data.push_back(entry_at({{1.0, 0.0}, {0.0, 0.0}}, 2.0));
  data.push_back(entry_at({{2.0, 0.0}, {0.0, 0.0}}, 1.0));
  CleanConfig cfg;
  cfg.exhaustive = true;
  EXPECT_EQ(clean_dataset(data, cfg).size(), 3u);
}

TEST(CleanDataset, WorstCaseLeavesSingleLowestEntry) {
  Dataset data;
  for (int i = 0; i < 20; ++i) {
    data.push_back(entry_at({{0.0, 0.0}, {0.0, 0.0}}, 1.0 + i));
  }
  CleanConfig cfg;
  cfg.d = 10.0;
  cfg.exhaustive = true;
  const Dataset out = clean_dataset(data, cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].cost, 1.0);
}

TEST(CleanDataset, ExhaustiveMatchesBruteForceOracle) {
  Rng rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    Dataset data;
    const int n = 120;
    for (int i = 0; i < n; ++i) {
      Query q{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
              {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
      data.push_back(entry_at(q, rng.uniform(0.0, 2.0)));
      // Seed some duplicates so tie handling is exercised.
      if (i % 7 == 0) data.push_back(entry_at(q, rng.uniform(0.0, 2.0)));
    }
    CleanConfig cfg;
    cfg.d = 0.35;
    cfg.exhaustive = true;
    const Dataset out = clean_dataset(data, cfg);
    const std::vector<bool> oracle = oracles::brute_exhaustive_clean(data, cfg.d);
    Dataset expected;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (oracle[i]) expected.push_back(data[i]);
    }
    ASSERT_EQ(out.size(), expected.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_EQ(out[i].cost, expected[i].cost);
      EXPECT_EQ(query_distance(out[i], expected[i]), 0.0);
    }
  }
}

TEST(CleanDataset, ExhaustiveSeparationAndSubset) {
  Synthetic syn;
  CleanConfig cfg;
  cfg.d = 0.05;
  cfg.exhaustive = true;
  const Dataset out = clean_dataset(syn.data, cfg);
  ASSERT_GT(out.size(), 1u);
  // Separation: no two retained entries within d.
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      EXPECT_GE(query_distance(out[i], out[j]), cfg.d);
    }
  }
  // Subset: every output is a verbatim input member.
  for (const DatasetEntry& e : out) {
    const bool found = std::any_of(syn.data.begin(), syn.data.end(), [&](const DatasetEntry& x) {
      return x.cost == e.cost && query_distance(x, e) == 0.0;
    });
    EXPECT_TRUE(found);
  }
}

TEST(CleanDataset, SyntheticEnvelopeIsRecovered) {
  Synthetic syn;
  CleanConfig cfg;
  cfg.d = 0.05;
  cfg.exhaustive = true;
  const Dataset exhaustive = clean_dataset(syn.data, cfg);
  for (const DatasetEntry& e : exhaustive) {
    EXPECT_FALSE(syn.is_cluster(e)) << "biased cluster point survived exhaustive cleaning";
    EXPECT_NEAR(e.cost, syn.envelope(syn.s_of(e)), 1e-12);
  }

  // Stochastic mode reaches the same envelope within the Lipschitz band.
  CleanConfig st;
  st.d = 0.05;
  st.k_max = 5000;
  st.seed = 7;
  const Dataset stochastic = clean_dataset(syn.data, st);
  for (const DatasetEntry& e : stochastic) {
    EXPECT_FALSE(syn.is_cluster(e)) << "biased cluster point survived stochastic cleaning";
  }
  const double band = 2.0 * syn.lipschitz * 2.0 * st.d;  // slope over a 2d retained gap, each mode
  for (int i = 0; i <= 100; ++i) {
    const double s = static_cast<double>(i) / 100.0;
    EXPECT_NEAR(nearest_retained_cost(stochastic, s), nearest_retained_cost(exhaustive, s), band);
  }
}

TEST(CleanDataset, StochasticDeterministicPerSeed) {
  Synthetic syn;
  CleanConfig cfg;
  cfg.d = 0.05;
  cfg.k_max = 200;
  cfg.seed = 42;
  const Dataset a = clean_dataset(syn.data, cfg);
  const Dataset b = clean_dataset(syn.data, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].cost, b[i].cost);
    EXPECT_EQ(a[i].x0.theta, b[i].x0.theta);
  }
}

TEST(CleanDataset, Validation) {
  Dataset data;
  CleanConfig cfg;
  EXPECT_THROW(clean_dataset(data, cfg), std::invalid_argument);
  data.push_back(entry_at({{0, 0}, {0, 0}}, 1.0));
  cfg.d = 0.0;
  EXPECT_THROW(clean_dataset(data, cfg), std::invalid_argument);
  cfg = CleanConfig{};
  cfg.k_max = 0;
  EXPECT_THROW(clean_dataset(data, cfg), std::invalid_argument);
}

}  // namespace
