#include <gtest/gtest.h>

#include <random>

#include "mheal/versionspace.hpp"

using namespace mheal;
using namespace mheal::versionspace;

namespace {

struct Labelled {
  Matrix x;
  std::vector<int> y;
};

Labelled linear_data(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Labelled out{Matrix(n, d), {}};
  for (Index r = 0; r < n; ++r) {
    double s = 0.3;
    for (Index c = 0; c < d; ++c) {
      out.x(r, c) = g(rng);
      s += out.x(r, c) * (c % 2 ? -1.0 : 1.0);
    }
    out.y.push_back(s > 0 ? 1 : -1);
  }
  return out;
}

}  // namespace

TEST(Logistic, StableAtExtremes) {
  EXPECT_NEAR(logistic_loss(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(logistic_loss(800.0), 0.0, 1e-300);
  EXPECT_NEAR(logistic_loss(-800.0), 800.0, 1e-9);
}

TEST(Theta, PaperValues) {
  EXPECT_NEAR(theta_from_params(1.0, 0.1, 1).theta, 10.0, 1e-12);
  EXPECT_NEAR(theta_from_params(1.0, 0.1, 3).theta, 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(theta_from_params(1.0, 0.1, 3).theta, kThetaMheal, 5e-4);
  EXPECT_EQ(theta_from_params(0.0, 0.1, 2).theta, 0.0);
}

TEST(Pool, SingleHypothesisIsHStar) {
  const auto data = linear_data(20, 3, 1);
  EXPECT_EQ(generate_pool(3, 1, data.x, data.y, 4).h_star, 0);
}

TEST(Pool, SeededAndMinimal) {
  const auto data = linear_data(50, 3, 2);
  const auto a = generate_pool(3, 300, data.x, data.y, 8);
  const auto b = generate_pool(3, 300, data.x, data.y, 8);
  EXPECT_EQ(a.h_star, b.h_star);
  for (Index h = 0; h < a.size(); ++h) {
    double total = 0.0;
    for (Index r = 0; r < 50; ++r) total += a.loss(h, data.x.row(r).transpose(), data.y[r]);
    EXPECT_GE(total / 50.0, a.h_star_loss - 1e-12);
  }
}

TEST(Pool, EmptyData) {
  try {
    generate_pool(3, 10, Matrix(0, 3), {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyData);
  }
}

TEST(PruneRound, VacuousThresholdKeepsEveryone) {
  const auto data = linear_data(30, 2, 3);
  auto pool = generate_pool(2, 50, data.x, data.y, 1);
  // Losses on this sample are all below the t = 1 threshold for a huge theta0.
  const auto row = prune_round(pool, data.x.row(0).transpose(), data.y[0], 1, 1e6, 0);
  EXPECT_FALSE(row.queried);
  EXPECT_EQ(row.eliminated, 0);
  EXPECT_EQ(row.survivors, 50);
}

TEST(PruneRound, SingleSurvivorUnchanged) {
  const auto data = linear_data(30, 2, 3);
  auto pool = generate_pool(2, 20, data.x, data.y, 1);
  std::fill(pool.alive.begin(), pool.alive.end(), 0);
  pool.alive[pool.h_star] = 1;
  const auto row = prune_round(pool, data.x.row(1).transpose(), data.y[1], 5, 0.01, 4);
  EXPECT_FALSE(row.queried);
  EXPECT_EQ(row.survivors, 1);
  EXPECT_EQ(row.cumulative_labels, 4);
}

TEST(Study, ZeroRounds) {
  const auto data = linear_data(40, 2, 5);
  StudyConfig cfg;
  cfg.rounds = 0;
  cfg.pool_size = 50;
  const auto r = run_study(data.x, data.y, cfg);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_TRUE(r.runs[0].iwal.empty());
  EXPECT_TRUE(r.labels.iwal_mean.empty());
}

TEST(StudyProperty, TraceInvariants) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto data = linear_data(150, 3, seed);
    const auto pool = generate_pool(3, 400, data.x, data.y, seed);
    PruningRun run(pool, kThetaIwal);
    std::vector<char> prev = pool.alive;
    for (Index t = 0; t < 200; ++t) {
      const auto& row = run.step(data.x.row(t % 150).transpose(), data.y[t % 150]);
      const auto& alive = run.pool().alive;
      for (Index h = 0; h < pool.size(); ++h) EXPECT_LE(alive[h], prev[h]);
      EXPECT_TRUE(alive[pool.h_star]);
      EXPECT_LE(row.cumulative_labels, t + 1);
      EXPECT_GE(run.current_hypothesis(), 0);
      prev = alive;
    }
  }
}

TEST(StudyProperty, SameStreamMhealSurvivorsNestInIwal) {
  const auto data = linear_data(200, 4, 11);
  StudyConfig cfg;
  cfg.rounds = 150;
  cfg.pool_size = 500;
  cfg.seeds = {0, 1, 2};
  cfg.same_stream = true;
  const auto r = run_study(data.x, data.y, cfg);
  for (const auto& run : r.runs) {
    EXPECT_TRUE(run.survivor_subset_every_round);
    ASSERT_EQ(run.iwal.size(), 150u);
    for (std::size_t t = 1; t < run.iwal.size(); ++t) {
      EXPECT_LE(run.iwal[t].survivors, run.iwal[t - 1].survivors);
      EXPECT_LE(run.mheal[t].survivors, run.mheal[t - 1].survivors);
    }
  }
}

TEST(StudyProperty, CurvesAreSeedAggregates) {
  const auto data = linear_data(120, 3, 4);
  StudyConfig cfg;
  cfg.rounds = 40;
  cfg.pool_size = 200;
  cfg.seeds = {3, 4, 5};
  const auto r = run_study(data.x, data.y, cfg);
  for (Index t = 0; t < 40; ++t) {
    double sum = 0.0;
    for (const auto& run : r.runs) sum += static_cast<double>(run.iwal[t].cumulative_labels);
    EXPECT_NEAR(r.labels.iwal_mean[t], sum / 3.0, 1e-12);
  }
}

TEST(Labels, Binarize) {
  const std::vector<double> raw{0, 1, 1, 0};
  EXPECT_EQ(binarize_labels(raw), (std::vector<int>{-1, 1, 1, -1}));
  const std::vector<double> three{0, 1, 2};
  EXPECT_THROW(binarize_labels(three), Error);
}
