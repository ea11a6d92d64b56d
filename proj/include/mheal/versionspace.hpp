#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mheal/common.hpp"

namespace mheal::versionspace {

/// log(1 + exp(-margin)), evaluated without overflow.
double logistic_loss(double margin);

/// Random linear hypotheses h(x) = <w, x> + b with w, b ~ N(0, 1).
struct HypothesisPool {
  Matrix weights;  // H x d
  Vector biases;   // H
  std::uint64_t seed = 0;
  std::vector<char> alive;
  Index h_star = 0;  // minimum mean training loss, ties to the lowest index
  double h_star_loss = 0.0;

  Index size() const noexcept { return weights.rows(); }
  Index survivors() const;
  double loss(Index h, const Vector& x, int y) const;
};

inline constexpr Index kDefaultPoolSize = 10000;

HypothesisPool generate_pool(Index dim, Index count, const PointSet& x, std::span<const int> y,
                             std::uint64_t seed);

/// Error-disagreement threshold theta = (xi / k) / r. k = 1 gives the
/// single-region (IWAL) value.
struct ThetaSpec {
  double xi = 0.0;
  double r = 0.0;
  Index k = 1;
  double theta = 0.0;
};

ThetaSpec theta_from_params(double xi, double r, Index k);

inline constexpr double kThetaIwal = 10.0;
inline constexpr double kThetaMheal = 3.333;

struct TraceRow {
  Index t = 0;
  Index survivors = 0;
  double threshold = 0.0;
  bool queried = false;
  Index cumulative_labels = 0;
  /// Smallest surviving loss on this round's sample, after pruning.
  double best_surviving_loss = 0.0;
  Index eliminated = 0;
};

using PruningTrace = std::vector<TraceRow>;

/// One pruning round at threshold sqrt(theta0 / t): the sample is queried
/// when the survivors' losses on it spread by more than the threshold, then
/// every survivor with a larger loss is removed. h_star is never removed.
TraceRow prune_round(HypothesisPool& pool, const Vector& x, int y, Index t, double theta0,
                     Index cumulative_labels);

/// A pool being pruned round by round, plus the learner's running loss on
/// the queried samples (which picks the current hypothesis).
class PruningRun {
 public:
  PruningRun(HypothesisPool pool, double theta0);

  const TraceRow& step(const Vector& x, int y);

  /// Survivor with the smallest summed loss over queried samples.
  Index current_hypothesis() const;
  const HypothesisPool& pool() const noexcept { return pool_; }
  const PruningTrace& trace() const noexcept { return trace_; }

 private:
  HypothesisPool pool_;
  double theta0_;
  std::vector<double> queried_loss_;
  PruningTrace trace_;
};

struct StudyConfig {
  Index rounds = 500;
  double theta0_iwal = kThetaIwal;
  double theta0_mheal = kThetaMheal;
  Index k = 3;
  Index pool_size = kDefaultPoolSize;
  std::vector<std::uint64_t> seeds{0};
  /// Feed MHEAL the IWAL stream instead of its per-cluster stream.
  bool same_stream = false;
  double holdout_fraction = 0.2;
};

struct SeedRun {
  std::uint64_t seed = 0;
  PruningTrace iwal;
  PruningTrace mheal;
  std::vector<double> iwal_error;   // held-out mean loss of the current hypothesis
  std::vector<double> mheal_error;
  Index h_star = 0;
  /// In same-stream mode: whether MHEAL's survivors were a subset of IWAL's
  /// at every round.
  bool survivor_subset_every_round = true;
};

struct Curve {
  std::vector<double> iwal_mean, iwal_std, mheal_mean, mheal_std;
};

struct StudyResult {
  std::vector<SeedRun> runs;
  Curve survivors;
  Curve error;
  Curve labels;
};

/// Runs IWAL-style and MHEAL-style pruning on the same pool for each seed.
/// Labels must be +1 / -1. IWAL draws a seeded shuffle of the training split
/// (cycled); MHEAL cycles round-robin over spherical k-means clusters.
StudyResult run_study(const PointSet& x, std::span<const int> y, const StudyConfig& config);

/// Maps a two-valued label column to -1 (smaller value) / +1 (larger value).
std::vector<int> binarize_labels(std::span<const double> labels);

}  // namespace mheal::versionspace
