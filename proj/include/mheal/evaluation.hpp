#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mheal/common.hpp"

namespace mheal::evaluation {

/// KL offsets used for the two image benchmarks.
inline constexpr double kBetaMnist = 0.552;
inline constexpr double kBetaFashionMnist = 0.352;
inline constexpr Index kDefaultBins = 32;

struct MatchReport {
  double kl = 0.0;
  double mmd = 0.0;
  double mmd_mu = 0.0;
  double beta = 0.0;
  Index n = 0;  // full set size
  Index m = 0;  // subset size
  Index bins = kDefaultBins;
};

/// Compares subsets against a fixed full set. Construction precomputes the
/// full-set pieces (histogram, mean, mean pairwise distance) so budget sweeps
/// only pay for the subset terms.
///
/// kl:     sum_i X(i) log(X(i) / (X'(i) + beta)), where X is the per-feature
///         histogram (features min-max scaled by the full set, `bins` bins on
///         [0, 1]) averaged over features. Empty full-set bins contribute 0.
/// mmd:    |mean_{ff} |x - x'| - 2 mean_{fs} |x - x'| + mean_{ss} |x - x'||^(1/2)
/// mmd_mu: |mean(full) - mean(subset)|
class DistributionMatcher {
 public:
  explicit DistributionMatcher(PointSet full, Index bins = kDefaultBins);

  MatchReport evaluate(const PointSet& subset, double beta) const;
  MatchReport evaluate_rows(std::span<const Index> rows, double beta) const;

  const PointSet& full() const noexcept { return full_; }

 private:
  std::vector<double> histogram(const PointSet& points) const;

  PointSet full_;
  Index bins_;
  Vector lo_;
  Vector hi_;
  std::vector<double> full_hist_;
  Vector full_mean_;
  double full_self_sum_ = 0.0;
};

MatchReport match_losses(const PointSet& full, const PointSet& subset, double beta,
                         Index bins = kDefaultBins);

enum class EnergyDirection { HighEnergy, LowEnergy };

struct BoundaryPartition {
  std::vector<Index> in_version_space;   // ascending
  std::vector<Index> out_version_space;  // ascending
  std::vector<double> scores;            // per point
  Index knn_k = 0;
  double fraction = 0.0;
  Warnings warnings;
};

inline constexpr Index kDefaultKnn = 5;
inline constexpr double kDefaultBoundaryFraction = 0.30;

/// Scores each point by sum_{j in kNN(i)} log(1 / |x_i - x_j|) and puts the
/// round(fraction * n) highest (HighEnergy) or lowest (LowEnergy) scorers in
/// the version-space side. Score ties rank the lower index first.
BoundaryPartition boundary_partition(const PointSet& points, Index knn_k = kDefaultKnn,
                                     double fraction = kDefaultBoundaryFraction,
                                     EnergyDirection direction = EnergyDirection::HighEnergy);

enum class SelectionMethod {
  L0MaxMin,    // farthest-point from a seeded random start
  L1Swap,      // 1-swap local search on the s = 1 energy
  L2Gradient,  // s = 2 descent from a seeded subset, snapped back to the pool
  Random,      // uniform without replacement
};

SelectionMethod parse_selection_method(std::string_view name);
std::string_view to_string(SelectionMethod method);

/// Picks `budget` distinct pool rows with the given strategy.
std::vector<Index> select_subset(SelectionMethod method, const UnitPointSet& pool, Index budget,
                                 std::uint64_t seed);

}  // namespace mheal::evaluation
