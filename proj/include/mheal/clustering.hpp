#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mheal/common.hpp"

namespace mheal::clustering {

struct ClusterModel {
  Matrix centers;                 // k x d, unit rows
  std::vector<Index> assignments;  // per point, in [0, k)
  double objective = 0.0;          // sum_i (1 - cos(c_a(i), x_i))
  Index iterations_run = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  /// Objective after every assignment half-step and every update half-step,
  /// in order. Non-increasing.
  std::vector<double> objective_trace;
  Index reseeds = 0;

  Index k() const noexcept { return centers.rows(); }
  std::vector<Index> members(Index cluster) const;
};

inline constexpr Index kDefaultMaxIters = 60;

/// Lloyd iterations on the sphere: assign by maximal cosine (ties to the
/// lowest cluster), then set each center to its renormalized member sum.
/// Stops once assignments repeat or after `max_iters` rounds. An empty
/// cluster is reseeded at the point farthest (in 1 - cos) from its center.
ClusterModel spherical_kmeans(const UnitPointSet& points, Index k,
                              Index max_iters = kDefaultMaxIters, std::uint64_t seed = 0);

/// sum_i (1 - <c_a(i), x_i>) for unit centers and points.
double cosine_objective(const UnitPointSet& points, const Matrix& centers,
                        std::span<const Index> assignments);

/// Number of distinct rows (exact comparison).
Index count_distinct_rows(const Matrix& rows);

/// Accuracy of `assignments` against `labels` under the best one-to-one
/// matching of clusters to labels (Hungarian assignment).
double matched_accuracy(std::span<const Index> assignments, std::span<const Index> labels);

}  // namespace mheal::clustering
