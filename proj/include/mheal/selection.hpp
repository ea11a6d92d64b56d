#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mheal/common.hpp"
#include "mheal/energy.hpp"

namespace mheal::selection {

/// Ordered selection W over a candidate pool plus per-candidate caches:
/// the distance to the nearest selected point and the log of the product of
/// distances to all selected points. Both are updated in O(M) per append.
class SelectionState {
 public:
  SelectionState(const UnitPointSet& pool, Index budget);

  /// A state holding only `init`.
  static SelectionState start(const UnitPointSet& pool, Index init, Index budget);

  void append(const UnitPointSet& pool, Index index);

  const std::vector<Index>& selected() const noexcept { return selected_; }
  std::span<const double> min_dist() const noexcept { return min_dist_; }
  std::span<const double> log_product() const noexcept { return log_product_; }
  bool is_selected(Index index) const { return in_set_[static_cast<std::size_t>(index)] != 0; }
  Index pool_size() const noexcept { return static_cast<Index>(min_dist_.size()); }
  Index budget() const noexcept { return budget_; }
  Index remaining() const noexcept { return pool_size() - static_cast<Index>(selected_.size()); }

  std::uint64_t distance_evals = 0;
  Warnings warnings;

 private:
  std::vector<Index> selected_;
  std::vector<double> min_dist_;
  std::vector<double> log_product_;
  std::vector<char> in_set_;
  Index budget_;
};

struct Step {
  Index index = -1;
  /// sequential_step: log prod of distances to W; maxmin_step: min distance to W.
  double score = 0.0;
};

/// Greedy l0 step: appends argmax_p prod_{w in W} |w - p| (log space).
/// Candidates coincident with a selected point score -inf and are only taken
/// when nothing else remains. Ties go to the lowest index.
Step sequential_step(const UnitPointSet& pool, SelectionState& state);

/// Farthest-point step: appends argmax_p min_{w in W} |w - p|.
Step maxmin_step(const UnitPointSet& pool, SelectionState& state);

struct Algorithm1Result {
  Index best_start = -1;
  std::vector<Index> selected;  // selection order of the winning start
  energy::EnergyValue energy;   // s = 0 over `selected`
  std::vector<double> start_log_products;  // per start, sum log |w_i - w_j|
  std::uint64_t distance_evals = 0;
  Warnings warnings;
};

/// Runs the greedy sequence from every start and keeps the start whose
/// selection has the largest pairwise-distance product. Starts within a
/// relative 1e-12 of the best are tied; the lowest index wins.
Algorithm1Result run_algorithm1(const UnitPointSet& pool, Index budget);

struct MaxMinResult {
  std::vector<Index> selected;
  std::vector<double> radii;  // min distance at selection time, from the 2nd pick on
  std::uint64_t distance_evals = 0;
};

MaxMinResult maxmin_select(const UnitPointSet& pool, Index budget, Index init);

/// The lower-bound sandwich around the l0 product when adding `candidate` to
/// a state holding N - 1 points. All quantities are logs.
struct BoundReport {
  Index n = 0;  // |W| + 1
  double candidate_min_distance = 0.0;  // min_j |w_N - w_j|
  double selected_min_distance = 0.0;   // min_{i != j in W} |w_i - w_j|, +inf for |W| = 1
  double log_lower = 0.0;   // ((N^2 - N) / 2) log(candidate_min)
  double log_middle = 0.0;  // log prod_W + log((N - 1) candidate_min)
  double log_energy = 0.0;  // log prod over W + {w_N}
  /// Middle term with (candidate_min)^(N-1) in place of (N-1) candidate_min.
  double log_middle_power = 0.0;
  bool hypothesis_holds = false;  // candidate_min <= selected_min
  bool chain_holds = false;       // lower <= middle <= energy, 1e-9 slack
  bool power_chain_holds = false;
  /// log(prod_{W+w_N} - lower): the gap the lower bound leaves.
  double log_upper_loss = 0.0;
  /// (prod - lower)^(2 / (N^2 - N)).
  double root_upper_loss = 0.0;
};

inline constexpr double kChainSlack = 1e-9;

BoundReport prop1_bounds(const UnitPointSet& pool, const SelectionState& state, Index candidate);

struct ChordEnvelope {
  double min_chord = 0.0;  // over pairs of the selection
  double max_chord = 0.0;
  /// 2 min_p (max_j |p - w_j| - min_j |p - w_j|) over the pool.
  double pool_lower = 0.0;
  /// max_p max_j |p - w_j| over the pool.
  double pool_upper = 0.0;
};

ChordEnvelope prop3_envelope(const UnitPointSet& pool, std::span<const Index> selected);

}  // namespace mheal::selection
