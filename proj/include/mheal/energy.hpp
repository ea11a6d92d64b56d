#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mheal/common.hpp"

namespace mheal::energy {

/// Riesz / logarithmic energy of a configuration of unit vectors.
///   s = 0: sum_{i>j} log(1 / |w_i - w_j|)
///   s > 0: sum_{i>j} |w_i - w_j|^-s
struct EnergyValue {
  int s = 0;
  double value = 0.0;
  std::int64_t pair_count = 0;
  double min_pair_distance = 0.0;  // +inf when there are no pairs
  /// First coincident pair (distance < kDupTol) in canonical order, if any.
  /// The value is then +inf.
  std::optional<std::pair<Index, Index>> duplicate;

  bool finite() const noexcept { return !duplicate.has_value(); }
  /// prod_{i>j} |w_i - w_j| for s = 0, i.e. exp(-value).
  double product() const;
  /// sum_{i>j} log |w_i - w_j| for s = 0 (the quantity selection maximizes).
  double log_product() const { return -value; }
};

/// Energy over all rows; pairs are summed in (i > j) lexicographic order.
EnergyValue energy(const UnitPointSet& points, int s);

/// Energy over a subset of rows. Indices are sorted first, so the result does
/// not depend on the order in which the subset is listed.
EnergyValue energy(const UnitPointSet& points, std::span<const Index> subset, int s);

/// Analytic gradient of the s = 2 energy with respect to row `index`:
///   sum_{j != i} -2 (w_i - w_j) / |w_i - w_j|^4
Vector grad_e2(const UnitPointSet& points, Index index);

struct DescentOptions {
  double lr = 0.001;
  Index max_iters = 1000;
  double tol = 1e-9;
};

struct DescentResult {
  UnitPointSet points;
  std::vector<double> energy_trace;  // accepted iterates, starting with the input
  Index iterations = 0;
  bool converged = false;
  bool duplicate_hit = false;
  double final_lr = 0.0;
  Index lr_halvings = 0;
};

/// Projected gradient descent on the s = 2 energy. All rows move together,
/// then each row is renormalized. A step that raises the energy is retried
/// with half the rate; once the rate falls below lr / 1024 the solver stops.
DescentResult minimize_e2(const UnitPointSet& points, const DescentOptions& options = {});

struct SwapResult {
  std::vector<Index> selected;  // ascending
  EnergyValue energy;           // s = 1 over `selected`
  Index passes = 0;
  Index swaps = 0;
  bool locally_optimal = false;
};

/// Best-improvement 1-swap local search for the s = 1 energy, started from a
/// seeded random subset of size `n_select`.
SwapResult minimize_e1_swap(const UnitPointSet& pool, Index n_select, std::uint64_t seed,
                            Index max_passes = 100);

}  // namespace mheal::energy
