#include "mheal/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mheal::selection {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double dist) { return dist < kDupTol ? -kInf : std::log(dist); }

void check_budget(const UnitPointSet& pool, Index budget) {
  if (budget > pool.size()) {
    throw Error(ErrorCode::BudgetExceedsPool, "budget " + std::to_string(budget) +
                                                  " exceeds pool size " +
                                                  std::to_string(pool.size()));
  }
  if (budget < 0) throw Error(ErrorCode::InvalidArgument, "budget must be non-negative");
}

void check_index(const UnitPointSet& pool, Index index) {
  if (index < 0 || index >= pool.size()) {
    throw Error(ErrorCode::InvalidArgument, "index " + std::to_string(index) + " out of range");
  }
}

}  // namespace

SelectionState::SelectionState(const UnitPointSet& pool, Index budget)
    : min_dist_(static_cast<std::size_t>(pool.size()), kInf),
      log_product_(static_cast<std::size_t>(pool.size()), 0.0),
      in_set_(static_cast<std::size_t>(pool.size()), 0),
      budget_(budget) {
  check_budget(pool, budget);
}

SelectionState SelectionState::start(const UnitPointSet& pool, Index init, Index budget) {
  SelectionState state(pool, budget);
  state.append(pool, init);
  return state;
}

void SelectionState::append(const UnitPointSet& pool, Index index) {
  check_index(pool, index);
  if (is_selected(index)) {
    throw Error(ErrorCode::InvalidArgument, "index " + std::to_string(index) + " already selected");
  }
  if (static_cast<Index>(selected_.size()) >= budget_) {
    throw Error(ErrorCode::BudgetExceedsPool, "selection already holds its budget");
  }
  selected_.push_back(index);
  in_set_[static_cast<std::size_t>(index)] = 1;
  const auto w = pool.row(index);
  for (Index p = 0; p < pool.size(); ++p) {
    const double dist = row_distance(pool.row(p), w);
    min_dist_[p] = std::min(min_dist_[p], dist);
    log_product_[p] += safe_log(dist);
  }
  distance_evals += static_cast<std::uint64_t>(pool.size());
}

Step sequential_step(const UnitPointSet& pool, SelectionState& state) {
  if (state.selected().empty()) {
    throw Error(ErrorCode::InvalidArgument, "sequential step needs a non-empty selection");
  }
  Step best;
  Index fallback = -1;
  for (Index p = 0; p < pool.size(); ++p) {
    if (state.is_selected(p)) continue;
    const double score = state.log_product()[p];
    if (score == -kInf) {
      if (fallback < 0) fallback = p;
      continue;
    }
    if (best.index < 0 || score > best.score) best = {p, score};
  }
  if (best.index < 0) {
    if (fallback < 0) throw Error(ErrorCode::PoolExhausted, "no unselected candidate remains");
    state.warnings.push_back({"DuplicateCandidate",
                              "only candidates coincident with the selection remain; took " +
                                  std::to_string(fallback)});
    best = {fallback, -kInf};
  }
  state.append(pool, best.index);
  return best;
}

Step maxmin_step(const UnitPointSet& pool, SelectionState& state) {
  if (state.selected().empty()) {
    throw Error(ErrorCode::InvalidArgument, "max-min step needs a non-empty selection");
  }
  Step best;
  for (Index p = 0; p < pool.size(); ++p) {
    if (state.is_selected(p)) continue;
    const double score = state.min_dist()[p];
    if (best.index < 0 || score > best.score) best = {p, score};
  }
  if (best.index < 0) throw Error(ErrorCode::PoolExhausted, "no unselected candidate remains");
  state.append(pool, best.index);
  return best;
}

Algorithm1Result run_algorithm1(const UnitPointSet& pool, Index budget) {
  check_budget(pool, budget);
  if (budget < 2) throw Error(ErrorCode::InvalidArgument, "algorithm 1 needs a budget of at least 2");

  Algorithm1Result result;
  std::vector<std::vector<Index>> selections(static_cast<std::size_t>(pool.size()));
  result.start_log_products.resize(static_cast<std::size_t>(pool.size()));
  for (Index start = 0; start < pool.size(); ++start) {
    auto state = SelectionState::start(pool, start, budget);
    while (static_cast<Index>(state.selected().size()) < budget) sequential_step(pool, state);
    const auto value = energy::energy(pool, state.selected(), 0);
    result.distance_evals += state.distance_evals + static_cast<std::uint64_t>(value.pair_count);
    result.start_log_products[start] = value.log_product();
    for (auto& w : state.warnings) result.warnings.push_back(std::move(w));
    selections[start] = state.selected();
  }

  const double best_value =
      *std::max_element(result.start_log_products.begin(), result.start_log_products.end());
  for (Index start = 0; start < pool.size(); ++start) {
    const double v = result.start_log_products[start];
    if (v == best_value || (std::isfinite(best_value) && within_tie_tolerance(v, best_value))) {
      result.best_start = start;
      break;
    }
  }
  result.selected = selections[result.best_start];
  result.energy = energy::energy(pool, result.selected, 0);
  return result;
}

MaxMinResult maxmin_select(const UnitPointSet& pool, Index budget, Index init) {
  check_budget(pool, budget);
  MaxMinResult result;
  if (budget == 0) return result;
  check_index(pool, init);
  auto state = SelectionState::start(pool, init, budget);
  while (static_cast<Index>(state.selected().size()) < budget) {
    result.radii.push_back(maxmin_step(pool, state).score);
  }
  result.selected = state.selected();
  result.distance_evals = state.distance_evals;
  return result;
}

BoundReport prop1_bounds(const UnitPointSet& pool, const SelectionState& state, Index candidate) {
  check_index(pool, candidate);
  const auto& w = state.selected();
  if (w.empty()) throw Error(ErrorCode::InvalidArgument, "bounds need at least one selected point");

  BoundReport r;
  r.n = static_cast<Index>(w.size()) + 1;
  const double n = static_cast<double>(r.n);
  const double exponent = (n * n - n) / 2.0;

  double log_prod_w = 0.0;
  r.selected_min_distance = kInf;
  for (std::size_t a = 1; a < w.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      const double dist = row_distance(pool.row(w[a]), pool.row(w[b]));
      r.selected_min_distance = std::min(r.selected_min_distance, dist);
      log_prod_w += safe_log(dist);
    }
  }
  double log_cross = 0.0;
  r.candidate_min_distance = kInf;
  for (Index j : w) {
    const double dist = row_distance(pool.row(candidate), pool.row(j));
    r.candidate_min_distance = std::min(r.candidate_min_distance, dist);
    log_cross += safe_log(dist);
  }

  const double log_min = safe_log(r.candidate_min_distance);
  r.log_lower = log_min == -kInf ? -kInf : exponent * log_min;
  r.log_middle = log_prod_w + std::log(n - 1.0) + log_min;
  r.log_middle_power = log_min == -kInf ? -kInf : log_prod_w + (n - 1.0) * log_min;
  r.log_energy = log_prod_w + log_cross;
  r.hypothesis_holds = r.candidate_min_distance <= r.selected_min_distance;

  auto leq = [](double a, double b) { return a == b || a <= b + kChainSlack; };
  r.chain_holds = leq(r.log_lower, r.log_middle) && leq(r.log_middle, r.log_energy);
  r.power_chain_holds = leq(r.log_lower, r.log_middle_power) && leq(r.log_middle_power, r.log_energy);

  if (r.log_energy == -kInf || r.log_lower >= r.log_energy) {
    r.log_upper_loss = -kInf;
  } else {
    r.log_upper_loss = r.log_energy + std::log1p(-std::exp(r.log_lower - r.log_energy));
  }
  r.root_upper_loss = std::exp(r.log_upper_loss / exponent);
  return r;
}

ChordEnvelope prop3_envelope(const UnitPointSet& pool, std::span<const Index> selected) {
  if (selected.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoPoints, "chord envelope needs at least two selected points");
  }
  for (Index idx : selected) check_index(pool, idx);
  ChordEnvelope env;
  env.min_chord = kInf;
  env.max_chord = 0.0;
  for (std::size_t a = 1; a < selected.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      const double dist = row_distance(pool.row(selected[a]), pool.row(selected[b]));
      env.min_chord = std::min(env.min_chord, dist);
      env.max_chord = std::max(env.max_chord, dist);
    }
  }
  env.pool_lower = kInf;
  env.pool_upper = 0.0;
  for (Index p = 0; p < pool.size(); ++p) {
    double near = kInf;
    double far = 0.0;
    for (Index j : selected) {
      const double dist = row_distance(pool.row(p), pool.row(j));
      near = std::min(near, dist);
      far = std::max(far, dist);
    }
    env.pool_lower = std::min(env.pool_lower, 2.0 * (far - near));
    env.pool_upper = std::max(env.pool_upper, far);
  }
  return env;
}

}  // namespace mheal::selection
