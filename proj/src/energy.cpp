#include "mheal/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mheal/random.hpp"

namespace mheal::energy {
namespace {

void check_exponent(int s) {
  if (s < 0 || s > 2) throw Error(ErrorCode::InvalidArgument, "energy exponent must be 0, 1 or 2");
}

double pair_term(double dist, int s) {
  switch (s) {
    case 0: return -std::log(dist);
    case 1: return 1.0 / dist;
    default: return 1.0 / (dist * dist);
  }
}

EnergyValue sum_pairs(const Matrix& rows, std::span<const Index> order, int s) {
  EnergyValue out;
  out.s = s;
  out.min_pair_distance = std::numeric_limits<double>::infinity();
  const auto n = static_cast<Index>(order.size());
  for (Index a = 1; a < n; ++a) {
    for (Index b = 0; b < a; ++b) {
      const double dist = row_distance(rows.row(order[a]), rows.row(order[b]));
      ++out.pair_count;
      out.min_pair_distance = std::min(out.min_pair_distance, dist);
      if (dist < kDupTol) {
        if (!out.duplicate) out.duplicate = std::make_pair(order[a], order[b]);
        continue;
      }
      out.value += pair_term(dist, s);
    }
  }
  if (out.duplicate) out.value = std::numeric_limits<double>::infinity();
  return out;
}

Matrix renormalize_rows(Matrix rows, bool& ok) {
  ok = true;
  for (Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      ok = false;
      return rows;
    }
    rows.row(i) /= norm;
  }
  return rows;
}

}  // namespace

double EnergyValue::product() const { return std::exp(-value); }

EnergyValue energy(const UnitPointSet& points, int s) {
  check_exponent(s);
  std::vector<Index> order(static_cast<std::size_t>(points.size()));
  std::iota(order.begin(), order.end(), Index{0});
  return sum_pairs(points.rows(), order, s);
}

EnergyValue energy(const UnitPointSet& points, std::span<const Index> subset, int s) {
  check_exponent(s);
  std::vector<Index> order(subset.begin(), subset.end());
  for (Index idx : order) {
    if (idx < 0 || idx >= points.size()) {
      throw Error(ErrorCode::InvalidArgument, "subset index out of range");
    }
  }
  std::sort(order.begin(), order.end());
  return sum_pairs(points.rows(), order, s);
}

Vector grad_e2(const UnitPointSet& points, Index index) {
  if (index < 0 || index >= points.size()) {
    throw Error(ErrorCode::InvalidArgument, "gradient index out of range");
  }
  Vector grad = Vector::Zero(points.dim());
  const auto wi = points.row(index);
  for (Index j = 0; j < points.size(); ++j) {
    if (j == index) continue;
    const Vector diff = (wi - points.row(j)).transpose();
    const double dist = diff.norm();
    if (dist < kDupTol) {
      throw Error(ErrorCode::DuplicatePoints, "rows " + std::to_string(index) + " and " +
                                                  std::to_string(j) + " coincide");
    }
    const double d2 = dist * dist;
    grad += (-2.0 / (d2 * d2)) * diff;
  }
  return grad;
}

DescentResult minimize_e2(const UnitPointSet& points, const DescentOptions& options) {
  if (!(options.lr > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  DescentResult result;
  result.points = points;
  result.final_lr = options.lr;

  EnergyValue current = energy(points, 2);
  if (!current.finite()) {
    result.duplicate_hit = true;
    return result;
  }
  result.energy_trace.push_back(current.value);
  if (points.size() < 2) {
    result.converged = true;
    return result;
  }

  const double lr_floor = options.lr / 1024.0;
  double lr = options.lr;
  Matrix rows = points.rows();
  Matrix grads(rows.rows(), rows.cols());

  for (Index it = 0; it < options.max_iters; ++it) {
    const auto snapshot = UnitPointSet::from_unit_rows(rows, 1e-9);
    for (Index i = 0; i < rows.rows(); ++i) grads.row(i) = grad_e2(snapshot, i).transpose();

    bool accepted = false;
    Matrix candidate;
    double candidate_energy = 0.0;
    while (lr >= lr_floor) {
      bool ok = false;
      candidate = renormalize_rows(rows - lr * grads, ok);
      if (ok) {
        const auto value = energy(UnitPointSet::from_unit_rows(candidate, 1e-9), 2);
        if (!value.finite()) {
          result.duplicate_hit = true;
          result.final_lr = lr;
          return result;
        }
        if (value.value <= current.value) {
          candidate_energy = value.value;
          accepted = true;
          break;
        }
      }
      lr *= 0.5;
      ++result.lr_halvings;
    }
    result.final_lr = lr;
    if (!accepted) break;

    const double displacement = (candidate - rows).rowwise().norm().maxCoeff();
    rows = std::move(candidate);
    current.value = candidate_energy;
    result.energy_trace.push_back(candidate_energy);
    result.points = UnitPointSet::from_unit_rows(rows, 1e-9);
    ++result.iterations;
    if (displacement < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

namespace {

// Inverse-distance sum that keeps coincident pairs as a separate count, so
// configurations with duplicates still compare (fewer duplicates first).
struct InvSum {
  std::int64_t dups = 0;
  double sum = 0.0;
};

InvSum inverse_term(double dist) {
  if (dist < kDupTol) return {1, 0.0};
  return {0, 1.0 / dist};
}

}  // namespace

SwapResult minimize_e1_swap(const UnitPointSet& pool, Index n_select, std::uint64_t seed,
                            Index max_passes) {
  const Index m = pool.size();
  if (n_select > m) {
    throw Error(ErrorCode::BudgetExceedsPool, "n_select " + std::to_string(n_select) +
                                                  " exceeds pool size " + std::to_string(m));
  }
  if (n_select < 0) throw Error(ErrorCode::InvalidArgument, "n_select must be non-negative");

  SwapResult result;
  Rng rng(derive_seed(seed, "energy.e1_swap"));
  std::vector<Index> selected = sample_without_replacement(m, n_select, rng);
  std::vector<char> in_set(static_cast<std::size_t>(m), 0);
  for (Index s : selected) in_set[s] = 1;

  const Matrix& rows = pool.rows();
  std::vector<InvSum> phi(static_cast<std::size_t>(m));
  auto recompute_phi = [&] {
    for (Index p = 0; p < m; ++p) {
      InvSum acc;
      for (Index s : selected) {
        if (s == p) continue;
        const InvSum t = inverse_term(row_distance(rows.row(p), rows.row(s)));
        acc.dups += t.dups;
        acc.sum += t.sum;
      }
      phi[p] = acc;
    }
  };

  const bool trivial = n_select == 0 || n_select == m;
  result.locally_optimal = trivial;
  while (!trivial && result.passes < max_passes) {
    ++result.passes;
    recompute_phi();
    double scale = 0.0;
    for (Index s : selected) scale += phi[s].sum;
    const double improve_tol = 1e-12 * std::max(1.0, 0.5 * scale);

    bool found = false;
    std::size_t best_out = 0;
    Index best_in = -1;
    InvSum best_delta{0, 0.0};
    for (std::size_t k = 0; k < selected.size(); ++k) {
      const Index out = selected[k];
      for (Index in = 0; in < m; ++in) {
        if (in_set[in]) continue;
        const InvSum cross = inverse_term(row_distance(rows.row(in), rows.row(out)));
        const InvSum delta{phi[in].dups - cross.dups - phi[out].dups,
                           phi[in].sum - cross.sum - phi[out].sum};
        const bool improves =
            delta.dups < 0 || (delta.dups == 0 && delta.sum < -improve_tol);
        if (!improves) continue;
        const bool better = !found || delta.dups < best_delta.dups ||
                            (delta.dups == best_delta.dups && delta.sum < best_delta.sum);
        if (better) {
          found = true;
          best_delta = delta;
          best_out = k;
          best_in = in;
        }
      }
    }
    if (!found) {
      result.locally_optimal = true;
      break;
    }
    in_set[selected[best_out]] = 0;
    in_set[best_in] = 1;
    selected[best_out] = best_in;
    ++result.swaps;
  }

  std::sort(selected.begin(), selected.end());
  result.energy = energy(pool, selected, 1);
  result.selected = std::move(selected);
  return result;
}

}  // namespace mheal::energy
