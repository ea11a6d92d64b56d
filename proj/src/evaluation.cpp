#include "mheal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mheal/energy.hpp"
#include "mheal/random.hpp"
#include "mheal/selection.hpp"

namespace mheal::evaluation {
namespace {

double cross_distance_sum(const PointSet& a, const PointSet& b) {
  double total = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) total += row_distance(a.row(i), b.row(j));
  }
  return total;
}

}  // namespace

DistributionMatcher::DistributionMatcher(PointSet full, Index bins)
    : full_(std::move(full)), bins_(bins) {
  if (full_.rows() == 0) throw Error(ErrorCode::EmptyData, "full set is empty");
  if (bins_ < 1) throw Error(ErrorCode::InvalidArgument, "need at least one histogram bin");
  lo_ = full_.colwise().minCoeff().transpose();
  hi_ = full_.colwise().maxCoeff().transpose();
  full_hist_ = histogram(full_);
  full_mean_ = full_.colwise().mean().transpose();
  full_self_sum_ = cross_distance_sum(full_, full_);
}

std::vector<double> DistributionMatcher::histogram(const PointSet& points) const {
  std::vector<double> hist(static_cast<std::size_t>(bins_), 0.0);
  if (points.cols() == 0) return hist;
  std::vector<double> counts(static_cast<std::size_t>(bins_));
  for (Index f = 0; f < points.cols(); ++f) {
    std::fill(counts.begin(), counts.end(), 0.0);
    const double range = hi_(f) - lo_(f);
    for (Index r = 0; r < points.rows(); ++r) {
      Index bin = 0;
      if (range > 0.0) {
        const double scaled = std::clamp((points(r, f) - lo_(f)) / range, 0.0, 1.0);
        bin = std::min(bins_ - 1, static_cast<Index>(scaled * static_cast<double>(bins_)));
      }
      counts[bin] += 1.0;
    }
    for (Index b = 0; b < bins_; ++b) hist[b] += counts[b] / static_cast<double>(points.rows());
  }
  for (double& h : hist) h /= static_cast<double>(points.cols());
  return hist;
}

MatchReport DistributionMatcher::evaluate(const PointSet& subset, double beta) const {
  if (subset.rows() == 0) throw Error(ErrorCode::EmptySubset, "subset is empty");
  if (subset.cols() != full_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "subset and full set differ in dimension");
  }
  MatchReport report;
  report.beta = beta;
  report.n = full_.rows();
  report.m = subset.rows();
  report.bins = bins_;

  const auto sub_hist = histogram(subset);
  for (Index b = 0; b < bins_; ++b) {
    const double x = full_hist_[b];
    if (x <= 0.0) continue;
    const double denom = sub_hist[b] + beta;
    report.kl += denom > 0.0 ? x * std::log(x / denom) : std::numeric_limits<double>::infinity();
  }

  const double n = static_cast<double>(report.n);
  const double m = static_cast<double>(report.m);
  const double full_term = full_self_sum_ / (n * n);
  const double cross_term = cross_distance_sum(full_, subset) / (n * m);
  const double sub_term = cross_distance_sum(subset, subset) / (m * m);
  report.mmd = std::sqrt(std::abs(full_term - 2.0 * cross_term + sub_term));

  const Vector sub_mean = subset.colwise().mean().transpose();
  report.mmd_mu = (full_mean_ - sub_mean).norm();
  return report;
}

MatchReport DistributionMatcher::evaluate_rows(std::span<const Index> rows, double beta) const {
  PointSet subset(static_cast<Index>(rows.size()), full_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= full_.rows()) {
      throw Error(ErrorCode::InvalidArgument, "subset row index out of range");
    }
    subset.row(static_cast<Index>(r)) = full_.row(rows[r]);
  }
  return evaluate(subset, beta);
}

MatchReport match_losses(const PointSet& full, const PointSet& subset, double beta, Index bins) {
  if (subset.rows() == 0) throw Error(ErrorCode::EmptySubset, "subset is empty");
  if (subset.cols() != full.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "subset and full set differ in dimension");
  }
  return DistributionMatcher(full, bins).evaluate(subset, beta);
}

BoundaryPartition boundary_partition(const PointSet& points, Index knn_k, double fraction,
                                     EnergyDirection direction) {
  const Index n = points.rows();
  if (knn_k < 1 || knn_k >= n) {
    throw Error(ErrorCode::InvalidArgument, "knn_k must satisfy 1 <= knn_k < n");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0, 1)");
  }

  BoundaryPartition out;
  out.knn_k = knn_k;
  out.fraction = fraction;
  out.scores.resize(static_cast<std::size_t>(n));
  std::vector<double> dists(static_cast<std::size_t>(n - 1));
  Index degenerate = 0;
  for (Index i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) dists[w++] = row_distance(points.row(i), points.row(j));
    }
    std::partial_sort(dists.begin(), dists.begin() + knn_k, dists.end());
    double score = 0.0;
    for (Index q = 0; q < knn_k; ++q) {
      score += dists[q] < kDupTol ? std::numeric_limits<double>::infinity() : -std::log(dists[q]);
    }
    if (std::isinf(score)) ++degenerate;
    out.scores[i] = score;
  }
  if (degenerate > 0) {
    out.warnings.push_back({"DegenerateDuplicates", std::to_string(degenerate) +
                                                        " point(s) have coincident neighbours; "
                                                        "their score is +inf"});
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const bool high = direction == EnergyDirection::HighEnergy;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return high ? out.scores[a] > out.scores[b] : out.scores[a] < out.scores[b];
  });
  const auto take = static_cast<Index>(std::lround(fraction * static_cast<double>(n)));
  out.in_version_space.assign(order.begin(), order.begin() + take);
  out.out_version_space.assign(order.begin() + take, order.end());
  std::sort(out.in_version_space.begin(), out.in_version_space.end());
  std::sort(out.out_version_space.begin(), out.out_version_space.end());
  return out;
}

SelectionMethod parse_selection_method(std::string_view name) {
  if (name == "l0") return SelectionMethod::L0MaxMin;
  if (name == "l1") return SelectionMethod::L1Swap;
  if (name == "l2") return SelectionMethod::L2Gradient;
  if (name == "random") return SelectionMethod::Random;
  throw Error(ErrorCode::InvalidArgument, "unknown selection method '" + std::string(name) + "'");
}

std::string_view to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::L0MaxMin: return "l0";
    case SelectionMethod::L1Swap: return "l1";
    case SelectionMethod::L2Gradient: return "l2";
    case SelectionMethod::Random: return "random";
  }
  return "unknown";
}

std::vector<Index> select_subset(SelectionMethod method, const UnitPointSet& pool, Index budget,
                                 std::uint64_t seed) {
  if (budget > pool.size()) {
    throw Error(ErrorCode::BudgetExceedsPool, "budget exceeds pool size");
  }
  if (budget <= 0) return {};
  switch (method) {
    case SelectionMethod::L0MaxMin: {
      Rng rng(derive_seed(seed, "evaluation.l0_init"));
      return selection::maxmin_select(pool, budget, uniform_index(pool.size(), rng)).selected;
    }
    case SelectionMethod::L1Swap:
      return energy::minimize_e1_swap(pool, budget, seed).selected;
    case SelectionMethod::L2Gradient: {
      Rng rng(derive_seed(seed, "evaluation.l2_init"));
      const auto start = sample_without_replacement(pool.size(), budget, rng);
      const auto moved = energy::minimize_e2(pool.subset(start)).points;
      // Snap each optimized point to its nearest unused pool row.
      std::vector<char> used(static_cast<std::size_t>(pool.size()), 0);
      std::vector<Index> out;
      for (Index r = 0; r < moved.size(); ++r) {
        Index best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Index p = 0; p < pool.size(); ++p) {
          if (used[p]) continue;
          const double dist = row_distance(moved.row(r), pool.row(p));
          if (dist < best_dist) {
            best_dist = dist;
            best = p;
          }
        }
        used[best] = 1;
        out.push_back(best);
      }
      return out;
    }
    case SelectionMethod::Random: {
      Rng rng(derive_seed(seed, "evaluation.random"));
      return sample_without_replacement(pool.size(), budget, rng);
    }
  }
  return {};
}

}  // namespace mheal::evaluation
