#include "mheal/pipeline.hpp"

#include <algorithm>
#include <limits>

#include "mheal/random.hpp"
#include "mheal/selection.hpp"

namespace mheal::pipeline {

RotationCandidates rotation_candidates(const UnitPointSet& cluster, const Vector& center, Index m,
                                       std::uint64_t seed) {
  if (cluster.size() == 0) throw Error(ErrorCode::EmptyData, "cluster is empty");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be at least 1");
  if (center.size() != cluster.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "center dimension differs from the cluster's");
  }

  RotationCandidates out;
  std::vector<Index> eligible;
  Matrix dirs(cluster.size(), cluster.dim());
  for (Index i = 0; i < cluster.size(); ++i) {
    const Vector offset = cluster.row(i).transpose() - center;
    const double norm = offset.norm();
    if (norm < kDupTol) continue;
    dirs.row(i) = offset.transpose() / norm;
    eligible.push_back(i);
  }
  if (eligible.empty()) {
    out.warnings.push_back({"AllAtCenter", "every member coincides with the center"});
    out.indices = {0};
    return out;
  }
  const auto available = static_cast<Index>(eligible.size());
  if (m > available) {
    out.warnings.push_back({"MExceedsCluster", "m = " + std::to_string(m) + " clamped to " +
                                                   std::to_string(available)});
    m = available;
  }

  Rng rng(seed);
  std::vector<char> taken(static_cast<std::size_t>(cluster.size()), 0);
  Index prev = eligible[uniform_index(available, rng)];
  out.indices.push_back(prev);
  taken[prev] = 1;
  while (static_cast<Index>(out.indices.size()) < m) {
    Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Index i : eligible) {
      if (taken[i]) continue;
      const double score = 1.0 - dirs.row(prev).dot(dirs.row(i));
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    out.distance_evals += static_cast<std::uint64_t>(available);
    out.indices.push_back(best);
    taken[best] = 1;
    prev = best;
  }
  return out;
}

BestInit best_init(const UnitPointSet& cluster, std::span<const Index> candidates, Index tau) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "candidate set is empty");
  BestInit out;
  if (candidates.size() == 1) {
    out.start = candidates.front();
    const auto sel = selection::maxmin_select(cluster, tau, out.start);
    out.log_products.push_back(energy::energy(cluster, sel.selected, 0).log_product());
    out.distance_evals = sel.distance_evals;
    return out;
  }
  for (Index w : candidates) {
    const auto sel = selection::maxmin_select(cluster, tau, w);
    const auto value = energy::energy(cluster, sel.selected, 0);
    out.distance_evals += sel.distance_evals + static_cast<std::uint64_t>(value.pair_count);
    out.log_products.push_back(value.log_product());
  }
  const double best = *std::max_element(out.log_products.begin(), out.log_products.end());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double v = out.log_products[c];
    const bool ties = v == best || (std::isfinite(best) && within_tie_tolerance(v, best));
    if (ties && (out.start < 0 || candidates[c] < out.start)) out.start = candidates[c];
  }
  return out;
}

MhealResult run_mheal(const PointSet& points, const MhealConfig& config) {
  auto normalized = geometry::normalize_to_sphere(points, config.normalize_mode);
  auto result = run_mheal(normalized.points, config);
  result.warnings.insert(result.warnings.begin(), normalized.warnings.begin(),
                         normalized.warnings.end());
  return result;
}

MhealResult run_mheal(const UnitPointSet& points, const MhealConfig& config) {
  if (config.k < 1 || config.tau < 1 || config.m < 0) {
    throw Error(ErrorCode::InvalidArgument, "need k >= 1, tau >= 1, m >= 0");
  }
  if (points.size() == 0) throw Error(ErrorCode::EmptyData, "no points to select from");

  MhealResult result;
  result.normalized = points;
  if (config.tau * config.k > points.size()) {
    result.warnings.push_back({"BudgetExceedsData", "tau * k = " +
                                                        std::to_string(config.tau * config.k) +
                                                        " exceeds " + std::to_string(points.size()) +
                                                        " points"});
  }
  result.model = clustering::spherical_kmeans(points, config.k, config.max_iters,
                                              derive_seed(config.seed, "clustering"));

  auto& reps = result.reps;
  for (Index c = 0; c < config.k; ++c) {
    const auto members = result.model.members(c);
    const auto local = points.subset(members);
    const auto size = static_cast<Index>(members.size());
    const Index tau = std::min(config.tau, size);
    if (tau < config.tau) {
      result.warnings.push_back({"ClusterSmallerThanTau",
                                 "cluster " + std::to_string(c) + " has " + std::to_string(size) +
                                     " points; selection truncated"});
    }
    if (size == 1) {
      result.warnings.push_back(
          {"SingletonCluster", "cluster " + std::to_string(c) + " has a single member"});
    }
    const Index m = config.m == 0 ? std::min(kDefaultRotationCandidates, size)
                                  : std::min(config.m, size);
    if (config.m > size) {
      result.warnings.push_back({"MExceedsCluster", "cluster " + std::to_string(c) + ": m = " +
                                                        std::to_string(config.m) + " clamped to " +
                                                        std::to_string(size)});
    }

    auto rotation = rotation_candidates(local, result.model.centers.row(c).transpose(), m,
                                        derive_seed(config.seed, "mheal.rotation",
                                                    static_cast<std::uint64_t>(c)));
    for (auto& w : rotation.warnings) {
      w.message = "cluster " + std::to_string(c) + ": " + w.message;
      result.warnings.push_back(std::move(w));
    }
    const auto init = best_init(local, rotation.indices, tau);
    const auto sel = selection::maxmin_select(local, tau, init.start);

    std::vector<Index> global;
    for (Index i : sel.selected) global.push_back(members[i]);
    std::vector<Index> cands;
    for (Index i : rotation.indices) cands.push_back(members[i]);

    reps.cluster_energy.push_back(energy::energy(local, sel.selected, 0));
    reps.radii.push_back(sel.radii);
    reps.starts.push_back(members[init.start]);
    reps.candidates.push_back(std::move(cands));
    reps.distance_evals.push_back(rotation.distance_evals + init.distance_evals +
                                  sel.distance_evals);
    reps.flat.insert(reps.flat.end(), global.begin(), global.end());
    reps.per_cluster.push_back(std::move(global));
  }
  return result;
}

}  // namespace mheal::pipeline
