#include "mheal/clustering.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "mheal/random.hpp"

namespace mheal::clustering {
namespace {

bool rows_equal(const Matrix& rows, Index a, Index b) {
  return (rows.row(a).array() == rows.row(b).array()).all();
}

void assign_points(const UnitPointSet& points, const Matrix& centers, std::vector<Index>& out) {
  const Index k = centers.rows();
  for (Index i = 0; i < points.size(); ++i) {
    Index best = 0;
    double best_cos = centers.row(0).dot(points.row(i));
    for (Index c = 1; c < k; ++c) {
      const double cos = centers.row(c).dot(points.row(i));
      if (cos > best_cos) {
        best_cos = cos;
        best = c;
      }
    }
    out[i] = best;
  }
}

// Moves the point farthest from its own center into each empty cluster.
// Donor clusters must keep at least one member.
Index reseed_empty(const UnitPointSet& points, Matrix& centers, std::vector<Index>& assignments) {
  const Index k = centers.rows();
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (Index a : assignments) ++sizes[a];
  Index reseeds = 0;
  for (Index e = 0; e < k; ++e) {
    if (sizes[e] != 0) continue;
    Index pick = -1;
    double worst = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < points.size(); ++i) {
      if (sizes[assignments[i]] < 2) continue;
      const double gap = 1.0 - centers.row(assignments[i]).dot(points.row(i));
      if (gap > worst) {
        worst = gap;
        pick = i;
      }
    }
    if (pick < 0) break;  // cannot happen when k <= n
    --sizes[assignments[pick]];
    assignments[pick] = e;
    sizes[e] = 1;
    centers.row(e) = points.row(pick);
    ++reseeds;
  }
  return reseeds;
}

void update_centers(const UnitPointSet& points, Matrix& centers,
                    const std::vector<Index>& assignments) {
  Matrix sums = Matrix::Zero(centers.rows(), centers.cols());
  for (Index i = 0; i < points.size(); ++i) sums.row(assignments[i]) += points.row(i);
  for (Index c = 0; c < centers.rows(); ++c) {
    const double norm = sums.row(c).norm();
    // A member sum that cancels to ~0 leaves the previous center in place.
    if (norm >= kDupTol) centers.row(c) = sums.row(c) / norm;
  }
}

}  // namespace

std::vector<Index> ClusterModel::members(Index cluster) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == cluster) out.push_back(static_cast<Index>(i));
  }
  return out;
}

double cosine_objective(const UnitPointSet& points, const Matrix& centers,
                        std::span<const Index> assignments) {
  double total = 0.0;
  for (Index i = 0; i < points.size(); ++i) {
    total += 1.0 - centers.row(assignments[i]).dot(points.row(i));
  }
  return total;
}

Index count_distinct_rows(const Matrix& rows) {
  std::set<std::vector<double>> seen;
  for (Index i = 0; i < rows.rows(); ++i) {
    seen.emplace(rows.row(i).data(), rows.row(i).data() + rows.cols());
  }
  return static_cast<Index>(seen.size());
}

ClusterModel spherical_kmeans(const UnitPointSet& points, Index k, Index max_iters,
                              std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const Index distinct = count_distinct_rows(points.rows());
  if (k > distinct) {
    throw Error(ErrorCode::KExceedsDistinctPoints, "k = " + std::to_string(k) + " exceeds " +
                                                       std::to_string(distinct) +
                                                       " distinct points");
  }

  ClusterModel model;
  model.seed = seed;
  model.centers.resize(k, points.dim());
  {
    Rng rng(seed);
    const auto order = permutation(points.size(), rng);
    std::vector<Index> chosen;
    for (Index idx : order) {
      const bool dup = std::any_of(chosen.begin(), chosen.end(),
                                   [&](Index c) { return rows_equal(points.rows(), c, idx); });
      if (dup) continue;
      model.centers.row(static_cast<Index>(chosen.size())) = points.row(idx);
      chosen.push_back(idx);
      if (static_cast<Index>(chosen.size()) == k) break;
    }
  }

  std::vector<Index> assignments(static_cast<std::size_t>(points.size()), 0);
  std::vector<Index> previous;
  for (Index iter = 1; iter <= max_iters; ++iter) {
    assign_points(points, model.centers, assignments);
    model.objective_trace.push_back(cosine_objective(points, model.centers, assignments));
    model.iterations_run = iter;
    if (assignments == previous) {
      model.converged = true;
      break;
    }
    model.reseeds += reseed_empty(points, model.centers, assignments);
    update_centers(points, model.centers, assignments);
    model.objective_trace.push_back(cosine_objective(points, model.centers, assignments));
    previous = assignments;
  }
  if (max_iters < 1) assign_points(points, model.centers, assignments);
  model.assignments = std::move(assignments);
  model.objective = cosine_objective(points, model.centers, model.assignments);
  return model;
}

double matched_accuracy(std::span<const Index> assignments, std::span<const Index> labels) {
  if (assignments.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "assignments and labels differ in length");
  }
  if (assignments.empty()) return 0.0;
  std::map<Index, Index> cluster_ids;
  std::map<Index, Index> label_ids;
  for (Index a : assignments) cluster_ids.emplace(a, static_cast<Index>(cluster_ids.size()));
  for (Index l : labels) label_ids.emplace(l, static_cast<Index>(label_ids.size()));
  const Index n = static_cast<Index>(std::max(cluster_ids.size(), label_ids.size()));

  // Hungarian method on cost = -overlap, 1-based potentials.
  std::vector<std::vector<double>> cost(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    cost[cluster_ids[assignments[i]] + 1][label_ids[labels[i]] + 1] -= 1.0;
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double matched = 0.0;
  for (Index j = 1; j <= n; ++j) matched -= cost[p[j]][j];
  return matched / static_cast<double>(assignments.size());
}

}  // namespace mheal::clustering
