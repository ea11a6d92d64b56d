#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mheal/clustering.hpp"
#include "mheal/common.hpp"
#include "mheal/energy.hpp"
#include "mheal/geometry.hpp"

namespace mheal::pipeline {

struct MhealConfig {
  Index k = 1;
  Index tau = 1;
  /// Rotation candidates per cluster; 0 means min(32, cluster size).
  Index m = 0;
  std::uint64_t seed = 0;
  geometry::NormalizeMode normalize_mode = geometry::NormalizeMode::StandardizeThenL2;
  Index max_iters = clustering::kDefaultMaxIters;
};

inline constexpr Index kDefaultRotationCandidates = 32;

struct RotationCandidates {
  std::vector<Index> indices;  // cluster-local, in selection order
  std::uint64_t distance_evals = 0;
  Warnings warnings;
};

/// Builds a start set by vector rotation: from a seeded random member, keep
/// appending the member whose direction from the center is most anti-aligned
/// (max 1 - cos) with the previous pick's direction. Members within kDupTol of
/// the center have no direction and are skipped.
RotationCandidates rotation_candidates(const UnitPointSet& cluster, const Vector& center, Index m,
                                       std::uint64_t seed);

struct BestInit {
  Index start = -1;
  std::vector<double> log_products;  // aligned with the candidate list
  std::uint64_t distance_evals = 0;
};

/// Runs max-min selection to `tau` points from each candidate and keeps the
/// start with the largest pairwise-distance product. Candidates within a
/// relative 1e-12 of the best tie; the lowest index wins.
BestInit best_init(const UnitPointSet& cluster, std::span<const Index> candidates, Index tau);

struct RepresentativeSet {
  std::vector<std::vector<Index>> per_cluster;  // global indices, selection order
  std::vector<Index> flat;                      // cluster order, then selection order
  std::vector<energy::EnergyValue> cluster_energy;  // s = 0 per cluster
  std::vector<std::vector<double>> radii;           // max-min trace per cluster
  std::vector<Index> starts;                        // chosen start per cluster (global)
  std::vector<std::vector<Index>> candidates;       // rotation candidates (global)
  std::vector<std::uint64_t> distance_evals;        // per cluster
};

struct MhealResult {
  UnitPointSet normalized;
  clustering::ClusterModel model;
  RepresentativeSet reps;
  Warnings warnings;
};

MhealResult run_mheal(const PointSet& points, const MhealConfig& config);

/// Same pipeline on already-normalized points.
MhealResult run_mheal(const UnitPointSet& points, const MhealConfig& config);

}  // namespace mheal::pipeline
