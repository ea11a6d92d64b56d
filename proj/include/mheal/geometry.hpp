#pragma once

#include <cstdint>

#include "mheal/common.hpp"

namespace mheal::geometry {

enum class NormalizeMode {
  L2,
  /// Per-column z-score (population std), then row-wise l2.
  StandardizeThenL2,
};

struct Normalized {
  UnitPointSet points;
  Warnings warnings;  // one ZeroVarianceColumn entry per constant column
};

Normalized normalize_to_sphere(const PointSet& points, NormalizeMode mode);

/// Appends a zero coordinate to every row (d -> d + 1).
PointSet pad_extend(const PointSet& points);

/// Gaussian random projection R^d -> R^kappa with entries r_ij / sqrt(kappa),
/// r_ij ~ N(0, sigma^2). Regenerating with the same seed is bit-exact.
struct ProjectionMatrix {
  Matrix entries;  // kappa x d
  double sigma = 1.0;
  std::uint64_t seed = 0;

  static ProjectionMatrix generate(Index kappa, Index dim, double sigma, std::uint64_t seed);
  /// The identity map, tagged with sigma = 1 so its concentration band is
  /// centered on the unprojected distances.
  static ProjectionMatrix identity(Index dim);

  Index kappa() const noexcept { return entries.rows(); }
  Index dim() const noexcept { return entries.cols(); }

  /// Expected ||P v||^2 / ||v||^2 under the generator: kappa * sigma^2 / kappa.
  double band_scale() const noexcept { return sigma * sigma; }
};

PointSet gaussian_project(const PointSet& points, const ProjectionMatrix& proj);

/// 2 exp(-kappa eps^2 / 8).
double concentration_bound(Index kappa, double epsilon);

/// kappa * eps^2 must exceed this for the bound above to drop below 1.
inline constexpr double kConcentrationFeasibility = 5.54517744;

struct ConcentrationReport {
  double epsilon = 0.0;
  Index kappa = 0;
  Index trials = 0;
  Index violations = 0;
  double violation_rate = 0.0;
  double bound = 0.0;
  bool within_bound = false;
  bool vacuous = false;  // kappa eps^2 <= kConcentrationFeasibility
  Warnings warnings;
};

/// Monte-Carlo estimate of how often a fresh projection (kappa = d) pushes a
/// random pair's squared distance out of the (1 +/- eps) band. Each trial
/// draws a new projection matrix and a new pair of distinct rows.
ConcentrationReport concentration_test(const PointSet& points, double epsilon, double sigma,
                                       Index trials, std::uint64_t seed);

enum class OrderMetric { Geodesic, Angle };

struct OrderPreservationReport {
  Index triples_considered = 0;  // triples with d(i,j) <= d(j,l)
  Index triples_preserved = 0;
  double fraction_preserved = 1.0;
  bool subsampled = false;
  /// Triples where both projected pairs sit inside the concentration band and
  /// the unprojected gap satisfies |a|^2 (1 + eps) < |b|^2 (1 - eps). Only
  /// evaluated for the geodesic metric.
  bool conditional_applicable = false;
  Index conditional_triples = 0;
  Index conditional_violations = 0;
};

inline constexpr Index kDefaultMaxTriples = 100000;

/// Checks ordered triples (i, j, l) of distinct rows. When the total triple
/// count exceeds `max_triples`, that many triples are drawn with `seed`.
OrderPreservationReport order_preservation_check(const PointSet& points,
                                                 const ProjectionMatrix& proj, OrderMetric metric,
                                                 double epsilon,
                                                 Index max_triples = kDefaultMaxTriples,
                                                 std::uint64_t seed = 0);

/// arccos of the clamped cosine between two vectors.
double angle_between(const Vector& u, const Vector& v);

}  // namespace mheal::geometry
