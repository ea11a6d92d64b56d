#include "mheal/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mheal/random.hpp"

namespace mheal::geometry {

Normalized normalize_to_sphere(const PointSet& points, NormalizeMode mode) {
  Matrix rows = points;
  Warnings warnings;
  if (mode == NormalizeMode::StandardizeThenL2 && rows.rows() > 0) {
    const auto n = static_cast<double>(rows.rows());
    for (Index c = 0; c < rows.cols(); ++c) {
      double mean = 0.0;
      for (Index r = 0; r < rows.rows(); ++r) mean += rows(r, c);
      mean /= n;
      double var = 0.0;
      for (Index r = 0; r < rows.rows(); ++r) {
        rows(r, c) -= mean;
        var += rows(r, c) * rows(r, c);
      }
      const double sd = std::sqrt(var / n);
      if (sd > 0.0) {
        rows.col(c) /= sd;
      } else {
        warnings.push_back({"ZeroVarianceColumn",
                            "column " + std::to_string(c) + " is constant; left centered, unscaled"});
      }
    }
  }
  return {UnitPointSet::normalized(std::move(rows)), std::move(warnings)};
}

PointSet pad_extend(const PointSet& points) {
  PointSet out = PointSet::Zero(points.rows(), points.cols() + 1);
  out.leftCols(points.cols()) = points;
  return out;
}

ProjectionMatrix ProjectionMatrix::generate(Index kappa, Index dim, double sigma,
                                            std::uint64_t seed) {
  if (kappa < 1 || dim < 1 || !(sigma > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "projection needs kappa, dim >= 1 and sigma > 0");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kappa));
  ProjectionMatrix proj;
  proj.entries.resize(kappa, dim);
  for (Index r = 0; r < kappa; ++r) {
    for (Index c = 0; c < dim; ++c) proj.entries(r, c) = scale * normal(rng);
  }
  proj.sigma = sigma;
  proj.seed = seed;
  return proj;
}

ProjectionMatrix ProjectionMatrix::identity(Index dim) {
  ProjectionMatrix proj;
  proj.entries = Matrix::Identity(dim, dim);
  proj.sigma = 1.0;
  proj.seed = 0;
  return proj;
}

PointSet gaussian_project(const PointSet& points, const ProjectionMatrix& proj) {
  if (proj.dim() != points.cols()) {
    std::ostringstream msg;
    msg << "projection expects dimension " << proj.dim() << ", points have " << points.cols();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  return points * proj.entries.transpose();
}

double concentration_bound(Index kappa, double epsilon) {
  return 2.0 * std::exp(-static_cast<double>(kappa) * epsilon * epsilon / 8.0);
}

namespace {

bool inside_band(double projected_sq, double original_sq, double epsilon, double scale) {
  const double lo = scale * ((1.0 - epsilon) * original_sq);
  const double hi = scale * ((1.0 + epsilon) * original_sq);
  return lo < projected_sq && projected_sq < hi;
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1]");
  }
}

}  // namespace

ConcentrationReport concentration_test(const PointSet& points, double epsilon, double sigma,
                                       Index trials, std::uint64_t seed) {
  check_epsilon(epsilon);
  if (points.rows() < 2) {
    throw Error(ErrorCode::FewerThanTwoPoints, "concentration test needs at least two points");
  }
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be positive");

  ConcentrationReport report;
  report.epsilon = epsilon;
  report.kappa = points.cols();
  report.trials = trials;
  report.bound = concentration_bound(report.kappa, epsilon);
  report.vacuous = !(static_cast<double>(report.kappa) * epsilon * epsilon > kConcentrationFeasibility);
  if (report.vacuous) {
    report.warnings.push_back(
        {"VacuousBound", "kappa * epsilon^2 <= 5.54517744; the bound is at least 1"});
  }

  Rng pair_rng(derive_seed(seed, "geometry.concentration.pairs"));
  const std::uint64_t proj_seed_base = derive_seed(seed, "geometry.concentration.projection");
  const Index n = points.rows();
  for (Index t = 0; t < trials; ++t) {
    const Index i = uniform_index(n, pair_rng);
    Index j = uniform_index(n - 1, pair_rng);
    if (j >= i) ++j;
    const auto proj = ProjectionMatrix::generate(report.kappa, report.kappa, sigma,
                                                 proj_seed_base + static_cast<std::uint64_t>(t));
    const Vector diff = (points.row(i) - points.row(j)).transpose();
    const double original_sq = diff.squaredNorm();
    const double projected_sq = (proj.entries * diff).squaredNorm();
    if (!inside_band(projected_sq, original_sq, epsilon, proj.band_scale())) ++report.violations;
  }
  report.violation_rate = static_cast<double>(report.violations) / static_cast<double>(trials);
  report.within_bound = report.violation_rate <= report.bound;
  return report;
}

double angle_between(const Vector& u, const Vector& v) {
  const double denom = u.norm() * v.norm();
  const double cosine = denom > 0.0 ? u.dot(v) / denom : 0.0;
  return std::acos(std::clamp(cosine, -1.0, 1.0));
}

OrderPreservationReport order_preservation_check(const PointSet& points,
                                                 const ProjectionMatrix& proj, OrderMetric metric,
                                                 double epsilon, Index max_triples,
                                                 std::uint64_t seed) {
  check_epsilon(epsilon);
  const Index n = points.rows();
  if (n < 3) {
    throw Error(ErrorCode::FewerThanThreePoints, "order check needs at least three points");
  }
  const PointSet projected = gaussian_project(points, proj);
  const double scale = proj.band_scale();

  OrderPreservationReport report;
  report.conditional_applicable = metric == OrderMetric::Geodesic;

  auto visit = [&](Index i, Index j, Index l) {
    if (metric == OrderMetric::Geodesic) {
      const double a_sq = (points.row(i) - points.row(j)).squaredNorm();
      const double b_sq = (points.row(j) - points.row(l)).squaredNorm();
      if (!(a_sq <= b_sq)) return;
      const double pa_sq = (projected.row(i) - projected.row(j)).squaredNorm();
      const double pb_sq = (projected.row(j) - projected.row(l)).squaredNorm();
      const bool kept = pa_sq <= pb_sq;
      ++report.triples_considered;
      if (kept) ++report.triples_preserved;
      const bool gap = a_sq * (1.0 + epsilon) < b_sq * (1.0 - epsilon);
      if (gap && inside_band(pa_sq, a_sq, epsilon, scale) &&
          inside_band(pb_sq, b_sq, epsilon, scale)) {
        ++report.conditional_triples;
        if (!kept) ++report.conditional_violations;
      }
    } else {
      const Vector xi = points.row(i).transpose();
      const Vector xj = points.row(j).transpose();
      const Vector xl = points.row(l).transpose();
      if (!(angle_between(xi, xj) <= angle_between(xj, xl))) return;
      const Vector pi = projected.row(i).transpose();
      const Vector pj = projected.row(j).transpose();
      const Vector pl = projected.row(l).transpose();
      ++report.triples_considered;
      if (angle_between(pi, pj) <= angle_between(pj, pl)) ++report.triples_preserved;
    }
  };

  const double total = static_cast<double>(n) * static_cast<double>(n - 1) *
                       static_cast<double>(n - 2);
  if (total <= static_cast<double>(max_triples)) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index l = 0; l < n; ++l)
          if (i != j && j != l && i != l) visit(i, j, l);
  } else {
    report.subsampled = true;
    Rng rng(derive_seed(seed, "geometry.order_triples"));
    for (Index t = 0; t < max_triples; ++t) {
      const Index i = uniform_index(n, rng);
      Index j = uniform_index(n - 1, rng);
      if (j >= i) ++j;
      Index l = uniform_index(n - 2, rng);
      if (l >= std::min(i, j)) ++l;
      if (l >= std::max(i, j)) ++l;
      visit(i, j, l);
    }
  }
  report.fraction_preserved =
      report.triples_considered == 0
          ? 1.0
          : static_cast<double>(report.triples_preserved) /
                static_cast<double>(report.triples_considered);
  return report;
}

}  // namespace mheal::geometry
