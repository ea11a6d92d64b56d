#include <gtest/gtest.h>

#include <random>

#include "mheal/geometry.hpp"
#include "oracles.hpp"

using namespace mheal;
using namespace mheal::geometry;

namespace {

Matrix gaussian(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, d);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < d; ++c) m(r, c) = g(rng);
  return m;
}

}  // namespace

TEST(Normalize, L2Examples) {
  Matrix m(2, 2);
  m << 3, 4, 1, 0;
  const auto out = normalize_to_sphere(m, NormalizeMode::L2);
  EXPECT_NEAR(out.points.row(0)(0), 0.6, 1e-15);
  EXPECT_NEAR(out.points.row(0)(1), 0.8, 1e-15);
  EXPECT_EQ(out.points.row(1)(0), 1.0);
  EXPECT_EQ(out.points.row(1)(1), 0.0);
  EXPECT_TRUE(out.warnings.empty());
}

TEST(Normalize, ZeroRowFails) {
  Matrix m(1, 2);
  m << 0, 0;
  try {
    normalize_to_sphere(m, NormalizeMode::L2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroNormRow);
  }
}

TEST(Normalize, ConstantColumnWarnsAndStaysUnscaled) {
  Matrix m(3, 3);
  m << 1, 5, 2, 2, 5, 0, 3, 5, 1;
  const auto out = normalize_to_sphere(m, NormalizeMode::StandardizeThenL2);
  ASSERT_EQ(out.warnings.size(), 1u);
  EXPECT_EQ(out.warnings[0].code, "ZeroVarianceColumn");
  for (Index r = 0; r < 3; ++r) EXPECT_EQ(out.points.row(r)(1), 0.0);
}

TEST(Normalize, StandardizedRowsAreUnit) {
  const auto out = normalize_to_sphere(gaussian(30, 4, 1) * 7.0, NormalizeMode::StandardizeThenL2);
  for (Index r = 0; r < 30; ++r) EXPECT_NEAR(out.points.row(r).norm(), 1.0, 1e-14);
}

TEST(NormalizeProperty, L2IsIdempotent) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto once = normalize_to_sphere(gaussian(10, 1 + seed % 6, seed), NormalizeMode::L2);
    const auto twice = normalize_to_sphere(once.points.rows(), NormalizeMode::L2);
    EXPECT_LE((once.points.rows() - twice.points.rows()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PadExtend, AppendsZero) {
  Matrix m(1, 2);
  m << 1, 2;
  const auto p = pad_extend(m);
  ASSERT_EQ(p.cols(), 3);
  EXPECT_EQ(p(0, 0), 1.0);
  EXPECT_EQ(p(0, 1), 2.0);
  EXPECT_EQ(p(0, 2), 0.0);
}

TEST(PadExtend, EmptySetKeepsDeclaredDimension) {
  const auto p = pad_extend(Matrix(0, 4));
  EXPECT_EQ(p.rows(), 0);
  EXPECT_EQ(p.cols(), 5);
}

TEST(PadExtendProperty, PairwiseDistancesUnchanged) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = gaussian(8, 1 + seed % 5, seed);
    const auto before = oracle::rows_of(m);
    const auto after = oracle::rows_of(pad_extend(m));
    for (std::size_t i = 0; i < before.size(); ++i)
      for (std::size_t j = 0; j < before.size(); ++j)
        EXPECT_EQ(oracle::dist(before[i], before[j]), oracle::dist(after[i], after[j]));
  }
}

TEST(Projection, IdentityReturnsInput) {
  const Matrix m = gaussian(6, 3, 2);
  const auto out = gaussian_project(m, ProjectionMatrix::identity(3));
  EXPECT_EQ((out - m).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Projection, SeededGenerationIsBitExact) {
  const Matrix row = gaussian(1, 4, 9);
  const auto a = gaussian_project(row, ProjectionMatrix::generate(4, 4, 1.0, 42));
  const auto b = gaussian_project(row, ProjectionMatrix::generate(4, 4, 1.0, 42));
  for (Index c = 0; c < 4; ++c) EXPECT_EQ(a(0, c), b(0, c));
  const auto other = gaussian_project(row, ProjectionMatrix::generate(4, 4, 1.0, 43));
  EXPECT_NE(a(0, 0), other(0, 0));
}

TEST(Projection, DimensionMismatch) {
  try {
    gaussian_project(gaussian(2, 3, 0), ProjectionMatrix::generate(4, 4, 1.0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Projection, EntriesScaleWithKappa) {
  // Entries are N(0, sigma^2) / sqrt(kappa), so kappa * mean(entry^2) ~ sigma^2.
  const auto p = ProjectionMatrix::generate(200, 200, 2.0, 5);
  const double ms = p.entries.array().square().mean() * 200.0;
  EXPECT_NEAR(ms, 4.0, 0.1);
  EXPECT_EQ(p.band_scale(), 4.0);
}

TEST(ConcentrationProperty, BoundFormula) {
  for (Index kappa = 1; kappa < 80; kappa += 7) {
    for (double eps : {0.05, 0.3, 0.5, 1.0}) {
      const double expect = 2.0 * std::exp(-static_cast<double>(kappa) * eps * eps / 8.0);
      EXPECT_NEAR(concentration_bound(kappa, eps), expect, 1e-15 * expect);
    }
  }
}

TEST(Concentration, FiftyDimensionalGaussian) {
  const auto report = concentration_test(gaussian(200, 50, 17), 1.0, 1.0, 10000, 4);
  EXPECT_EQ(report.kappa, 50);
  EXPECT_FALSE(report.vacuous);
  EXPECT_NEAR(report.bound, 2.0 * std::exp(-6.25), 1e-15);
  EXPECT_LE(report.violation_rate, 0.0039 + 3.0 * std::sqrt(0.0039 / 10000.0));
}

TEST(Concentration, FlagsVacuousBound) {
  const auto report = concentration_test(gaussian(10, 4, 1), 0.5, 1.0, 100, 0);
  EXPECT_TRUE(report.vacuous);
  ASSERT_FALSE(report.warnings.empty());
  EXPECT_EQ(report.warnings[0].code, "VacuousBound");
}

TEST(Concentration, NeedsTwoPoints) {
  try {
    concentration_test(gaussian(1, 3, 0), 0.5, 1.0, 10, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FewerThanTwoPoints);
  }
}

TEST(OrderPreservation, IdentityPreservesEverything) {
  const Matrix m = gaussian(12, 3, 8);
  for (auto metric : {OrderMetric::Geodesic, OrderMetric::Angle}) {
    const auto r = order_preservation_check(m, ProjectionMatrix::identity(3), metric, 0.5);
    EXPECT_GT(r.triples_considered, 0);
    EXPECT_EQ(r.fraction_preserved, 1.0);
    EXPECT_FALSE(r.subsampled);
  }
}

TEST(OrderPreservation, CollinearPoints) {
  Matrix m(3, 1);
  m << 0, 1, 3;
  const auto r = order_preservation_check(m, ProjectionMatrix::identity(1), OrderMetric::Geodesic, 0.1);
  EXPECT_GT(r.triples_considered, 0);
  EXPECT_EQ(r.triples_preserved, r.triples_considered);
}

TEST(OrderPreservation, NeedsThreePoints) {
  try {
    order_preservation_check(gaussian(2, 2, 0), ProjectionMatrix::identity(2), OrderMetric::Angle, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FewerThanThreePoints);
  }
}

TEST(OrderPreservation, SubsamplesLargeInputs) {
  const auto r = order_preservation_check(gaussian(60, 5, 3), ProjectionMatrix::generate(5, 5, 1.0, 1),
                                          OrderMetric::Geodesic, 0.3, 5000, 2);
  EXPECT_TRUE(r.subsampled);
  EXPECT_LE(r.triples_considered, 5000);
}

TEST(OrderPreservationProperty, ConditionalImplicationNeverFails) {
  Index checked = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Index d = 3 + static_cast<Index>(seed % 10);
    const Matrix m = gaussian(15, d, seed);
    const auto proj = ProjectionMatrix::generate(d, d, 1.0, seed + 100);
    for (double eps : {0.1, 0.3, 0.6}) {
      const auto r = order_preservation_check(m, proj, OrderMetric::Geodesic, eps);
      EXPECT_TRUE(r.conditional_applicable);
      EXPECT_EQ(r.conditional_violations, 0);
      checked += r.conditional_triples;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Angle, ClampsRoundingOutsideUnitInterval) {
  Vector u(2), v(2);
  u << 1e-170, 1e-170;
  v << 3e-170, 3e-170;
  EXPECT_FALSE(std::isnan(angle_between(u, v)));
  u << 1, 0;
  v << -1, 0;
  EXPECT_NEAR(angle_between(u, v), std::acos(-1.0), 1e-15);
}
