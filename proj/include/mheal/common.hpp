#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace mheal {

using Index = std::ptrdiff_t;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// A raw n x d feature matrix; one candidate per row.
using PointSet = Matrix;

/// Pairwise distances below this are treated as coincident points.
inline constexpr double kDupTol = 1e-12;

enum class ErrorCode {
  InvalidArgument,
  ZeroNormRow,
  DimensionMismatch,
  FewerThanTwoPoints,
  FewerThanThreePoints,
  DuplicatePoints,
  BudgetExceedsPool,
  PoolExhausted,
  KExceedsDistinctPoints,
  EmptySubset,
  EmptyData,
  NoSurvivors,
  ParseError,
  InconsistentDimension,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Non-fatal condition surfaced to the caller (and echoed into CLI reports).
struct Warning {
  std::string code;
  std::string message;
};

using Warnings = std::vector<Warning>;

/// Rows whose l2 norm is 1 (within 1e-12). Only constructible through a
/// checked factory or the normalizers in geometry.hpp.
class UnitPointSet {
 public:
  UnitPointSet() = default;

  /// Validates that every row is unit-norm within `tol`; throws ZeroNormRow
  /// (reusing the normalization error) for the first offending row.
  static UnitPointSet from_unit_rows(Matrix rows, double tol = 1e-12);

  /// Renormalizes each row; throws ZeroNormRow on a zero row.
  static UnitPointSet normalized(Matrix rows);

  const Matrix& rows() const noexcept { return rows_; }
  Index size() const noexcept { return rows_.rows(); }
  Index dim() const noexcept { return rows_.cols(); }
  auto row(Index i) const { return rows_.row(i); }

  /// Copies the given rows, in order, into a new set.
  UnitPointSet subset(const std::vector<Index>& indices) const;

 private:
  explicit UnitPointSet(Matrix rows) : rows_(std::move(rows)) {}
  Matrix rows_;
};

/// Euclidean distance between two rows, summed in coordinate order so the
/// result is bitwise symmetric in its arguments.
template <typename A, typename B>
double row_distance(const A& a, const B& b) {
  double acc = 0.0;
  for (Index c = 0; c < a.size(); ++c) {
    const double diff = a(c) - b(c);
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

/// Returns true when `candidate` beats `best` by more than a relative 1e-12.
/// Used by the start searches, where symmetric configurations produce
/// energies that differ only in the last bits.
inline bool exceeds_with_tie_tolerance(double candidate, double best) {
  constexpr double kTieTol = 1e-12;
  const double scale = std::max(1.0, std::abs(best));
  return candidate > best + kTieTol * scale;
}

inline bool within_tie_tolerance(double a, double b) {
  return !exceeds_with_tie_tolerance(a, b) && !exceeds_with_tie_tolerance(b, a);
}

}  // namespace mheal
