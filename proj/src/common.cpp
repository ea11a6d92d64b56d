#include "mheal/common.hpp"

#include <sstream>

namespace mheal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FewerThanTwoPoints: return "FewerThanTwoPoints";
    case ErrorCode::FewerThanThreePoints: return "FewerThanThreePoints";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::BudgetExceedsPool: return "BudgetExceedsPool";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::KExceedsDistinctPoints: return "KExceedsDistinctPoints";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::NoSurvivors: return "NoSurvivors";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InconsistentDimension: return "InconsistentDimension";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

UnitPointSet UnitPointSet::from_unit_rows(Matrix rows, double tol) {
  for (Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (std::abs(norm - 1.0) > tol) {
      std::ostringstream msg;
      msg << "row " << i << " has norm " << norm << ", expected 1";
      throw Error(ErrorCode::ZeroNormRow, msg.str());
    }
  }
  return UnitPointSet(std::move(rows));
}

UnitPointSet UnitPointSet::normalized(Matrix rows) {
  for (Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::ZeroNormRow, "row " + std::to_string(i) + " cannot be normalized");
    }
    rows.row(i) /= norm;
  }
  return UnitPointSet(std::move(rows));
}

UnitPointSet UnitPointSet::subset(const std::vector<Index>& indices) const {
  Matrix out(static_cast<Index>(indices.size()), dim());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.row(static_cast<Index>(r)) = rows_.row(indices[r]);
  }
  return UnitPointSet(std::move(out));
}

}  // namespace mheal
