#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mheal/clustering.hpp"
#include "mheal/common.hpp"
#include "mheal/evaluation.hpp"
#include "mheal/geometry.hpp"
#include "mheal/pipeline.hpp"
#include "mheal/selection.hpp"
#include "mheal/versionspace.hpp"

namespace mheal::io {

enum class InputFormat { Csv, Libsvm, Idx };

InputFormat parse_format(std::string_view name);

struct CsvOptions {
  bool header = false;      // skip the first non-empty line
  bool label_last = false;  // final column is a label
};

struct Dataset {
  PointSet points;
  std::vector<double> labels;  // empty when the input carries none
  bool has_labels() const noexcept { return !labels.empty(); }
};

/// Comma-separated reals, one row per line. Blank lines are skipped.
Dataset read_csv(std::istream& in, const CsvOptions& options = {});
/// "label idx:val ..." with 1-based indices, densified to the largest index.
Dataset read_libsvm(std::istream& in);
/// Big-endian IDX unsigned-byte tensors (magic 0x0000 08 <ndim>). The first
/// dimension indexes rows; the rest are flattened row-major and scaled by 1/255.
/// A one-dimensional file is read as a label vector.
Dataset read_idx(std::istream& in);

Dataset ingest(const std::filesystem::path& path, InputFormat format,
               const CsvOptions& options = {});

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

void write_text(const std::filesystem::path& path, const std::string& contents);
std::string index_csv(std::span<const Index> indices);
std::string matrix_csv(const Matrix& rows);

nlohmann::json to_json(const Warnings& warnings);
nlohmann::json to_json(const energy::EnergyValue& value);
nlohmann::json to_json(const clustering::ClusterModel& model);
nlohmann::json to_json(const pipeline::RepresentativeSet& reps);
nlohmann::json to_json(const evaluation::MatchReport& report);
nlohmann::json to_json(const evaluation::BoundaryPartition& partition);
nlohmann::json to_json(const geometry::ConcentrationReport& report);
nlohmann::json to_json(const geometry::OrderPreservationReport& report);
nlohmann::json to_json(const selection::BoundReport& report);
nlohmann::json to_json(const selection::ChordEnvelope& envelope);
nlohmann::json to_json(const versionspace::ThetaSpec& theta);

}  // namespace mheal::io
