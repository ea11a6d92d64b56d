#include "mheal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mheal::io {
namespace {

[[noreturn]] void parse_error(Index line, const std::string& reason) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + reason);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view token, Index line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    parse_error(line, "cannot parse '" + std::string(token) + "' as a number");
  }
  return value;
}

Dataset assemble(const std::vector<std::vector<double>>& rows, Index dim,
                 std::vector<double> labels) {
  Dataset out;
  out.points.resize(static_cast<Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Index c = 0; c < dim; ++c) {
      out.points(static_cast<Index>(r), c) = c < static_cast<Index>(rows[r].size()) ? rows[r][c] : 0.0;
    }
  }
  out.labels = std::move(labels);
  return out;
}

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

InputFormat parse_format(std::string_view name) {
  if (name == "csv") return InputFormat::Csv;
  if (name == "libsvm") return InputFormat::Libsvm;
  if (name == "idx") return InputFormat::Idx;
  throw Error(ErrorCode::InvalidArgument, "unknown input format '" + std::string(name) + "'");
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  Index dim = -1;
  bool skipped_header = !options.header;
  std::string text;
  Index line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (trim(text).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    std::string_view rest(text);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_real(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (options.label_last) {
      if (row.size() < 2) parse_error(line_no, "need at least one feature and a label");
      labels.push_back(row.back());
      row.pop_back();
    }
    if (dim < 0) dim = static_cast<Index>(row.size());
    if (static_cast<Index>(row.size()) != dim) {
      throw Error(ErrorCode::InconsistentDimension,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " features, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return assemble(rows, std::max<Index>(dim, 0), std::move(labels));
}

Dataset read_libsvm(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  Index dim = 0;
  std::string text;
  Index line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::istringstream tokens{std::string(trim(text))};
    std::string token;
    if (!(tokens >> token)) continue;
    labels.push_back(parse_real(token, line_no));
    std::vector<double> row;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) parse_error(line_no, "expected idx:val, got '" + token + "'");
      const double raw_index = parse_real(std::string_view(token).substr(0, colon), line_no);
      const auto index = static_cast<Index>(raw_index);
      if (index < 1 || static_cast<double>(index) != raw_index) {
        parse_error(line_no, "feature index must be a positive integer");
      }
      if (static_cast<Index>(row.size()) < index) row.resize(static_cast<std::size_t>(index), 0.0);
      row[index - 1] = parse_real(std::string_view(token).substr(colon + 1), line_no);
      dim = std::max(dim, index);
    }
    rows.push_back(std::move(row));
  }
  return assemble(rows, dim, std::move(labels));
}

Dataset read_idx(std::istream& in) {
  unsigned char header[4];
  if (!in.read(reinterpret_cast<char*>(header), 4)) parse_error(0, "truncated IDX header");
  if (header[0] != 0 || header[1] != 0) parse_error(0, "bad IDX magic number");
  if (header[2] != 0x08) parse_error(0, "only unsigned-byte IDX payloads are supported");
  const int ndim = header[3];
  if (ndim < 1) parse_error(0, "IDX tensor needs at least one dimension");
  std::vector<Index> dims;
  for (int i = 0; i < ndim; ++i) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) parse_error(0, "truncated IDX dimensions");
    dims.push_back((Index{b[0]} << 24) | (Index{b[1]} << 16) | (Index{b[2]} << 8) | Index{b[3]});
  }
  Index features = 1;
  for (int i = 1; i < ndim; ++i) features *= dims[static_cast<std::size_t>(i)];
  const Index rows = dims[0];
  std::vector<unsigned char> payload(static_cast<std::size_t>(rows * features));
  if (!in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()))) {
    parse_error(0, "IDX payload shorter than its header declares");
  }
  Dataset out;
  if (ndim == 1) {
    out.points.resize(rows, 0);
    for (unsigned char v : payload) out.labels.push_back(static_cast<double>(v));
    return out;
  }
  out.points.resize(rows, features);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < features; ++c) {
      out.points(r, c) = static_cast<double>(payload[static_cast<std::size_t>(r * features + c)]) / 255.0;
    }
  }
  return out;
}

Dataset ingest(const std::filesystem::path& path, InputFormat format, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  switch (format) {
    case InputFormat::Csv: return read_csv(in, options);
    case InputFormat::Libsvm: return read_libsvm(in);
    case InputFormat::Idx: return read_idx(in);
  }
  return {};
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << contents;
}

std::string index_csv(std::span<const Index> indices) {
  std::string out;
  for (Index i : indices) out += std::to_string(i) + "\n";
  return out;
}

std::string matrix_csv(const Matrix& rows) {
  std::string out;
  for (Index r = 0; r < rows.rows(); ++r) {
    for (Index c = 0; c < rows.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_double(rows(r, c));
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Warnings& warnings) {
  auto out = nlohmann::json::array();
  for (const auto& w : warnings) out.push_back({{"code", w.code}, {"message", w.message}});
  return out;
}

nlohmann::json to_json(const energy::EnergyValue& value) {
  nlohmann::json out = {{"s", value.s},
                        {"value", num(value.value)},
                        {"pair_count", value.pair_count},
                        {"min_pair_distance", num(value.min_pair_distance)}};
  if (value.duplicate) out["duplicate"] = {value.duplicate->first, value.duplicate->second};
  return out;
}

nlohmann::json to_json(const clustering::ClusterModel& model) {
  auto centers = nlohmann::json::array();
  for (Index c = 0; c < model.centers.rows(); ++c) {
    std::vector<double> row(model.centers.row(c).data(),
                            model.centers.row(c).data() + model.centers.cols());
    centers.push_back(row);
  }
  return {{"k", model.k()},
          {"centers", centers},
          {"assignments", model.assignments},
          {"objective", num(model.objective)},
          {"iterations_run", model.iterations_run},
          {"converged", model.converged},
          {"reseeds", model.reseeds},
          {"seed", model.seed}};
}

nlohmann::json to_json(const pipeline::RepresentativeSet& reps) {
  auto clusters = nlohmann::json::array();
  for (std::size_t c = 0; c < reps.per_cluster.size(); ++c) {
    std::vector<double> radii = reps.radii[c];
    clusters.push_back({{"cluster", c},
                        {"selected", reps.per_cluster[c]},
                        {"start", reps.starts[c]},
                        {"rotation_candidates", reps.candidates[c]},
                        {"radii", radii},
                        {"energy", to_json(reps.cluster_energy[c])},
                        {"distance_evals", reps.distance_evals[c]}});
  }
  return {{"size", reps.flat.size()}, {"selected", reps.flat}, {"clusters", clusters}};
}

nlohmann::json to_json(const evaluation::MatchReport& report) {
  return {{"kl", num(report.kl)},     {"mmd", num(report.mmd)}, {"mmd_mu", num(report.mmd_mu)},
          {"beta", num(report.beta)}, {"n", report.n},          {"m", report.m},
          {"bins", report.bins},
          {"kl_binning", "per-feature min-max scaled to [0,1], equal-width bins, averaged"}};
}

nlohmann::json to_json(const evaluation::BoundaryPartition& partition) {
  auto scores = nlohmann::json::array();
  for (double s : partition.scores) scores.push_back(num(s));
  return {{"in_version_space", partition.in_version_space},
          {"out_version_space", partition.out_version_space},
          {"scores", scores},
          {"knn_k", partition.knn_k},
          {"fraction", partition.fraction},
          {"warnings", to_json(partition.warnings)}};
}

nlohmann::json to_json(const geometry::ConcentrationReport& report) {
  return {{"epsilon", report.epsilon},
          {"kappa", report.kappa},
          {"trials", report.trials},
          {"violations", report.violations},
          {"violation_rate", report.violation_rate},
          {"bound", report.bound},
          {"within_bound", report.within_bound},
          {"vacuous", report.vacuous},
          {"projection_scale", "entries r/sqrt(kappa), r ~ N(0, sigma^2); band centered at sigma^2 * squared distance"},
          {"warnings", to_json(report.warnings)}};
}

nlohmann::json to_json(const geometry::OrderPreservationReport& report) {
  return {{"triples_considered", report.triples_considered},
          {"triples_preserved", report.triples_preserved},
          {"fraction_preserved", report.fraction_preserved},
          {"subsampled", report.subsampled},
          {"conditional_applicable", report.conditional_applicable},
          {"conditional_triples", report.conditional_triples},
          {"conditional_violations", report.conditional_violations}};
}

nlohmann::json to_json(const selection::BoundReport& r) {
  return {{"n", r.n},
          {"candidate_min_distance", num(r.candidate_min_distance)},
          {"selected_min_distance", num(r.selected_min_distance)},
          {"log_lower", num(r.log_lower)},
          {"log_middle", num(r.log_middle)},
          {"log_middle_power", num(r.log_middle_power)},
          {"log_energy", num(r.log_energy)},
          {"hypothesis_holds", r.hypothesis_holds},
          {"chain_holds", r.chain_holds},
          {"power_chain_holds", r.power_chain_holds},
          {"log_upper_loss", num(r.log_upper_loss)},
          {"root_upper_loss", num(r.root_upper_loss)}};
}

nlohmann::json to_json(const selection::ChordEnvelope& e) {
  return {{"min_chord", num(e.min_chord)},
          {"max_chord", num(e.max_chord)},
          {"pool_lower", num(e.pool_lower)},
          {"pool_upper", num(e.pool_upper)}};
}

nlohmann::json to_json(const versionspace::ThetaSpec& theta) {
  return {{"xi", theta.xi}, {"r", theta.r}, {"k", theta.k}, {"theta", theta.theta}};
}

}  // namespace mheal::io
