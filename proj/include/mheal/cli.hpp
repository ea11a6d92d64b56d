#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mheal/common.hpp"

namespace mheal::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

inline constexpr const char* kOutputDirEnv = "MHEAL_OUTPUT_DIR";
inline constexpr const char* kFallbackOutputDir = "mheal_out";

/// $MHEAL_OUTPUT_DIR when set and non-empty, otherwise ./mheal_out.
std::string default_output_dir();

struct RunConfig {
  std::string subcommand;
  std::string input_path;
  std::string input_format = "csv";
  bool header = false;
  bool label_last = false;
  std::string normalize = "standardize";  // l2 | standardize
  std::string output_dir;
  std::uint64_t seed = 0;

  // select / check-bounds
  std::string method = "algorithm1";  // select: algorithm1 | maxmin
  std::string sweep = "maxmin";       // check-bounds: maxmin | sequential
  Index budget = 10;
  Index init = 0;

  // cluster / mheal
  Index k = 3;
  Index tau = 10;
  Index m = 0;
  Index max_iters = 60;

  // match
  std::vector<Index> budgets{100, 200};
  std::string match_method = "l0";
  double beta = 0.552;
  Index bins = 32;

  // boundary
  Index knn_k = 5;
  double fraction = 0.30;
  std::string direction = "high";

  // project
  double epsilon = 1.0;
  double sigma = 1.0;
  Index trials = 10000;
  Index kappa = 0;  // 0 = input dimension

  // prune
  double theta0_iwal = 10.0;
  double theta0_mheal = 3.333;
  Index pool = 10000;
  Index rounds = 500;
  Index seeds = 5;
  bool same_stream = false;

  // energy reported by select
  int s = 0;
};

nlohmann::json to_json(const RunConfig& config);

/// Parses argv into a config. Throws CLI::ParseError (including help/version
/// requests) on bad usage.
RunConfig parse_args(int argc, const char* const* argv);

/// Runs a subcommand, writes its artifacts under config.output_dir and
/// returns the report (config echo, counters, artifacts, warnings, results).
/// The `<subcommand>_report.json` artifact omits wall time so that reruns are
/// byte-identical; the returned report includes it.
nlohmann::json dispatch(const RunConfig& config);

int exit_code_for(ErrorCode code);

/// Whole-process entry point: report on `out`, JSON errors on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mheal::cli
