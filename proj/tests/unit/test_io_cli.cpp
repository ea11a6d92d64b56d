#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mheal/cli.hpp"
#include "mheal/io.hpp"

using namespace mheal;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mheal_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mheal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path diamonds(const fs::path& dir) {
  const auto path = dir / "diamonds.csv";
  std::ofstream f(path);
  f << "1,0.1,0\n1,-0.1,0\n1,0,0.1\n1,0,-0.1\n-1,0.1,0\n-1,-0.1,0\n-1,0,0.1\n-1,0,-0.1\n";
  return path;
}

fs::path labelled(const fs::path& dir, Index n) {
  const auto path = dir / "labelled.csv";
  std::ofstream f(path);
  f << "a,b,c,label\n";
  for (Index i = 0; i < n; ++i) {
    const double a = std::sin(0.7 * static_cast<double>(i)), b = std::cos(1.3 * static_cast<double>(i));
    const double c = std::sin(0.11 * static_cast<double>(i * i));
    f << a << ',' << b << ',' << c << ',' << (a + 0.5 * b > 0.1 ? 1 : 0) << '\n';
  }
  return path;
}

}  // namespace

TEST(Csv, PlainRow) {
  std::istringstream in("1.0,2.0,0.5\n");
  const auto d = io::read_csv(in);
  ASSERT_EQ(d.points.rows(), 1);
  EXPECT_EQ(d.points(0, 0), 1.0);
  EXPECT_EQ(d.points(0, 1), 2.0);
  EXPECT_EQ(d.points(0, 2), 0.5);
  EXPECT_FALSE(d.has_labels());
}

TEST(Csv, HeaderAndLabel) {
  std::istringstream in("x,y,label\n1,2,0\n\n3,4,1\n");
  const auto d = io::read_csv(in, {true, true});
  ASSERT_EQ(d.points.rows(), 2);
  EXPECT_EQ(d.points.cols(), 2);
  EXPECT_EQ(d.labels, (std::vector<double>{0, 1}));
}

TEST(Csv, Errors) {
  std::istringstream bad("1,2\n3,x\n");
  try {
    io::read_csv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream ragged("1,2\n3,4,5\n");
  try {
    io::read_csv(ragged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentDimension);
  }
}

TEST(Libsvm, Densifies) {
  std::istringstream in("+1 1:0.5 3:0.25\n-1 2:1\n");
  const auto d = io::read_libsvm(in);
  ASSERT_EQ(d.points.rows(), 2);
  ASSERT_EQ(d.points.cols(), 3);
  EXPECT_EQ(d.labels, (std::vector<double>{1, -1}));
  EXPECT_EQ(d.points(0, 0), 0.5);
  EXPECT_EQ(d.points(0, 1), 0.0);
  EXPECT_EQ(d.points(0, 2), 0.25);
  EXPECT_EQ(d.points(1, 1), 1.0);
  std::istringstream bad("1 0:3\n");
  EXPECT_THROW(io::read_libsvm(bad), Error);
}

TEST(Idx, HandBuiltTensor) {
  const unsigned char bytes[] = {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2,
                                 0, 51, 102, 255, 255, 0, 0, 0};
  std::istringstream in(std::string(reinterpret_cast<const char*>(bytes), sizeof bytes));
  const auto d = io::read_idx(in);
  ASSERT_EQ(d.points.rows(), 2);
  ASSERT_EQ(d.points.cols(), 4);
  EXPECT_EQ(d.points(0, 1), 0.2);
  EXPECT_EQ(d.points(0, 3), 1.0);
  EXPECT_EQ(d.points(1, 0), 1.0);
  for (Index r = 0; r < 2; ++r)
    for (Index c = 0; c < 4; ++c) {
      EXPECT_GE(d.points(r, c), 0.0);
      EXPECT_LE(d.points(r, c), 1.0);
    }
}

TEST(Idx, TruncatedPayload) {
  const unsigned char bytes[] = {0, 0, 8, 1, 0, 0, 0, 9, 1, 2};
  std::istringstream in(std::string(reinterpret_cast<const char*>(bytes), sizeof bytes));
  EXPECT_THROW(io::read_idx(in), Error);
}

TEST(Format, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
}

TEST(Cli, MhealOnDiamondsWritesFourIndices) {
  const auto dir = scratch("diamonds");
  const auto res = invoke({"mheal", "-i", diamonds(dir).string(), "--k", "2", "--tau", "2",
                           "--normalize", "l2", "-o", (dir / "out").string()});
  ASSERT_EQ(res.code, 0) << res.err;
  EXPECT_EQ(lines(slurp(dir / "out" / "mheal_indices.csv")).size(), 4u);
  const auto report = nlohmann::json::parse(res.out);
  EXPECT_EQ(report["config"]["tau"], 2);
  EXPECT_TRUE(report.contains("wall_time_ms"));
}

TEST(Cli, MatchWritesOneRowPerBudget) {
  const auto dir = scratch("match");
  const auto res = invoke({"match", "-i", labelled(dir, 300).string(), "--header", "--label-last",
                           "--budgets", "100,200", "-o", dir.string()});
  ASSERT_EQ(res.code, 0) << res.err;
  const auto rows = lines(slurp(dir / "match_losses.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "budget,kl,mmd,mmd_mu");
  EXPECT_EQ(rows[1].substr(0, 4), "100,");
  EXPECT_EQ(rows[2].substr(0, 4), "200,");
}

TEST(Cli, PruneWritesThreeCurves) {
  const auto dir = scratch("prune");
  const auto res = invoke({"prune", "-i", labelled(dir, 200).string(), "--header", "--label-last",
                           "--theta0-iwal", "10", "--theta0-mheal", "3.333", "--k", "3", "--pool",
                           "10000", "--rounds", "60", "--seeds", "2", "-o", dir.string()});
  ASSERT_EQ(res.code, 0) << res.err;
  for (const char* name : {"prune_survivors.csv", "prune_error.csv", "prune_labels.csv"}) {
    const auto rows = lines(slurp(dir / name));
    ASSERT_EQ(rows.size(), 61u) << name;
    EXPECT_EQ(rows[0], "t,iwal_mean,iwal_std,mheal_mean,mheal_std");
  }
}

TEST(Cli, RerunIsByteIdentical) {
  const auto dir = scratch("rerun");
  const auto input = labelled(dir, 120).string();
  const auto out = (dir / "out").string();
  for (std::vector<std::string> args :
       {std::vector<std::string>{"select", "--budget", "6"}, {"cluster", "--k", "4"},
        {"mheal", "--k", "3", "--tau", "4"}, {"match", "--budgets", "10,20", "--method", "l1"},
        {"boundary"}, {"project", "--trials", "200"}, {"check-bounds", "--budget", "9"},
        {"prune", "--rounds", "30", "--pool", "300", "--seeds", "2"}}) {
    for (const auto& extra : {"-i", input.c_str(), "--header", "--label-last", "-o", out.c_str(), "--seed", "17"})
      args.push_back(extra);
    const auto first = invoke(args);
    ASSERT_EQ(first.code, 0) << args[0] << ": " << first.err;
    std::map<std::string, std::string> snapshot;
    for (const auto& entry : fs::directory_iterator(out)) snapshot[entry.path().string()] = slurp(entry.path());
    const auto second = invoke(args);
    ASSERT_EQ(second.code, 0);
    for (const auto& [path, contents] : snapshot) EXPECT_EQ(slurp(path), contents) << path;
    const auto report = nlohmann::json::parse(first.out);
    EXPECT_EQ(report["config"]["seed"], 17);
    EXPECT_EQ(report["config"]["subcommand"], args[0]);
    fs::remove_all(out);
  }
}

TEST(Cli, ExitCodesAndJsonErrors) {
  const auto dir = scratch("errors");
  auto res = invoke({});
  EXPECT_EQ(res.code, cli::kUsage);
  EXPECT_EQ(nlohmann::json::parse(res.err)["exit_code"], 1);

  res = invoke({"select", "-i", (dir / "missing.csv").string(), "-o", dir.string()});
  EXPECT_EQ(res.code, cli::kData);
  EXPECT_EQ(nlohmann::json::parse(res.err)["error"], "Io");

  res = invoke({"select", "-i", diamonds(dir).string(), "--budget", "50", "-o", dir.string()});
  EXPECT_EQ(res.code, cli::kData);
  EXPECT_EQ(nlohmann::json::parse(res.err)["error"], "BudgetExceedsPool");

  res = invoke({"boundary", "-i", diamonds(dir).string(), "--direction", "sideways"});
  EXPECT_EQ(res.code, cli::kUsage);

  {
    std::ofstream f(dir / "dups.csv");
    f << "1,0\n1,0\n";
  }
  res = invoke({"select", "--method", "maxmin", "--budget", "2", "--normalize", "l2", "-i",
                (dir / "dups.csv").string(), "--s", "2", "-o", dir.string()});
  EXPECT_EQ(res.code, 0);  // an infinite energy is reported, not an error
  EXPECT_EQ(nlohmann::json::parse(res.out)["results"]["energy"]["value"], "inf");
  EXPECT_EQ(cli::exit_code_for(ErrorCode::DuplicatePoints), cli::kNumeric);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::ParseError), cli::kData);
}

TEST(Cli, OutputDirFromEnvironment) {
  const auto dir = scratch("env");
  ::setenv(cli::kOutputDirEnv, (dir / "from_env").string().c_str(), 1);
  const auto res = invoke({"cluster", "--k", "2", "-i", diamonds(dir).string()});
  ::unsetenv(cli::kOutputDirEnv);
  ASSERT_EQ(res.code, 0) << res.err;
  EXPECT_TRUE(fs::exists(dir / "from_env" / "cluster_assignments.csv"));
  EXPECT_EQ(cli::default_output_dir(), "mheal_out");
}
