#include "mheal/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "mheal/clustering.hpp"
#include "mheal/energy.hpp"
#include "mheal/evaluation.hpp"
#include "mheal/geometry.hpp"
#include "mheal/io.hpp"
#include "mheal/pipeline.hpp"
#include "mheal/random.hpp"
#include "mheal/selection.hpp"
#include "mheal/versionspace.hpp"

namespace mheal::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void usage(const std::string& message) {
  throw Error(ErrorCode::InvalidArgument, message);
}

geometry::NormalizeMode normalize_mode(const std::string& name) {
  if (name == "l2") return geometry::NormalizeMode::L2;
  if (name == "standardize") return geometry::NormalizeMode::StandardizeThenL2;
  usage("unknown normalization '" + name + "' (expected l2 or standardize)");
}

// Collects artifacts and warnings while a subcommand runs.
class Session {
 public:
  explicit Session(const RunConfig& config) : config_(config), dir_(config.output_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& contents) {
    const auto path = dir_ / name;
    io::write_text(path, contents);
    artifacts_.push_back(path.string());
  }

  void warn(const Warnings& warnings) {
    for (const auto& w : warnings) warnings_.push_back(w);
  }

  io::Dataset load() const {
    io::CsvOptions options;
    options.header = config_.header;
    options.label_last = config_.label_last;
    auto data = io::ingest(config_.input_path, io::parse_format(config_.input_format), options);
    if (data.points.rows() == 0) throw Error(ErrorCode::EmptyData, "input has no rows");
    return data;
  }

  UnitPointSet load_unit() { return normalize(load().points); }

  UnitPointSet normalize(const PointSet& points) {
    auto normalized = geometry::normalize_to_sphere(points, normalize_mode(config_.normalize));
    warn(normalized.warnings);
    return std::move(normalized.points);
  }

  json counters = json::object();
  json results = json::object();

  json finish() {
    json report;
    report["subcommand"] = config_.subcommand;
    report["config"] = to_json(config_);
    report["counters"] = counters;
    auto name = config_.subcommand;
    std::replace(name.begin(), name.end(), '-', '_');
    const auto report_path = dir_ / (name + "_report.json");
    artifacts_.push_back(report_path.string());
    report["artifacts"] = artifacts_;
    report["warnings"] = io::to_json(warnings_);
    report["results"] = results;
    io::write_text(report_path, report.dump(2) + "\n");
    return report;
  }

 private:
  const RunConfig& config_;
  fs::path dir_;
  std::vector<std::string> artifacts_;
  Warnings warnings_;
};

std::string curve_csv(const versionspace::Curve& curve) {
  std::string out = "t,iwal_mean,iwal_std,mheal_mean,mheal_std\n";
  for (std::size_t t = 0; t < curve.iwal_mean.size(); ++t) {
    out += std::to_string(t + 1) + ',' + io::format_double(curve.iwal_mean[t]) + ',' +
           io::format_double(curve.iwal_std[t]) + ',' + io::format_double(curve.mheal_mean[t]) +
           ',' + io::format_double(curve.mheal_std[t]) + '\n';
  }
  return out;
}

void run_select(const RunConfig& config, Session& session) {
  const auto pool = session.load_unit();
  std::vector<Index> selected;
  if (config.method == "algorithm1") {
    auto result = selection::run_algorithm1(pool, config.budget);
    session.warn(result.warnings);
    selected = result.selected;
    session.counters["distance_evals"] = result.distance_evals;
    session.results["best_start"] = result.best_start;
  } else if (config.method == "maxmin") {
    if (config.init < 0 || config.init >= pool.size()) usage("--init is out of range");
    auto result = selection::maxmin_select(pool, config.budget, config.init);
    selected = result.selected;
    session.counters["distance_evals"] = result.distance_evals;
    session.results["radii"] = result.radii;
  } else {
    usage("select --method must be algorithm1 or maxmin");
  }
  session.results["selected"] = selected;
  session.results["energy"] = io::to_json(energy::energy(pool, selected, config.s));
  session.write("select_indices.csv", io::index_csv(selected));
}

void run_cluster(const RunConfig& config, Session& session) {
  const auto pool = session.load_unit();
  const auto model = clustering::spherical_kmeans(pool, config.k, config.max_iters,
                                                  derive_seed(config.seed, "clustering"));
  session.counters["iterations"] = model.iterations_run;
  session.counters["reseeds"] = model.reseeds;
  session.results["objective"] = model.objective;
  session.results["converged"] = model.converged;
  session.write("cluster_assignments.csv", io::index_csv(model.assignments));
  session.write("cluster_model.json", io::to_json(model).dump(2) + "\n");
}

void run_mheal_cmd(const RunConfig& config, Session& session) {
  pipeline::MhealConfig cfg;
  cfg.k = config.k;
  cfg.tau = config.tau;
  cfg.m = config.m;
  cfg.seed = config.seed;
  cfg.normalize_mode = normalize_mode(config.normalize);
  cfg.max_iters = config.max_iters;
  const auto result = pipeline::run_mheal(session.load().points, cfg);
  session.warn(result.warnings);
  std::uint64_t evals = 0;
  for (auto e : result.reps.distance_evals) evals += e;
  session.counters["distance_evals"] = evals;
  session.counters["kmeans_iterations"] = result.model.iterations_run;
  session.results["size"] = result.reps.flat.size();
  session.results["objective"] = result.model.objective;
  session.write("mheal_indices.csv", io::index_csv(result.reps.flat));
  json doc = io::to_json(result.reps);
  doc["model"] = io::to_json(result.model);
  session.write("mheal_representatives.json", doc.dump(2) + "\n");
}

void run_match(const RunConfig& config, Session& session) {
  // Subsets are chosen on the sphere but scored against the input features.
  auto data = session.load();
  const auto pool = session.normalize(data.points);
  const auto method = evaluation::parse_selection_method(config.match_method);
  const evaluation::DistributionMatcher matcher(std::move(data.points), config.bins);
  std::string csv = "budget,kl,mmd,mmd_mu\n";
  json rows = json::array();
  for (Index budget : config.budgets) {
    const auto seed = derive_seed(config.seed, "cli.match", static_cast<std::uint64_t>(budget));
    const auto indices = evaluation::select_subset(method, pool, budget, seed);
    const auto report = matcher.evaluate_rows(indices, config.beta);
    csv += std::to_string(budget) + ',' + io::format_double(report.kl) + ',' +
           io::format_double(report.mmd) + ',' + io::format_double(report.mmd_mu) + '\n';
    auto row = io::to_json(report);
    row["budget"] = budget;
    rows.push_back(row);
  }
  session.counters["budgets"] = config.budgets.size();
  session.results["losses"] = rows;
  session.write("match_losses.csv", csv);
}

void run_boundary(const RunConfig& config, Session& session) {
  evaluation::EnergyDirection direction;
  if (config.direction == "high") {
    direction = evaluation::EnergyDirection::HighEnergy;
  } else if (config.direction == "low") {
    direction = evaluation::EnergyDirection::LowEnergy;
  } else {
    usage("--direction must be high or low");
  }
  const auto pool = session.load_unit();
  const auto partition =
      evaluation::boundary_partition(pool.rows(), config.knn_k, config.fraction, direction);
  session.warn(partition.warnings);
  session.counters["distance_evals"] = pool.size() * (pool.size() - 1);
  session.results["in_count"] = partition.in_version_space.size();
  session.results["out_count"] = partition.out_version_space.size();
  session.write("boundary_in.csv", io::index_csv(partition.in_version_space));
  session.write("boundary_out.csv", io::index_csv(partition.out_version_space));
  session.write("boundary_partition.json", io::to_json(partition).dump(2) + "\n");
}

void run_project(const RunConfig& config, Session& session) {
  const auto pool = session.load_unit();
  const Index kappa = config.kappa > 0 ? config.kappa : pool.dim();
  const auto proj = geometry::ProjectionMatrix::generate(kappa, pool.dim(), config.sigma,
                                                         derive_seed(config.seed, "cli.projection"));
  const auto projected = geometry::gaussian_project(pool.rows(), proj);
  const auto concentration = geometry::concentration_test(
      pool.rows(), config.epsilon, config.sigma, config.trials,
      derive_seed(config.seed, "cli.concentration"));
  session.warn(concentration.warnings);
  const auto order = geometry::order_preservation_check(
      pool.rows(), proj, geometry::OrderMetric::Geodesic, config.epsilon,
      geometry::kDefaultMaxTriples, derive_seed(config.seed, "cli.order"));
  session.counters["trials"] = concentration.trials;
  session.counters["triples"] = order.triples_considered;
  session.results["kappa"] = kappa;
  session.results["concentration"] = io::to_json(concentration);
  session.results["order_preservation"] = io::to_json(order);
  session.write("project_points.csv", io::matrix_csv(projected));
}

void run_prune(const RunConfig& config, Session& session) {
  const auto data = session.load();
  if (!data.has_labels()) {
    throw Error(ErrorCode::EmptyData, "prune needs labels; pass --label-last or a labelled format");
  }
  if (config.seeds < 1) usage("--seeds must be at least 1");
  const auto y = versionspace::binarize_labels(data.labels);
  // Hypotheses see the same sphere-normalized features as every other subcommand.
  auto normalized = geometry::normalize_to_sphere(data.points, normalize_mode(config.normalize));
  session.warn(normalized.warnings);
  versionspace::StudyConfig study;
  study.rounds = config.rounds;
  study.theta0_iwal = config.theta0_iwal;
  study.theta0_mheal = config.theta0_mheal;
  study.k = config.k;
  study.pool_size = config.pool;
  study.same_stream = config.same_stream;
  study.seeds.clear();
  for (Index i = 0; i < config.seeds; ++i) study.seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
  const auto result = versionspace::run_study(normalized.points.rows(), y, study);

  json per_seed = json::array();
  for (const auto& run : result.runs) {
    json entry = {{"seed", run.seed}, {"h_star", run.h_star}};
    if (!run.iwal.empty()) {
      entry["iwal_labels"] = run.iwal.back().cumulative_labels;
      entry["mheal_labels"] = run.mheal.back().cumulative_labels;
      entry["iwal_survivors"] = run.iwal.back().survivors;
      entry["mheal_survivors"] = run.mheal.back().survivors;
    }
    if (config.same_stream) entry["survivor_subset_every_round"] = run.survivor_subset_every_round;
    per_seed.push_back(entry);
  }
  session.counters["rounds"] = config.rounds;
  session.counters["hypotheses"] = config.pool;
  session.results["seeds"] = per_seed;
  session.write("prune_survivors.csv", curve_csv(result.survivors));
  session.write("prune_error.csv", curve_csv(result.error));
  session.write("prune_labels.csv", curve_csv(result.labels));
}

void run_check_bounds(const RunConfig& config, Session& session) {
  const auto pool = session.load_unit();
  if (config.init < 0 || config.init >= pool.size()) usage("--init is out of range");
  if (config.budget > pool.size()) {
    throw Error(ErrorCode::BudgetExceedsPool, "budget exceeds pool size");
  }
  const bool maxmin = config.sweep == "maxmin";
  if (!maxmin && config.sweep != "sequential") usage("check-bounds --method must be maxmin or sequential");

  auto state = selection::SelectionState::start(pool, config.init, config.budget);
  std::string csv =
      "n,candidate,candidate_min_distance,selected_min_distance,log_lower,log_middle,log_energy,"
      "log_middle_power,hypothesis_holds,chain_holds,power_chain_holds\n";
  Index hypothesis = 0, chain = 0, power_chain = 0, steps = 0;
  while (static_cast<Index>(state.selected().size()) < config.budget) {
    auto next = state;
    const auto step = maxmin ? selection::maxmin_step(pool, next) : selection::sequential_step(pool, next);
    const auto r = selection::prop1_bounds(pool, state, step.index);
    csv += std::to_string(r.n) + ',' + std::to_string(step.index) + ',' +
           io::format_double(r.candidate_min_distance) + ',' +
           io::format_double(r.selected_min_distance) + ',' + io::format_double(r.log_lower) + ',' +
           io::format_double(r.log_middle) + ',' + io::format_double(r.log_energy) + ',' +
           io::format_double(r.log_middle_power) + ',' + (r.hypothesis_holds ? "1" : "0") + ',' +
           (r.chain_holds ? "1" : "0") + ',' + (r.power_chain_holds ? "1" : "0") + '\n';
    ++steps;
    hypothesis += r.hypothesis_holds;
    chain += r.hypothesis_holds && r.chain_holds;
    power_chain += r.hypothesis_holds && r.power_chain_holds;
    state = std::move(next);
  }
  session.warn(state.warnings);
  session.counters["distance_evals"] = state.distance_evals;
  session.counters["steps"] = steps;
  session.results["hypothesis_holds"] = hypothesis;
  session.results["chain_holds"] = chain;
  session.results["power_chain_holds"] = power_chain;
  session.results["selected"] = state.selected();
  if (state.selected().size() >= 2) {
    session.results["envelope"] = io::to_json(selection::prop3_envelope(pool, state.selected()));
  }
  session.write("check_bounds.csv", csv);
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("-i,--input", c.input_path, "Input data file")->required();
  sub->add_option("--format", c.input_format, "csv | libsvm | idx")
      ->check(CLI::IsMember({"csv", "libsvm", "idx"}));
  sub->add_flag("--header", c.header, "CSV: skip the first line");
  sub->add_flag("--label-last", c.label_last, "CSV: last column is a label");
  sub->add_option("--normalize", c.normalize, "l2 | standardize")
      ->check(CLI::IsMember({"l2", "standardize"}));
  sub->add_option("-o,--output-dir", c.output_dir, "Output directory (default $MHEAL_OUTPUT_DIR or ./mheal_out)");
  sub->add_option("--seed", c.seed, "Top-level seed");
}

}  // namespace

std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  if (env != nullptr && *env != '\0') return env;
  return kFallbackOutputDir;
}

json to_json(const RunConfig& c) {
  return {{"subcommand", c.subcommand},
          {"input_path", c.input_path},
          {"input_format", c.input_format},
          {"header", c.header},
          {"label_last", c.label_last},
          {"normalize", c.normalize},
          {"output_dir", c.output_dir},
          {"seed", c.seed},
          {"method", c.method},
          {"sweep", c.sweep},
          {"budget", c.budget},
          {"init", c.init},
          {"s", c.s},
          {"k", c.k},
          {"tau", c.tau},
          {"m", c.m},
          {"max_iters", c.max_iters},
          {"budgets", c.budgets},
          {"match_method", c.match_method},
          {"beta", c.beta},
          {"bins", c.bins},
          {"knn_k", c.knn_k},
          {"fraction", c.fraction},
          {"direction", c.direction},
          {"epsilon", c.epsilon},
          {"sigma", c.sigma},
          {"trials", c.trials},
          {"kappa", c.kappa},
          {"theta0_iwal", c.theta0_iwal},
          {"theta0_mheal", c.theta0_mheal},
          {"pool", c.pool},
          {"rounds", c.rounds},
          {"seeds", c.seeds},
          {"same_stream", c.same_stream}};
}

namespace {

void build_app(CLI::App& app, RunConfig& c) {
  app.description("Hyperspherical-energy coreset selection");
  app.name("mheal");
  app.require_subcommand(1);

  auto* select = app.add_subcommand("select", "Greedy l0 or max-min selection");
  add_common(select, c);
  select->add_option("--method", c.method, "algorithm1 | maxmin")
      ->check(CLI::IsMember({"algorithm1", "maxmin"}));
  select->add_option("--budget", c.budget, "Points to select");
  select->add_option("--init", c.init, "Start index for maxmin");
  select->add_option("--s", c.s, "Energy exponent reported for the selection (0, 1, 2)")
      ->check(CLI::IsMember({0, 1, 2}));

  auto* cluster = app.add_subcommand("cluster", "Spherical k-means");
  add_common(cluster, c);
  cluster->add_option("--k", c.k, "Clusters");
  cluster->add_option("--max-iters", c.max_iters, "Iteration cap");

  auto* mheal = app.add_subcommand("mheal", "Per-cluster representative selection");
  add_common(mheal, c);
  mheal->add_option("--k", c.k, "Clusters");
  mheal->add_option("--tau", c.tau, "Representatives per cluster");
  mheal->add_option("--m", c.m, "Rotation candidates per cluster (0 = min(32, size))");
  mheal->add_option("--max-iters", c.max_iters, "k-means iteration cap");

  auto* match = app.add_subcommand("match", "Distribution-matching losses over a budget sweep");
  add_common(match, c);
  match->add_option("--budgets", c.budgets, "Comma-separated budgets")->delimiter(',');
  match->add_option("--method", c.match_method, "l0 | l1 | l2 | random")
      ->check(CLI::IsMember({"l0", "l1", "l2", "random"}));
  match->add_option("--beta", c.beta, "KL offset");
  match->add_option("--bins", c.bins, "Histogram bins per feature");

  auto* boundary = app.add_subcommand("boundary", "kNN-energy version-space partition");
  add_common(boundary, c);
  boundary->add_option("--knn-k", c.knn_k, "Neighbours per point");
  boundary->add_option("--fraction", c.fraction, "Fraction placed in the version space");
  boundary->add_option("--direction", c.direction, "high | low")
      ->check(CLI::IsMember({"high", "low"}));

  auto* project = app.add_subcommand("project", "Gaussian projection and concentration test");
  add_common(project, c);
  project->add_option("--epsilon", c.epsilon, "Band half-width");
  project->add_option("--sigma", c.sigma, "Entry standard deviation");
  project->add_option("--trials", c.trials, "Monte-Carlo trials");
  project->add_option("--kappa", c.kappa, "Target dimension (0 = input dimension)");

  auto* prune = app.add_subcommand("prune", "IWAL vs MHEAL hypothesis-pruning study");
  add_common(prune, c);
  prune->add_option("--theta0-iwal", c.theta0_iwal, "IWAL threshold constant");
  prune->add_option("--theta0-mheal", c.theta0_mheal, "MHEAL threshold constant");
  prune->add_option("--k", c.k, "Clusters for the MHEAL stream");
  prune->add_option("--pool", c.pool, "Hypothesis pool size");
  prune->add_option("--rounds", c.rounds, "Rounds per seed");
  prune->add_option("--seeds", c.seeds, "Number of seeds (seed, seed + 1, ...)");
  prune->add_flag("--same-stream", c.same_stream, "Feed both learners the same sample stream");

  auto* bounds = app.add_subcommand("check-bounds", "Lower-bound sandwich along a greedy sweep");
  add_common(bounds, c);
  bounds->add_option("--method", c.sweep, "maxmin | sequential")
      ->check(CLI::IsMember({"maxmin", "sequential"}));
  bounds->add_option("--budget", c.budget, "Points to select");
  bounds->add_option("--init", c.init, "Start index");

}

void finalize(const CLI::App& app, RunConfig& c) {
  c.subcommand = app.get_subcommands().front()->get_name();
  if (c.output_dir.empty()) c.output_dir = default_output_dir();
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app;
  build_app(app, c);
  app.parse(argc, argv);
  finalize(app, c);
  return c;
}

json dispatch(const RunConfig& config) {
  Session session(config);
  const auto& sub = config.subcommand;
  if (sub == "select") {
    run_select(config, session);
  } else if (sub == "cluster") {
    run_cluster(config, session);
  } else if (sub == "mheal") {
    run_mheal_cmd(config, session);
  } else if (sub == "match") {
    run_match(config, session);
  } else if (sub == "boundary") {
    run_boundary(config, session);
  } else if (sub == "project") {
    run_project(config, session);
  } else if (sub == "prune") {
    run_prune(config, session);
  } else if (sub == "check-bounds") {
    run_check_bounds(config, session);
  } else {
    usage("unknown subcommand '" + sub + "'");
  }
  return session.finish();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return kUsage;
    case ErrorCode::DuplicatePoints:
    case ErrorCode::PoolExhausted:
    case ErrorCode::NoSurvivors:
      return kNumeric;
    default:
      return kData;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app;
  build_app(app, config);
  try {
    app.parse(argc, argv);
    finalize(app, config);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << json{{"error", "UsageError"}, {"message", e.what()}, {"exit_code", kUsage}}.dump() << "\n";
    return kUsage;
  }
  try {
    const auto start = std::chrono::steady_clock::now();
    auto report = dispatch(config);
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << report.dump(2) << "\n";
    return kOk;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << json{{"error", to_string(e.code())}, {"message", e.what()}, {"exit_code", code}}.dump() << "\n";
    return code;
  } catch (const std::exception& e) {
    err << json{{"error", "InternalError"}, {"message", e.what()}, {"exit_code", kNumeric}}.dump() << "\n";
    return kNumeric;
  }
}

}  // namespace mheal::cli
