#include "mheal/versionspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mheal/clustering.hpp"
#include "mheal/geometry.hpp"
#include "mheal/random.hpp"

namespace mheal::versionspace {

double logistic_loss(double margin) {
  return std::max(-margin, 0.0) + std::log1p(std::exp(-std::abs(margin)));
}

Index HypothesisPool::survivors() const {
  return static_cast<Index>(std::count(alive.begin(), alive.end(), char{1}));
}

double HypothesisPool::loss(Index h, const Vector& x, int y) const {
  return logistic_loss(static_cast<double>(y) * (weights.row(h).dot(x) + biases(h)));
}

HypothesisPool generate_pool(Index dim, Index count, const PointSet& x, std::span<const int> y,
                             std::uint64_t seed) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyData, "no training data for the pool");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "pool needs at least one hypothesis");
  if (x.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "data dimension differs from d");
  if (static_cast<Index>(y.size()) != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
  }
  for (int label : y) {
    if (label != 1 && label != -1) throw Error(ErrorCode::InvalidArgument, "labels must be +1 or -1");
  }

  HypothesisPool pool;
  pool.seed = seed;
  pool.weights.resize(count, dim);
  pool.biases.resize(count);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index h = 0; h < count; ++h) {
    for (Index c = 0; c < dim; ++c) pool.weights(h, c) = normal(rng);
    pool.biases(h) = normal(rng);
  }
  pool.alive.assign(static_cast<std::size_t>(count), 1);

  const Matrix margins = (x * pool.weights.transpose()).rowwise() + pool.biases.transpose();
  pool.h_star_loss = std::numeric_limits<double>::infinity();
  for (Index h = 0; h < count; ++h) {
    double total = 0.0;
    for (Index r = 0; r < x.rows(); ++r) total += logistic_loss(y[r] * margins(r, h));
    const double mean = total / static_cast<double>(x.rows());
    if (mean < pool.h_star_loss) {
      pool.h_star_loss = mean;
      pool.h_star = h;
    }
  }
  return pool;
}

ThetaSpec theta_from_params(double xi, double r, Index k) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  return {xi, r, k, (xi / static_cast<double>(k)) / r};
}

TraceRow prune_round(HypothesisPool& pool, const Vector& x, int y, Index t, double theta0,
                     Index cumulative_labels) {
  if (t < 1) throw Error(ErrorCode::InvalidArgument, "rounds are numbered from 1");
  TraceRow row;
  row.t = t;
  row.threshold = std::sqrt(theta0 / static_cast<double>(t));

  std::vector<double> losses(static_cast<std::size_t>(pool.size()), 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Index h = 0; h < pool.size(); ++h) {
    if (!pool.alive[h]) continue;
    losses[h] = pool.loss(h, x, y);
    lo = std::min(lo, losses[h]);
    hi = std::max(hi, losses[h]);
  }
  if (!(hi >= lo)) throw Error(ErrorCode::NoSurvivors, "pool has no surviving hypothesis");

  row.queried = hi - lo > row.threshold;
  row.cumulative_labels = cumulative_labels + (row.queried ? 1 : 0);

  row.best_surviving_loss = std::numeric_limits<double>::infinity();
  for (Index h = 0; h < pool.size(); ++h) {
    if (!pool.alive[h]) continue;
    if (h != pool.h_star && losses[h] > row.threshold) {
      pool.alive[h] = 0;
      ++row.eliminated;
      continue;
    }
    row.best_surviving_loss = std::min(row.best_surviving_loss, losses[h]);
  }
  row.survivors = pool.survivors();
  if (row.survivors == 0 || !pool.alive[pool.h_star]) {
    throw Error(ErrorCode::NoSurvivors, "h_star was eliminated");
  }
  return row;
}

PruningRun::PruningRun(HypothesisPool pool, double theta0)
    : pool_(std::move(pool)),
      theta0_(theta0),
      queried_loss_(static_cast<std::size_t>(pool_.size()), 0.0) {}

const TraceRow& PruningRun::step(const Vector& x, int y) {
  const Index labels = trace_.empty() ? 0 : trace_.back().cumulative_labels;
  const auto t = static_cast<Index>(trace_.size()) + 1;
  trace_.push_back(prune_round(pool_, x, y, t, theta0_, labels));
  if (trace_.back().queried) {
    for (Index h = 0; h < pool_.size(); ++h) {
      if (pool_.alive[h]) queried_loss_[h] += pool_.loss(h, x, y);
    }
  }
  return trace_.back();
}

Index PruningRun::current_hypothesis() const {
  Index best = -1;
  for (Index h = 0; h < pool_.size(); ++h) {
    if (!pool_.alive[h]) continue;
    if (best < 0 || queried_loss_[h] < queried_loss_[best]) best = h;
  }
  return best;
}

std::vector<int> binarize_labels(std::span<const double> labels) {
  std::set<double> values(labels.begin(), labels.end());
  if (values.size() != 2) {
    throw Error(ErrorCode::InvalidArgument,
                "pruning needs exactly two label values, found " + std::to_string(values.size()));
  }
  const double low = *values.begin();
  std::vector<int> out;
  out.reserve(labels.size());
  for (double v : labels) out.push_back(v == low ? -1 : 1);
  return out;
}

namespace {

double held_out_loss(const HypothesisPool& pool, Index h, const PointSet& x,
                     std::span<const int> y) {
  if (x.rows() == 0) return 0.0;
  double total = 0.0;
  for (Index r = 0; r < x.rows(); ++r) total += pool.loss(h, x.row(r).transpose(), y[r]);
  return total / static_cast<double>(x.rows());
}

void summarize(const std::vector<std::vector<double>>& iwal,
               const std::vector<std::vector<double>>& mheal, Index rounds, Curve& out) {
  auto stats = [rounds](const std::vector<std::vector<double>>& series, std::vector<double>& mean,
                        std::vector<double>& sd) {
    mean.assign(static_cast<std::size_t>(rounds), 0.0);
    sd.assign(static_cast<std::size_t>(rounds), 0.0);
    const double n = static_cast<double>(series.size());
    for (Index t = 0; t < rounds; ++t) {
      double sum = 0.0;
      for (const auto& s : series) sum += s[t];
      mean[t] = sum / n;
      if (series.size() > 1) {
        double ss = 0.0;
        for (const auto& s : series) ss += (s[t] - mean[t]) * (s[t] - mean[t]);
        sd[t] = std::sqrt(ss / (n - 1.0));
      }
    }
  };
  stats(iwal, out.iwal_mean, out.iwal_std);
  stats(mheal, out.mheal_mean, out.mheal_std);
}

}  // namespace

StudyResult run_study(const PointSet& x, std::span<const int> y, const StudyConfig& config) {
  if (x.rows() < 2) throw Error(ErrorCode::EmptyData, "study needs at least two rows");
  if (static_cast<Index>(y.size()) != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
  }
  if (config.rounds < 0) throw Error(ErrorCode::InvalidArgument, "rounds must be non-negative");
  if (config.seeds.empty()) throw Error(ErrorCode::InvalidArgument, "study needs at least one seed");

  StudyResult result;
  std::vector<std::vector<double>> surv_i, surv_m, err_i, err_m, lab_i, lab_m;
  for (std::uint64_t seed : config.seeds) {
    SeedRun run;
    run.seed = seed;

    Rng split_rng(derive_seed(seed, "versionspace.split"));
    const auto order = permutation(x.rows(), split_rng);
    const auto n_train = std::clamp<Index>(
        static_cast<Index>(std::lround((1.0 - config.holdout_fraction) * static_cast<double>(x.rows()))),
        1, x.rows());
    PointSet train(n_train, x.cols());
    PointSet test(x.rows() - n_train, x.cols());
    std::vector<int> y_train, y_test;
    for (Index r = 0; r < x.rows(); ++r) {
      if (r < n_train) {
        train.row(r) = x.row(order[r]);
        y_train.push_back(y[order[r]]);
      } else {
        test.row(r - n_train) = x.row(order[r]);
        y_test.push_back(y[order[r]]);
      }
    }

    auto pool = generate_pool(x.cols(), config.pool_size, train, y_train,
                              derive_seed(seed, "versionspace.pool"));
    run.h_star = pool.h_star;

    Rng stream_rng(derive_seed(seed, "versionspace.stream"));
    const auto iwal_order = permutation(n_train, stream_rng);
    std::vector<Index> iwal_stream, mheal_stream;
    for (Index t = 0; t < config.rounds; ++t) iwal_stream.push_back(iwal_order[t % n_train]);

    if (config.same_stream) {
      mheal_stream = iwal_stream;
    } else if (config.rounds > 0) {
      const auto unit = geometry::normalize_to_sphere(train, geometry::NormalizeMode::StandardizeThenL2);
      const auto model = clustering::spherical_kmeans(unit.points, config.k,
                                                      clustering::kDefaultMaxIters,
                                                      derive_seed(seed, "versionspace.clusters"));
      std::vector<std::vector<Index>> cluster_orders;
      for (Index c = 0; c < config.k; ++c) {
        auto members = model.members(c);
        Rng crng(derive_seed(seed, "versionspace.cluster_stream", static_cast<std::uint64_t>(c)));
        const auto perm = permutation(static_cast<Index>(members.size()), crng);
        std::vector<Index> shuffled;
        for (Index p : perm) shuffled.push_back(members[p]);
        cluster_orders.push_back(std::move(shuffled));
      }
      for (Index t = 0; t < config.rounds; ++t) {
        const auto& members = cluster_orders[t % config.k];
        const Index pos = (t / config.k) % static_cast<Index>(members.size());
        mheal_stream.push_back(members[pos]);
      }
    }

    PruningRun iwal(pool, config.theta0_iwal);
    PruningRun mheal(std::move(pool), config.theta0_mheal);
    for (Index t = 0; t < config.rounds; ++t) {
      const Index a = iwal_stream[t];
      const Index b = mheal_stream[t];
      iwal.step(train.row(a).transpose(), y_train[a]);
      mheal.step(train.row(b).transpose(), y_train[b]);
      run.iwal_error.push_back(held_out_loss(iwal.pool(), iwal.current_hypothesis(), test, y_test));
      run.mheal_error.push_back(
          held_out_loss(mheal.pool(), mheal.current_hypothesis(), test, y_test));
      if (config.same_stream) {
        for (Index h = 0; h < mheal.pool().size(); ++h) {
          if (mheal.pool().alive[h] && !iwal.pool().alive[h]) run.survivor_subset_every_round = false;
        }
      }
    }
    run.iwal = iwal.trace();
    run.mheal = mheal.trace();

    auto column = [](const PruningTrace& trace, auto field) {
      std::vector<double> out;
      for (const auto& row : trace) out.push_back(static_cast<double>(field(row)));
      return out;
    };
    auto survivors = [](const TraceRow& r) { return r.survivors; };
    auto labels = [](const TraceRow& r) { return r.cumulative_labels; };
    surv_i.push_back(column(run.iwal, survivors));
    surv_m.push_back(column(run.mheal, survivors));
    lab_i.push_back(column(run.iwal, labels));
    lab_m.push_back(column(run.mheal, labels));
    err_i.push_back(run.iwal_error);
    err_m.push_back(run.mheal_error);
    result.runs.push_back(std::move(run));
  }
  summarize(surv_i, surv_m, config.rounds, result.survivors);
  summarize(err_i, err_m, config.rounds, result.error);
  summarize(lab_i, lab_m, config.rounds, result.labels);
  return result;
}

}  // namespace mheal::versionspace
