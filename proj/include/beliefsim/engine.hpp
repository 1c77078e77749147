#pragma once
// Deterministic tick loop: each tick the environment surfaces a batch of
// candidate propositions drawn from the access distribution, the strategy
// engages exactly one of them, the environment answers with one Bernoulli
// observation, the store records it, and the eviction sweep runs. Metrics
// are appended per tick. Replications (seeds) are independent and may run
// in parallel; results are identical either way.
//
// Rng consumption order within a tick: batch_m access draws, one strategy
// draw (random always; uncertainty only to break a variance tie), one
// feedback draw.

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "beliefsim/belief.hpp"
#include "beliefsim/environment.hpp"
#include "beliefsim/metrics.hpp"
#include "beliefsim/rng.hpp"
#include "beliefsim/store.hpp"
#include "beliefsim/strategy.hpp"
#include "beliefsim/types.hpp"

namespace beliefsim {

struct ExperimentConfig {
  std::uint32_t k = 100;
  Tick horizon_T = 2000;
  double gamma = 0.999;
  Strategy strategy = Strategy::random();
  AccessDistribution access = AccessDistribution::uniform(100);
  GroundTruthSchedule schedule = GroundTruthSchedule({{1, 0.8}, {501, 0.2}});
  std::size_t batch_m = 10;
  double n_min = 0.5;
  std::optional<std::size_t> capacity;  // nullopt = unbounded
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  std::vector<std::uint64_t> seeds = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10,
                                      11, 12, 13, 14, 15, 16, 17, 18, 19, 20};

  StoreConfig store_config() const {
    return StoreConfig{gamma, n_min, capacity, prior_alpha, prior_beta};
  }

  void validate() const {
    if (k == 0) throw std::invalid_argument("config: k must be > 0");
    if (horizon_T == 0) throw std::invalid_argument("config: horizon_T must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("config: gamma must lie in (0, 1]");
    if (batch_m == 0) throw std::invalid_argument("config: batch_m must be >= 1");
    if (access.universe_size() != k)
      throw std::invalid_argument("config: access distribution universe differs from k");
    if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    std::unordered_set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size()) throw std::invalid_argument("config: seeds must be distinct");
    (void)EpistemicStore(k, store_config());  // store-level range checks
    (void)schedule.theta_star(0, 1);
  }
};

/// Squared-error metrics at tick t. Inactive propositions fall back to the
/// prior — neglect and eviction cost accuracy, which is exactly the effect
/// the experiments measure.
inline MetricsRecord compute_metrics(const EpistemicStore& store, const ExperimentConfig& cfg,
                                     Tick t, std::uint64_t resets_cum) {
  const BetaBelief prior = store.prior_belief();
  const double prior_mean = prior.mean();
  const double prior_var = prior.variance();
  const std::vector<double>& pmf = cfg.access.pmf();
  MetricsRecord rec;
  rec.t = t;
  for (PropositionId id = 0; id < cfg.k; ++id) {
    double est = prior_mean;
    double var = prior_var;
    if (auto b = store.peek(id, t); b && b->n_eff() >= cfg.n_min) {
      est = b->mean();
      var = b->variance();
      ++rec.active_count;
    }
    const double err = est - cfg.schedule.theta_star(id, t);
    rec.mse_unweighted += err * err;
    rec.mse_weighted += pmf[id] * err * err;
    rec.mean_variance += var;
  }
  rec.mse_unweighted /= static_cast<double>(cfg.k);
  rec.mean_variance /= static_cast<double>(cfg.k);
  rec.evictions_cum = store.evictions();
  rec.resets_cum = resets_cum;
  return rec;
}

struct ReplicationResult {
  SeedSeries series;
  EpistemicStore store;  // final state, for inspection
};

inline ReplicationResult run_replication(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  EpistemicStore store(cfg.k, cfg.store_config());
  Rng rng(seed);
  SeedSeries series{seed, {}};
  series.records.reserve(cfg.horizon_T);
  std::uint64_t resets = 0;
  for (Tick t = 1; t <= cfg.horizon_T; ++t) {
    const std::vector<PropositionId> batch = cfg.access.draw_batch(cfg.batch_m, rng);
    const PropositionId id = cfg.strategy.select(batch, store, t, rng);
    const BetaBelief pre = store.get_or_init(id, t);
    const Evidence ev = observe(cfg.schedule, id, t, rng);
    store.record(id, ev, t);
    if (cfg.strategy.after_observe(id, ev, pre, store, t)) ++resets;
    store.sweep_evict(t);
    series.records.push_back(compute_metrics(store, cfg, t, resets));
  }
  return ReplicationResult{std::move(series), std::move(store)};
}

struct RunOptions {
  int threads = 0;  // 0 = one thread per seed up to hardware concurrency
};

inline MetricsSeries run(const ExperimentConfig& cfg, RunOptions opts = {}) {
  cfg.validate();
  const std::size_t n = cfg.seeds.size();
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t threads = opts.threads > 0 ? static_cast<std::size_t>(opts.threads)
                                         : (hw ? static_cast<std::size_t>(hw) : 1);
  std::vector<SeedSeries> per_seed(n);
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i)
      per_seed[i] = run_replication(cfg, cfg.seeds[i]).series;
  } else {
    // Each replication owns its store and rng; the merge below is a pure
    // reduction in seed-list order, so scheduling cannot affect the output.
    for (std::size_t wave = 0; wave < n; wave += threads) {
      const std::size_t end = std::min(n, wave + threads);
      std::vector<std::future<SeedSeries>> futures;
      futures.reserve(end - wave);
      for (std::size_t i = wave; i < end; ++i)
        futures.push_back(std::async(std::launch::async, [&cfg, seed = cfg.seeds[i]] {
          return run_replication(cfg, seed).series;
        }));
      for (std::size_t i = wave; i < end; ++i) per_seed[i] = futures[i - wave].get();
    }
  }
  return make_series(std::move(per_seed));
}

}  // namespace beliefsim
