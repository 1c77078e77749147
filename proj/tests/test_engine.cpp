#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "beliefsim/engine.hpp"
#include "beliefsim/runner.hpp"

using namespace beliefsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.k = 16;
  cfg.horizon_T = 300;
  cfg.gamma = 0.99;
  cfg.strategy = Strategy::uncertainty();
  cfg.access = AccessDistribution::uniform(16);
  cfg.schedule = GroundTruthSchedule({{1, 0.8}, {151, 0.2}});
  cfg.batch_m = 4;
  cfg.n_min = 0.5;
  cfg.seeds = {1, 2, 3, 4};
  return cfg;
}

std::string mean_csv(const MetricsSeries& s) {
  std::ostringstream os;
  write_metrics_csv(os, s.mean);
  return os.str();
}

std::string seed_csv(const MetricsSeries& s, std::size_t i) {
  std::ostringstream os;
  write_metrics_csv(os, s.per_seed[i].records);
  return os.str();
}

}  // namespace

TEST_CASE("identical configs give bit-identical output") {
  auto cfg = small_config();
  auto a = run(cfg);
  auto b = run(cfg);
  CHECK(mean_csv(a) == mean_csv(b));
  for (std::size_t i = 0; i < a.per_seed.size(); ++i) CHECK(seed_csv(a, i) == seed_csv(b, i));
}

TEST_CASE("parallel replication matches serial") {
  auto cfg = small_config();
  auto serial = run(cfg, RunOptions{1});
  auto parallel = run(cfg, RunOptions{4});
  CHECK(mean_csv(serial) == mean_csv(parallel));
  for (std::size_t i = 0; i < serial.per_seed.size(); ++i)
    CHECK(seed_csv(serial, i) == seed_csv(parallel, i));
}

TEST_CASE("permuting seeds permutes per-seed series and keeps the mean") {
  auto cfg = small_config();
  auto a = run(cfg);
  auto cfg2 = cfg;
  cfg2.seeds = {3, 1, 4, 2};
  auto b = run(cfg2);
  CHECK(mean_csv(a) == mean_csv(b));
  for (const auto& sa : a.per_seed) {
    bool found = false;
    for (std::size_t i = 0; i < b.per_seed.size(); ++i) {
      if (b.per_seed[i].seed != sa.seed) continue;
      std::ostringstream os;
      write_metrics_csv(os, b.per_seed[i].records);
      std::ostringstream osa;
      write_metrics_csv(osa, sa.records);
      CHECK(os.str() == osa.str());
      found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("metrics: untouched store scores the prior against the truth") {
  auto cfg = small_config();
  cfg.schedule = GroundTruthSchedule::constant(0.8);
  EpistemicStore store(cfg.k, cfg.store_config());
  auto rec = compute_metrics(store, cfg, 1, 0);
  CHECK_THAT(rec.mse_unweighted, WithinAbs(0.09, 1e-12));  // (0.5 - 0.8)^2
  CHECK_THAT(rec.mse_weighted, WithinAbs(0.09, 1e-12));
  CHECK(rec.active_count == 0);
  CHECK_THAT(rec.mean_variance, WithinAbs(1.0 / 12.0, 1e-12));
}

TEST_CASE("metrics: perfect beliefs score zero") {
  auto cfg = small_config();
  cfg.gamma = 1.0;
  cfg.schedule = GroundTruthSchedule::constant(0.8);
  EpistemicStore store(cfg.k, cfg.store_config());
  for (PropositionId id = 0; id < cfg.k; ++id)
    store.replace(id, BetaBelief::from_counts(8.0, 2.0, 1.0), 1);
  auto rec = compute_metrics(store, cfg, 1, 0);
  CHECK(rec.mse_unweighted == 0.0);
  CHECK(rec.mse_weighted == 0.0);
  CHECK(rec.active_count == cfg.k);
}

TEST_CASE("metrics: weighted and unweighted two-proposition example") {
  ExperimentConfig cfg;
  cfg.k = 2;
  cfg.gamma = 1.0;
  cfg.access = AccessDistribution::zipf(2, 1.0);  // weights 2/3, 1/3
  cfg.schedule = GroundTruthSchedule::constant(0.8);
  cfg.seeds = {1};
  EpistemicStore store(cfg.k, cfg.store_config());
  store.replace(0, BetaBelief::from_counts(8.0, 2.0, 1.0), 1);  // mean 0.8, active
  auto rec = compute_metrics(store, cfg, 1, 0);                 // id 1 falls back to 0.5
  CHECK_THAT(rec.mse_unweighted, WithinAbs(0.045, 1e-12));
  CHECK_THAT(rec.mse_weighted, WithinAbs(0.03, 1e-12));
}

TEST_CASE("noiseless supporting evidence only raises means") {
  ExperimentConfig cfg;
  cfg.k = 8;
  cfg.horizon_T = 150;
  cfg.gamma = 0.999;
  cfg.strategy = Strategy::uncertainty();
  cfg.access = AccessDistribution::uniform(8);
  cfg.schedule = GroundTruthSchedule::constant(1.0);
  cfg.batch_m = 3;
  cfg.seeds = {1, 2, 3};
  auto series = run(cfg);
  CHECK(series.mean.back().mse_unweighted < series.mean.front().mse_unweighted);

  auto rr = run_replication(cfg, 1);
  for (const auto& [id, b] : rr.store.active_set(cfg.horizon_T)) CHECK(b.mean() >= 0.5);
}

TEST_CASE("k=1 every-tick simulation converges to n_eq") {
  ExperimentConfig cfg;
  cfg.k = 1;
  cfg.horizon_T = 400;
  cfg.gamma = 0.95;
  cfg.strategy = Strategy::random();
  cfg.access = AccessDistribution::uniform(1);
  cfg.schedule = GroundTruthSchedule::constant(0.8);
  cfg.batch_m = 1;
  cfg.n_min = 0.5;
  cfg.seeds = {1};

  // Recurrence oracle: the engine touches the entry (decay) then records,
  // so n_1 = prior + 1 = 3 and n_t = gamma * n_{t-1} + 1 afterwards.
  double oracle = 3.0;
  for (Tick t = 2; t <= 200; ++t) oracle = 0.95 * oracle + 1.0;

  auto at200 = cfg;
  at200.horizon_T = 200;
  auto rr200 = run_replication(at200, 1);
  auto b200 = rr200.store.peek(0, 200);
  REQUIRE(b200.has_value());
  CHECK_THAT(b200->n_eff(), WithinRel(oracle, 1e-9));
  CHECK_THAT(b200->n_eff(), WithinAbs(20.0, 1e-3));  // 17 * 0.95^199 ~ 6e-4 remains

  auto rr400 = run_replication(cfg, 1);
  auto b400 = rr400.store.peek(0, 400);
  REQUIRE(b400.has_value());
  CHECK_THAT(b400->n_eff(), WithinAbs(20.0, 1e-6));
}

TEST_CASE("static agent error is eventually monotone nonincreasing") {
  ExperimentConfig cfg;
  cfg.k = 16;
  cfg.horizon_T = 800;
  cfg.gamma = 1.0;
  cfg.strategy = Strategy::random();
  cfg.access = AccessDistribution::uniform(16);
  cfg.schedule = GroundTruthSchedule::constant(0.7);
  cfg.batch_m = 4;
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  auto series = run(cfg);
  // 50-tick window means after burn-in, 1e-3 noise band.
  std::vector<double> windows;
  for (Tick start = 100; start + 50 <= cfg.horizon_T; start += 50) {
    double sum = 0.0;
    for (Tick t = start; t < start + 50; ++t) sum += series.mean[t].mse_unweighted;
    windows.push_back(sum / 50.0);
  }
  for (std::size_t i = 1; i < windows.size(); ++i) CHECK(windows[i] <= windows[i - 1] + 1e-3);
}

TEST_CASE("decay keeps the mean belief variance strictly positive") {
  ExperimentConfig cfg;
  cfg.k = 16;
  cfg.horizon_T = 1200;
  cfg.gamma = 0.95;
  cfg.strategy = Strategy::random();
  cfg.access = AccessDistribution::uniform(16);
  cfg.schedule = GroundTruthSchedule({{1, 0.8}, {601, 0.2}});
  cfg.batch_m = 4;
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  auto series = run(cfg);
  double lo = 1.0;
  for (const auto& r : series.mean)
    if (r.t > 200) lo = std::min(lo, r.mean_variance);
  CHECK(lo > 0.04);  // regression bound; measured floor 0.0551
}

TEST_CASE("insertions balance evictions plus live entries") {
  auto cfg = small_config();
  cfg.gamma = 0.9;
  cfg.n_min = 1.0;
  auto rr = run_replication(cfg, 7);
  const auto& store = rr.store;
  CHECK(store.insertions() == store.evictions() + store.size());
  CHECK(rr.series.records.back().active_count <= cfg.k);
  CHECK(rr.series.records.back().active_count == store.size());
  CHECK(rr.series.records.back().evictions_cum == store.evictions());
  for (std::size_t i = 1; i < rr.series.records.size(); ++i) {
    CHECK(rr.series.records[i].evictions_cum >= rr.series.records[i - 1].evictions_cum);
    CHECK(rr.series.records[i].resets_cum >= rr.series.records[i - 1].resets_cum);
  }
}

TEST_CASE("the reset wrapper fires through the engine after the shift") {
  auto cfg = small_config();
  cfg.gamma = 0.999;
  cfg.horizon_T = 400;
  cfg.schedule = GroundTruthSchedule({{1, 0.95}, {201, 0.05}});
  cfg.strategy = Strategy::with_surprisal_reset(Strategy::uncertainty(), 2.0, 2.0);
  auto series = run(cfg);
  CHECK(series.mean.back().resets_cum > 0.0);
  auto pre_shift = series.mean[199].resets_cum;
  CHECK(series.mean.back().resets_cum > pre_shift);  // resets concentrate post-shift
}

TEST_CASE("recovery_time scans the mean series") {
  std::vector<MeanRecord> flat(100);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i].t = i + 1;
  CHECK(recovery_time(flat, 50, 0.05) == Tick{0});  // constant zero error

  auto high = flat;
  for (auto& r : high) r.mse_unweighted = 1.0;
  CHECK_FALSE(recovery_time(high, 50, 0.05).has_value());

  auto dip = flat;
  for (auto& r : dip) r.mse_unweighted = r.t < 70 ? 1.0 : 0.01;
  CHECK(recovery_time(dip, 50, 0.05) == Tick{20});

  auto flicker = flat;  // a 10-tick dip does not count as recovered
  for (auto& r : flicker) r.mse_unweighted = (r.t >= 55 && r.t < 65) ? 0.01 : 1.0;
  CHECK_FALSE(recovery_time(flicker, 50, 0.05).has_value());
}

TEST_CASE("config validation rejects bad setups") {
  auto cfg = small_config();
  cfg.seeds = {1, 1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.batch_m = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.access = AccessDistribution::uniform(8);  // mismatched universe
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.gamma = 0.95;
  cfg.n_min = 30.0;  // >= n_eq
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("make_series rejects ragged inputs") {
  SeedSeries a{1, {MetricsRecord{1}, MetricsRecord{2}}};
  SeedSeries b{2, {MetricsRecord{1}}};
  CHECK_THROWS_AS(make_series({a, b}), std::invalid_argument);
  CHECK_THROWS_AS(make_series({}), std::invalid_argument);
}
