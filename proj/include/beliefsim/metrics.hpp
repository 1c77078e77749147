#pragma once
// Per-tick metrics records, per-seed series, the cross-seed mean series, and
// the recovery-time measurement used to compare adaptation speed after a
// consensus shift.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "beliefsim/types.hpp"

namespace beliefsim {

struct MetricsRecord {
  Tick t = 0;
  double mse_unweighted = 0.0;
  double mse_weighted = 0.0;
  double mean_variance = 0.0;
  std::uint64_t active_count = 0;
  std::uint64_t evictions_cum = 0;
  std::uint64_t resets_cum = 0;
};

struct SeedSeries {
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> records;
};

/// Same schema as MetricsRecord with the counters averaged across seeds.
struct MeanRecord {
  Tick t = 0;
  double mse_unweighted = 0.0;
  double mse_weighted = 0.0;
  double mean_variance = 0.0;
  double active_count = 0.0;
  double evictions_cum = 0.0;
  double resets_cum = 0.0;
};

struct MetricsSeries {
  std::vector<SeedSeries> per_seed;
  std::vector<MeanRecord> mean;
};

/// Assemble per-seed series into a MetricsSeries with the pointwise
/// cross-seed mean. All seeds must cover the identical tick range.
inline MetricsSeries make_series(std::vector<SeedSeries> per_seed) {
  if (per_seed.empty()) throw std::invalid_argument("make_series: no seed series");
  const std::size_t n = per_seed.front().records.size();
  for (const auto& s : per_seed) {
    if (s.records.size() != n)
      throw std::invalid_argument("make_series: seed series cover different tick ranges");
    for (std::size_t i = 0; i < n; ++i)
      if (s.records[i].t != per_seed.front().records[i].t)
        throw std::invalid_argument("make_series: seed series tick mismatch");
  }
  // Accumulate in seed-value order so the mean does not depend on how the
  // seed list happens to be permuted.
  std::vector<std::size_t> order(per_seed.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return per_seed[a].seed < per_seed[b].seed; });

  MetricsSeries out;
  out.mean.resize(n);
  const double inv = 1.0 / static_cast<double>(per_seed.size());
  for (std::size_t i = 0; i < n; ++i) {
    MeanRecord& m = out.mean[i];
    m.t = per_seed.front().records[i].t;
    for (std::size_t idx : order) {
      const MetricsRecord& r = per_seed[idx].records[i];
      m.mse_unweighted += r.mse_unweighted;
      m.mse_weighted += r.mse_weighted;
      m.mean_variance += r.mean_variance;
      m.active_count += static_cast<double>(r.active_count);
      m.evictions_cum += static_cast<double>(r.evictions_cum);
      m.resets_cum += static_cast<double>(r.resets_cum);
    }
    m.mse_unweighted *= inv;
    m.mse_weighted *= inv;
    m.mean_variance *= inv;
    m.active_count *= inv;
    m.evictions_cum *= inv;
    m.resets_cum *= inv;
  }
  out.per_seed = std::move(per_seed);
  return out;
}

/// Smallest d >= 0 such that the mean mse_unweighted stays below `threshold`
/// for 25 consecutive ticks starting at shift_tick + d; nullopt if that never
/// happens within the series.
inline std::optional<Tick> recovery_time(const std::vector<MeanRecord>& mean_series,
                                         Tick shift_tick, double threshold) {
  constexpr Tick kHold = 25;
  if (mean_series.empty()) return std::nullopt;
  const Tick first = mean_series.front().t;
  const Tick last = mean_series.back().t;
  if (shift_tick < first || shift_tick > last) return std::nullopt;
  Tick run = 0;  // consecutive below-threshold ticks ending at the cursor
  for (const auto& r : mean_series) {
    if (r.t < shift_tick) continue;
    run = r.mse_unweighted < threshold ? run + 1 : 0;
    if (run >= kHold) return r.t - (kHold - 1) - shift_tick;
  }
  return std::nullopt;
}

}  // namespace beliefsim
