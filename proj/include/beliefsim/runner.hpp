#pragma once
// CSV emission for metrics series and the top-level run-and-emit entry the
// CLI drives. One row per tick; the header is mandatory and shared by the
// cross-seed mean file and the per-seed files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "beliefsim/csv.hpp"
#include "beliefsim/engine.hpp"
#include "beliefsim/metrics.hpp"

namespace beliefsim {

inline constexpr const char* kMetricsHeader =
    "t,mse_unweighted,mse_weighted,mean_variance,active_count,evictions_cum,resets_cum";

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << kMetricsHeader << '\n';
  for (const auto& r : records) {
    os << r.t << ',' << format_double(r.mse_unweighted) << ',' << format_double(r.mse_weighted)
       << ',' << format_double(r.mean_variance) << ',' << r.active_count << ','
       << r.evictions_cum << ',' << r.resets_cum << '\n';
  }
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MeanRecord>& records) {
  os << kMetricsHeader << '\n';
  for (const auto& r : records) {
    os << r.t << ',' << format_double(r.mse_unweighted) << ',' << format_double(r.mse_weighted)
       << ',' << format_double(r.mean_variance) << ',' << format_double(r.active_count) << ','
       << format_double(r.evictions_cum) << ',' << format_double(r.resets_cum) << '\n';
  }
}

/// Parse an emitted metrics file back into records (counters as doubles, the
/// schema both file kinds share). Values round-trip exactly.
inline std::vector<MeanRecord> read_metrics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line) != split_csv_line(kMetricsHeader))
    throw std::runtime_error("metrics csv: missing or malformed header");
  std::vector<MeanRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 7)
      throw std::runtime_error("metrics csv: expected 7 fields, got line '" + line + "'");
    MeanRecord r;
    r.t = parse_u64_field(fields[0], "t");
    r.mse_unweighted = parse_double_field(fields[1], "mse_unweighted");
    r.mse_weighted = parse_double_field(fields[2], "mse_weighted");
    r.mean_variance = parse_double_field(fields[3], "mean_variance");
    r.active_count = parse_double_field(fields[4], "active_count");
    r.evictions_cum = parse_double_field(fields[5], "evictions_cum");
    r.resets_cum = parse_double_field(fields[6], "resets_cum");
    records.push_back(r);
  }
  return records;
}

struct RunManifest {
  ExperimentConfig config;
  std::filesystem::path output_path;
  bool emit_per_seed = false;
};

/// Execute the configured run and write <out>/mean.csv (plus seed_<n>.csv
/// when requested). Returns 0 on success, 2 on I/O failure. Configuration
/// problems throw before any I/O happens.
inline int run_and_emit(const RunManifest& manifest, std::ostream& diag = std::cerr) {
  manifest.config.validate();
  MetricsSeries series = run(manifest.config);
  std::error_code ec;
  std::filesystem::create_directories(manifest.output_path, ec);
  if (ec) {
    diag << "error: cannot create output directory '" << manifest.output_path.string()
         << "': " << ec.message() << '\n';
    return 2;
  }
  auto write_file = [&](const std::filesystem::path& p, const auto& records) {
    std::ofstream out(p, std::ios::binary);  // LF line endings everywhere
    if (out) {
      write_metrics_csv(out, records);
      out.flush();
    }
    if (!out) {
      diag << "error: cannot write '" << p.string() << "'\n";
      return false;
    }
    return true;
  };
  if (!write_file(manifest.output_path / "mean.csv", series.mean)) return 2;
  if (manifest.emit_per_seed) {
    for (const auto& s : series.per_seed) {
      if (!write_file(manifest.output_path / ("seed_" + std::to_string(s.seed) + ".csv"),
                      s.records))
        return 2;
    }
  }
  return 0;
}

}  // namespace beliefsim
