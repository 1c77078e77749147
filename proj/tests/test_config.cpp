#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "beliefsim/config.hpp"
#include "beliefsim/runner.hpp"

using namespace beliefsim;
using Catch::Matchers::ContainsSubstring;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = (std::filesystem::temp_directory_path() /
            ("beliefsim_cfg_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
             ".json"))
               .string();
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

void check_common_core(const ExperimentConfig& cfg) {
  CHECK(cfg.k == 100);
  CHECK(cfg.horizon_T == 2000);
  CHECK(cfg.batch_m == 10);
  CHECK(cfg.n_min == 0.5);
  CHECK_FALSE(cfg.capacity.has_value());
  CHECK(cfg.prior_alpha == 1.0);
  CHECK(cfg.prior_beta == 1.0);
  REQUIRE(cfg.seeds.size() == 20);
  for (std::uint64_t s = 1; s <= 20; ++s) CHECK(cfg.seeds[s - 1] == s);
  REQUIRE(cfg.schedule.segments().size() == 2);
  CHECK(cfg.schedule.segments()[0] == ScheduleSegment{1, 0.8});
  CHECK(cfg.schedule.segments()[1] == ScheduleSegment{501, 0.2});
}

}  // namespace

TEST_CASE("presets are frozen") {
  for (const auto& name : preset_names()) check_common_core(load_preset(name));

  CHECK(load_preset("exp1-static").gamma == 1.0);
  CHECK(load_preset("exp1-high").gamma == 0.999);
  CHECK(load_preset("exp1-low").gamma == 0.95);
  CHECK(load_preset("exp2-random").gamma == 0.999);
  CHECK(load_preset("exp2-uncertainty").gamma == 0.999);
  CHECK(load_preset("exp3-random").gamma == 0.999);
  CHECK(load_preset("exp3-uncertainty").gamma == 0.999);

  for (const auto& name : {"exp1-static", "exp1-high", "exp1-low", "exp2-random", "exp3-random"})
    CHECK(load_preset(name).strategy == Strategy::random());
  for (const auto& name : {"exp2-uncertainty", "exp3-uncertainty"})
    CHECK(load_preset(name).strategy == Strategy::uncertainty());

  for (const auto& name : {"exp1-static", "exp1-high", "exp1-low", "exp2-random", "exp2-uncertainty"})
    CHECK(load_preset(name).access == AccessDistribution::uniform(100));
  for (const auto& name : {"exp3-random", "exp3-uncertainty"}) {
    auto access = load_preset(name).access;
    CHECK(access.kind() == AccessKind::kZipf);
    CHECK(access.zipf_s() == 1.1);
    CHECK(access.universe_size() == 100);
  }

  CHECK(load_preset("exp1-low").strategy == Strategy::random());
  CHECK_THROWS_AS(load_preset("exp9-nope"), ConfigError);
  CHECK(preset_names().size() == 7);
}

TEST_CASE("empty config resolves to the documented defaults") {
  auto cfg = config_from_json(nlohmann::json::object());
  check_common_core(cfg);
  CHECK(cfg.gamma == 0.999);
  CHECK(cfg.strategy == Strategy::random());
  CHECK(cfg.access == AccessDistribution::uniform(100));
}

TEST_CASE("single-key override keeps the other defaults") {
  auto cfg = config_from_json(nlohmann::json::parse(R"({"horizon_T": 100})"));
  CHECK(cfg.horizon_T == 100);
  CHECK(cfg.k == 100);
  CHECK(cfg.gamma == 0.999);
}

TEST_CASE("full config round-trips through json") {
  for (const auto& name : preset_names()) {
    auto cfg = load_preset(name);
    auto back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
  }

  auto wrapped = config_from_json(nlohmann::json::parse(R"({
    "k": 10,
    "strategy": {"kind": "uncertainty+reset", "tau": 1.5, "n_reset": 3.0},
    "access": {"kind": "zipf", "s": 0.9},
    "schedule": {"segments": [{"start_tick": 1, "theta_star": 0.6}],
                 "overrides": [{"id": 2, "segments": [{"start_tick": 1, "theta_star": 0.1}]}]},
    "capacity": 5,
    "seeds": [7, 8]
  })"));
  CHECK(wrapped.strategy.has_surprisal_reset());
  CHECK(wrapped.strategy.tau() == 1.5);
  CHECK(wrapped.strategy.n_reset() == 3.0);
  CHECK(wrapped.access.zipf_s() == 0.9);
  CHECK(wrapped.capacity == std::size_t{5});
  CHECK(wrapped.schedule.theta_star(2, 10) == 0.1);
  CHECK(wrapped.schedule.theta_star(1, 10) == 0.6);
  auto again = config_from_json(config_to_json(wrapped));
  CHECK(config_to_json(again) == config_to_json(wrapped));
}

TEST_CASE("strategy and access shorthand strings") {
  CHECK(config_from_json({{"strategy", "random"}}).strategy == Strategy::random());
  CHECK(config_from_json({{"strategy", "uncertainty"}}).strategy == Strategy::uncertainty());
  CHECK(config_from_json({{"strategy", "uncertainty+reset"}}).strategy ==
        Strategy::with_surprisal_reset(Strategy::uncertainty(), 2.5, 2.0));
  CHECK(config_from_json({{"access", "uniform"}}).access == AccessDistribution::uniform(100));
}

TEST_CASE("config rejections carry a reason") {
  CHECK_THROWS_MATCHES(config_from_json(nlohmann::json::parse(R"({"banana": 1})")), ConfigError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("banana")));
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"strategy": "greedy"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"access": {"kind": "zipf"}})")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"capacity": 0})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"seeds": [1, 1]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"seeds": []})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"gamma": 1.25})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse("[1,2]")), ConfigError);
}

TEST_CASE("file loading reports parse diagnostics") {
  TempFile good(R"({"horizon_T": 42})");
  CHECK(load_config_file(good.path).horizon_T == 42);

  TempFile bad("{\n  \"horizon_T\": 42,\n}");
  CHECK_THROWS_MATCHES(load_config_file(bad.path), ConfigError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("line")));

  CHECK_THROWS_AS(load_config_file("/nonexistent/x.json"), ConfigError);
}

TEST_CASE("metrics csv round-trips doubles exactly") {
  std::vector<MeanRecord> records;
  MeanRecord a{1, 1.0 / 3.0, 0.1, 0.09000000000000002, 2.5, 0.0, 0.0};
  MeanRecord b{2, 1e-300, 0.9999999999999999, 1.0, 99.0, 17.5, 3.0};
  records.push_back(a);
  records.push_back(b);
  std::ostringstream os;
  write_metrics_csv(os, records);
  std::istringstream is(os.str());
  auto parsed = read_metrics_csv(is);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].mse_unweighted == a.mse_unweighted);
  CHECK(parsed[0].mean_variance == a.mean_variance);
  CHECK(parsed[1].mse_unweighted == b.mse_unweighted);
  CHECK(parsed[1].mse_weighted == b.mse_weighted);
  CHECK(parsed[1].evictions_cum == 17.5);
}

TEST_CASE("metrics csv enforces the header and field count") {
  std::istringstream bad_header("t,mse\n1,2\n");
  CHECK_THROWS(read_metrics_csv(bad_header));
  std::istringstream bad_row(std::string(kMetricsHeader) + "\n1,2,3\n");
  CHECK_THROWS(read_metrics_csv(bad_row));
}

TEST_CASE("per-seed records serialize counters as integers") {
  std::vector<MetricsRecord> records{{5, 0.25, 0.125, 0.05, 3, 7, 1}};
  std::ostringstream os;
  write_metrics_csv(os, records);
  CHECK(os.str() == std::string(kMetricsHeader) + "\n5,0.25,0.125," + format_double(0.05) + ",3,7,1\n");
}
