#pragma once
// Experiment configuration: named presets for the three stock experiments,
// and JSON config files layered over the defaults. Config keys match the
// ExperimentConfig field names one to one; unknown keys are rejected.

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefsim/engine.hpp"

namespace beliefsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Strategy strategy_from_json(const nlohmann::json& j) {
  std::string kind;
  double tie_epsilon = 1e-12;
  double tau = 2.5;
  double n_reset = 2.0;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    for (const auto& [key, val] : j.items()) {
      if (key == "kind") kind = val.get<std::string>();
      else if (key == "tie_epsilon") tie_epsilon = val.get<double>();
      else if (key == "tau") tau = val.get<double>();
      else if (key == "n_reset") n_reset = val.get<double>();
      else throw ConfigError("config: unknown strategy key '" + key + "'");
    }
  } else {
    throw ConfigError("config: strategy must be a name or an object");
  }
  try {
    if (kind == "random") return Strategy::random();
    if (kind == "uncertainty") return Strategy::uncertainty(tie_epsilon);
    if (kind == "uncertainty+reset")
      return Strategy::with_surprisal_reset(Strategy::uncertainty(tie_epsilon), tau, n_reset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: strategy: ") + e.what());
  }
  throw ConfigError("config: unknown strategy '" + kind +
                    "' (expected random | uncertainty | uncertainty+reset)");
}

inline nlohmann::json strategy_to_json(const Strategy& s) {
  nlohmann::json j;
  j["kind"] = s.has_surprisal_reset() ? "uncertainty+reset"
              : s.base() == Strategy::Base::kRandom ? "random"
                                                    : "uncertainty";
  if (s.base() == Strategy::Base::kUncertainty) j["tie_epsilon"] = s.tie_epsilon();
  if (s.has_surprisal_reset()) {
    j["tau"] = s.tau();
    j["n_reset"] = s.n_reset();
  }
  return j;
}

inline AccessDistribution access_from_json(const nlohmann::json& j, std::uint32_t k) {
  if (j.is_string()) {
    const auto kind = j.get<std::string>();
    if (kind == "uniform") return AccessDistribution::uniform(k);
    throw ConfigError("config: access '" + kind + "' needs an object form (or use \"uniform\")");
  }
  if (!j.is_object()) throw ConfigError("config: access must be a name or an object");
  std::string kind;
  std::optional<double> s;
  for (const auto& [key, val] : j.items()) {
    if (key == "kind") kind = val.get<std::string>();
    else if (key == "s") s = val.get<double>();
    else throw ConfigError("config: unknown access key '" + key + "'");
  }
  if (kind == "uniform") return AccessDistribution::uniform(k);
  if (kind == "zipf") {
    if (!s) throw ConfigError("config: zipf access requires exponent 's'");
    try {
      return AccessDistribution::zipf(k, *s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: access: ") + e.what());
    }
  }
  throw ConfigError("config: unknown access kind '" + kind + "' (expected uniform | zipf)");
}

inline nlohmann::json access_to_json(const AccessDistribution& a) {
  nlohmann::json j;
  if (a.kind() == AccessKind::kUniform) {
    j["kind"] = "uniform";
  } else {
    j["kind"] = "zipf";
    j["s"] = a.zipf_s();
  }
  return j;
}

inline std::vector<ScheduleSegment> segments_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw ConfigError("config: schedule segments must be an array");
  std::vector<ScheduleSegment> segs;
  for (const auto& item : arr) {
    ScheduleSegment seg{};
    bool have_start = false, have_theta = false;
    for (const auto& [key, val] : item.items()) {
      if (key == "start_tick") { seg.start_tick = val.get<Tick>(); have_start = true; }
      else if (key == "theta_star") { seg.theta_star = val.get<double>(); have_theta = true; }
      else throw ConfigError("config: unknown schedule segment key '" + key + "'");
    }
    if (!have_start || !have_theta)
      throw ConfigError("config: schedule segment needs start_tick and theta_star");
    segs.push_back(seg);
  }
  return segs;
}

inline GroundTruthSchedule schedule_from_json(const nlohmann::json& j) {
  try {
    if (j.is_array()) return GroundTruthSchedule(segments_from_json(j));
    if (!j.is_object()) throw ConfigError("config: schedule must be an array or an object");
    std::vector<ScheduleSegment> base;
    nlohmann::json overrides;
    for (const auto& [key, val] : j.items()) {
      if (key == "segments") base = segments_from_json(val);
      else if (key == "overrides") overrides = val;
      else throw ConfigError("config: unknown schedule key '" + key + "'");
    }
    GroundTruthSchedule sched(base);
    if (!overrides.is_null()) {
      if (!overrides.is_array()) throw ConfigError("config: schedule overrides must be an array");
      for (const auto& ov : overrides) {
        std::optional<PropositionId> id;
        std::vector<ScheduleSegment> segs;
        for (const auto& [key, val] : ov.items()) {
          if (key == "id") id = val.get<PropositionId>();
          else if (key == "segments") segs = segments_from_json(val);
          else throw ConfigError("config: unknown schedule override key '" + key + "'");
        }
        if (!id) throw ConfigError("config: schedule override needs an id");
        sched.add_override(*id, segs);
      }
    }
    return sched;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: schedule: ") + e.what());
  }
}

inline nlohmann::json schedule_to_json(const GroundTruthSchedule& s) {
  auto segs_to_json = [](const std::vector<ScheduleSegment>& segs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& seg : segs)
      arr.push_back({{"start_tick", seg.start_tick}, {"theta_star", seg.theta_star}});
    return arr;
  };
  nlohmann::json j;
  j["segments"] = segs_to_json(s.segments());
  if (!s.overrides().empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [id, segs] : s.overrides())
      arr.push_back({{"id", id}, {"segments", segs_to_json(segs)}});
    j["overrides"] = arr;
  }
  return j;
}

}  // namespace detail

/// Defaults shared by every preset and used as the base for config files:
/// the k=100 universe with the 0.8 -> 0.2 consensus shift at tick 501.
inline ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.k = 100;
  cfg.horizon_T = 2000;
  cfg.gamma = 0.999;
  cfg.strategy = Strategy::random();
  cfg.access = AccessDistribution::uniform(100);
  cfg.schedule = GroundTruthSchedule({{1, 0.8}, {501, 0.2}});
  cfg.batch_m = 10;
  cfg.n_min = 0.5;
  cfg.capacity = std::nullopt;
  cfg.prior_alpha = 1.0;
  cfg.prior_beta = 1.0;
  cfg.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
  return cfg;
}

inline const std::vector<std::pair<std::string, std::string>>& preset_catalog() {
  static const std::vector<std::pair<std::string, std::string>> catalog = {
      {"exp1-static", "gamma=1.0, random sampling, uniform access"},
      {"exp1-high", "gamma=0.999, random sampling, uniform access"},
      {"exp1-low", "gamma=0.95, random sampling, uniform access"},
      {"exp2-random", "gamma=0.999, random sampling, uniform access"},
      {"exp2-uncertainty", "gamma=0.999, uncertainty sampling, uniform access"},
      {"exp3-random", "gamma=0.999, random sampling, zipf(s=1.1) access"},
      {"exp3-uncertainty", "gamma=0.999, uncertainty sampling, zipf(s=1.1) access"},
  };
  return catalog;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, desc] : preset_catalog()) names.push_back(name);
  return names;
}

inline ExperimentConfig load_preset(const std::string& name) {
  ExperimentConfig cfg = default_config();
  if (name == "exp1-static") {
    cfg.gamma = 1.0;
  } else if (name == "exp1-high" || name == "exp2-random") {
    cfg.gamma = 0.999;
  } else if (name == "exp1-low") {
    cfg.gamma = 0.95;
  } else if (name == "exp2-uncertainty") {
    cfg.strategy = Strategy::uncertainty();
  } else if (name == "exp3-random") {
    cfg.access = AccessDistribution::zipf(cfg.k, 1.1);
  } else if (name == "exp3-uncertainty") {
    cfg.strategy = Strategy::uncertainty();
    cfg.access = AccessDistribution::zipf(cfg.k, 1.1);
  } else {
    throw ConfigError("unknown preset '" + name + "'; see list-presets");
  }
  return cfg;
}

/// Build a config from a flat JSON object layered over default_config().
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  ExperimentConfig cfg = default_config();
  // k first: the access distribution's universe follows it unless overridden.
  if (j.contains("k")) cfg.k = j.at("k").get<std::uint32_t>();
  nlohmann::json access_spec = detail::access_to_json(cfg.access);
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "k") continue;
      else if (key == "horizon_T") cfg.horizon_T = val.get<Tick>();
      else if (key == "gamma") cfg.gamma = val.get<double>();
      else if (key == "strategy") cfg.strategy = detail::strategy_from_json(val);
      else if (key == "access") access_spec = val;
      else if (key == "schedule") cfg.schedule = detail::schedule_from_json(val);
      else if (key == "batch_m") cfg.batch_m = val.get<std::size_t>();
      else if (key == "n_min") cfg.n_min = val.get<double>();
      else if (key == "capacity") {
        if (val.is_null()) cfg.capacity = std::nullopt;
        else cfg.capacity = val.get<std::size_t>();
      } else if (key == "prior_alpha") cfg.prior_alpha = val.get<double>();
      else if (key == "prior_beta") cfg.prior_beta = val.get<double>();
      else if (key == "seeds") cfg.seeds = val.get<std::vector<std::uint64_t>>();
      else throw ConfigError("config: unknown key '" + key + "'");
    }
    cfg.access = detail::access_from_json(access_spec, cfg.k);
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["k"] = cfg.k;
  j["horizon_T"] = cfg.horizon_T;
  j["gamma"] = cfg.gamma;
  j["strategy"] = detail::strategy_to_json(cfg.strategy);
  j["access"] = detail::access_to_json(cfg.access);
  j["schedule"] = detail::schedule_to_json(cfg.schedule);
  j["batch_m"] = cfg.batch_m;
  j["n_min"] = cfg.n_min;
  if (cfg.capacity) j["capacity"] = *cfg.capacity;
  else j["capacity"] = nullptr;
  j["prior_alpha"] = cfg.prior_alpha;
  j["prior_beta"] = cfg.prior_beta;
  j["seeds"] = cfg.seeds;
  return j;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace beliefsim
