// Command-line driver: run experiment presets or JSON configs and emit the
// per-tick metrics as CSV for plotting.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "beliefsim/config.hpp"
#include "beliefsim/runner.hpp"

namespace {

int cmd_run(const std::string& preset, const std::string& config_path, const std::string& out_dir,
            bool per_seed) {
  beliefsim::RunManifest manifest;
  try {
    manifest.config =
        !preset.empty() ? beliefsim::load_preset(preset) : beliefsim::load_config_file(config_path);
    manifest.config.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  manifest.output_path = out_dir;
  manifest.emit_per_seed = per_seed;
  const int rc = beliefsim::run_and_emit(manifest);
  if (rc == 0) {
    std::cout << "wrote " << (manifest.output_path / "mean.csv").string();
    if (per_seed) std::cout << " and " << manifest.config.seeds.size() << " per-seed files";
    std::cout << '\n';
  }
  return rc;
}

int cmd_validate(const std::string& config_path) {
  try {
    const auto cfg = beliefsim::load_config_file(config_path);
    std::cout << beliefsim::config_to_json(cfg).dump(2) << '\n';
    std::cout << "ok\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta-Bernoulli belief simulator with forgetting and epistemic caching"};
  app.require_subcommand(1);

  std::string preset;
  std::string config_path;
  std::string out_dir;
  bool per_seed = false;

  auto* run = app.add_subcommand("run", "Run a preset or a JSON config and emit CSV metrics");
  auto* preset_opt = run->add_option("--preset", preset, "Named experiment preset");
  auto* config_opt = run->add_option("--config", config_path, "Path to a JSON config file");
  preset_opt->excludes(config_opt);
  run->add_option("--out", out_dir, "Output directory for mean.csv")->required();
  run->add_flag("--per-seed", per_seed, "Also emit seed_<n>.csv per replication");

  auto* list = app.add_subcommand("list-presets", "List the built-in experiment presets");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a JSON config");
  validate->add_option("--config", validate_path, "Path to a JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (preset.empty() && config_path.empty()) {
      std::cerr << "error: run needs --preset or --config\n";
      return 1;
    }
    return cmd_run(preset, config_path, out_dir, per_seed);
  }
  if (list->parsed()) {
    for (const auto& [name, desc] : beliefsim::preset_catalog())
      std::cout << name << "  (" << desc << ")\n";
    return 0;
  }
  if (validate->parsed()) return cmd_validate(validate_path);
  return 0;
}
