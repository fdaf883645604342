#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thinshell/harness.hpp"
#include "thinshell/parallel.hpp"

namespace th = thinshell::harness;

namespace {

int list_experiments() {
  for (const auto& info : th::registry()) std::cout << info.key << "\t" << info.anchor << "\n";
  return 0;
}

int run(const std::string& experiment, const std::string& config_path, std::optional<std::uint64_t> seed,
        const std::string& out, int workers, bool overlays) {
  th::ExperimentConfig config = th::parse_config(config_path);
  if (!config.experiment.empty() && config.experiment != experiment)
    std::cerr << "note: config names '" << config.experiment << "', running '" << experiment << "'\n";
  config.experiment = experiment;
  if (seed) {
    config.seed = *seed;
  } else if (!config.raw.contains("seed")) {
    throw th::ConfigError("validation: 'seed' must be given in the config or with --seed");
  }
  if (!out.empty()) config.output_dir = out;
  if (config.output_dir.empty()) throw th::ConfigError("validation: 'output_dir' must be given in the config or with --out");
  thinshell::set_worker_count(workers);

  const th::ExperimentResult result = th::run_experiment(config);
  th::emit_report(result, config.output_dir, {overlays});
  int passed = 0, failed = 0, reported = 0;
  for (const auto& r : result.records) {
    if (r.verdict == th::Verdict::pass) ++passed;
    if (r.verdict == th::Verdict::fail) ++failed;
    if (r.verdict == th::Verdict::report_only) ++reported;
  }
  std::cout << experiment << ": " << passed << " pass, " << failed << " fail, " << reported << " report-only -> "
            << config.output_dir.string() << "\n";
  return result.any_failure() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thinshell: numerical experiments on log-concave measures"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "Print the experiment registry with anchors");

  auto* run_cmd = app.add_subcommand("run", "Run one registered experiment");
  std::string experiment, config_path, out;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  bool overlays = false;
  run_cmd->add_option("experiment", experiment, "Registry key")->required();
  run_cmd->add_option("--config", config_path, "INI-style config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Master seed (overrides the config)");
  run_cmd->add_option("--out", out, "Output directory (overrides the config)");
  run_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--overlays", overlays, "Append reference deviation curves to tail tables");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) return list_experiments();
    return run(experiment, config_path, seed, out, workers, overlays);
  } catch (const th::ConfigError& e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
