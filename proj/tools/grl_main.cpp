#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "grl/errors.hpp"
#include "grl/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"grl: reinforcement-field learning experiments"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "execute the runs of a config file");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "JSON run configuration")
      ->required();
  std::string out_override, algo_override, env_override;
  long long seed_override = -1;
  int episodes_override = -1;
  run_cmd->add_option("--seed", seed_override, "replace the seed list");
  run_cmd->add_option("--episodes", episodes_override, "override episode count");
  run_cmd->add_option("--out", out_override, "override output directory");
  run_cmd->add_option("--algo", algo_override,
                      "override algorithm (rf_sarsa, g_sarsa, "
                      "baseline_matchmaker, baseline_random)");
  run_cmd->add_option("--env", env_override,
                      "override environment (nav_5x5, nav_7x5, nav_9x9, "
                      "task_assign, custom)");

  CLI11_PARSE(app, argc, argv);

  try {
    grl::RunConfig cfg = grl::load_config_file(config_path);
    if (seed_override >= 0)
      cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
    if (episodes_override > 0) cfg.episodes = episodes_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (!algo_override.empty()) {
      grl::RunConfig probe =
          grl::parse_config("{\"algo\": \"" + algo_override + "\"}");
      cfg.algos = probe.algos;
    }
    if (!env_override.empty()) {
      grl::RunConfig probe =
          grl::parse_config("{\"env\": \"" + env_override + "\"}");
      cfg.env = probe.env;
    }
    if (const char* root = std::getenv("GRL_OUTPUT_ROOT");
        root != nullptr && cfg.out_dir.rfind('/', 0) != 0)
      cfg.out_dir = std::string(root) + "/" + cfg.out_dir;

    const grl::RunReport report = grl::run(cfg);
    if (!report.ok) {
      std::cerr << "configuration invalid:\n";
      for (const auto& p : report.problems) std::cerr << "  - " << p << "\n";
      return 1;
    }
    std::cout << "artifacts written to " << report.out_dir << "\n";
    return 0;
  } catch (const grl::ConfigError& e) {
    std::cerr << "configuration invalid:\n  - " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
}
