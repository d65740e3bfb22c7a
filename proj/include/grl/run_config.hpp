#ifndef GRL_RUN_CONFIG_HPP
#define GRL_RUN_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "grl/environment.hpp"
#include "grl/g_sarsa.hpp"
#include "grl/kernels.hpp"
#include "grl/rf_sarsa.hpp"

namespace grl {

enum class Algo { RfSarsa, GSarsa, BaselineMatchmaker, BaselineRandom };
enum class EnvKind { Nav5x5, Nav7x5, Nav9x9, TaskAssign, CustomFile };

std::string algo_name(Algo a);
std::string env_name(EnvKind e);

// One experiment description: which algorithm on which environment, under
// which kernel/action/memory/schedule blocks, for which seeds.
struct RunConfig {
  std::vector<Algo> algos{Algo::RfSarsa};
  EnvKind env = EnvKind::Nav5x5;
  std::string env_file;  // for EnvKind::CustomFile
  std::vector<std::uint64_t> seeds{1};
  int episodes = 500;
  int step_cap = 0;  // 0 = environment default
  std::string out_dir = "out";

  // Kernel block; empty length_scales means per-environment defaults.
  KernelKind kernel_kind = KernelKind::SquaredExponentialJoint;
  double signal_amplitude = 100.0;
  double noise_scale = 1.0;
  std::vector<double> length_scales;

  // Action-model overrides (navigation only).
  double dr_target = 1.0, dr_lo = 0.8, dr_hi = 1.2, dr_sigma = 0.1;
  double angle_sigma = 0.1308996938995747;  // pi/24
  double eta = 0.95;

  // Memory block.
  int quota_pos = 3;
  int quota_neg = 3;
  double tau = 0.5;
  std::vector<int> memory_grid_cells;  // empty = environment default

  // Schedule block.
  TemperatureSchedule temperature;
  int ard_period = 10;
  double ard_growth = 10.0;
  int ard_period_cap = 100;
  int ard_max_iters = 20;
  int cluster_count = 10;
  int warmup_transitions = 200;
  int knn = 5;

  int snapshot_every = 0;
  int field_plot_resolution = 3;

  double alpha = 0.4;
  double gamma = 0.98;
};

// Parses the JSON config document.  Collects every violation instead of
// stopping at the first; throws ConfigError with the full report.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Materializes the environment (and kernel defaults) the config names.
std::unique_ptr<Environment> make_environment(const RunConfig& cfg);
KernelHyperparameters make_kernel(const RunConfig& cfg, const Environment& env);

// Validates all blocks against their module invariants; returns the list of
// problems (empty = valid).
std::vector<std::string> validate_config(const RunConfig& cfg);

}  // namespace grl

#endif
