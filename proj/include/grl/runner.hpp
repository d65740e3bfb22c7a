#ifndef GRL_RUNNER_HPP
#define GRL_RUNNER_HPP

#include <string>
#include <vector>

#include "grl/run_config.hpp"

namespace grl {

struct RunReport {
  bool ok = false;
  std::vector<std::string> problems;  // validation report when !ok
  std::string out_dir;
};

// Executes every (algo, seed) pair of the config and writes per-run artifact
// directories (learning_curve.csv, memory snapshots, field plots for the
// navigation worlds) plus an aggregate summary.json.
RunReport run(const RunConfig& cfg);

// Baseline policy execution on the task environment.
TrainingLog run_baseline(TaskEnvironment& env, Algo baseline, int episodes,
                         std::uint64_t seed);

// Stable CSV schema shared by all algorithms; the abstract-action columns
// stay empty for the non-abstract learners.
void write_learning_curve_csv(std::ostream& os, const TrainingLog& log,
                              bool abstract_columns);

}  // namespace grl

#endif
