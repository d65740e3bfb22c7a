#ifndef GRL_RF_SARSA_HPP
#define GRL_RF_SARSA_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "grl/environment.hpp"
#include "grl/gpr.hpp"
#include "grl/particle_memory.hpp"
#include "grl/rng.hpp"

namespace grl {

// Discretized base learner: Q-values keyed by (state partition, primitive),
// unseen entries read as zero.
struct BaseQTable {
  double alpha = 0.4;
  double gamma = 0.98;
  std::map<std::pair<int, int>, double> values;

  double get(int partition, int action) const {
    const auto it = values.find({partition, action});
    return it == values.end() ? 0.0 : it->second;
  }

  struct TdResult {
    double new_q;
    double td;
  };

  // One on-policy update: td = r + gamma Q(s', a') - Q(s, a).  Terminal
  // transitions treat the successor value as zero.
  TdResult update(int s, int a, double r, int s2, int a2, bool terminal);
};

struct SoftmaxResult {
  int index = 0;
  Eigen::VectorXd probs;
};

// P(i) proportional to exp(score_i / temperature), computed with
// max-subtraction; the sampled index comes from one uniform draw.
SoftmaxResult softmax_sample(const Eigen::VectorXd& scores, double temperature,
                             Rng& rng);

struct ActionEvaluation {
  Eigen::VectorXd action_vec;
  double fitness = 0.0;
};

// Resolves each primitive into an action vector (f_A+) and predicts the
// fitness of the joined augmented state.  A null model signals an empty
// memory: every fitness is the zero prior mean, so the policy explores
// uniformly.
std::vector<ActionEvaluation> evaluate_actions(
    const Eigen::VectorXd& state_vec, const ParametricActionModel& model,
    const GprModel* gpr, Rng& rng);

struct TemperatureSchedule {
  double start = 5.0;
  double decay = 0.99;   // geometric, applied per episode
  double floor = 0.05;

  double at_episode(int episode) const;
};

struct RfSarsaConfig {
  double alpha = 0.4;
  double gamma = 0.98;
  // Memory grid override; empty cells vector = environment default.
  GridGeometry memory_geometry;
  int ard_period = 10;        // T: state transitions between ARD runs
  double ard_growth = 10.0;   // f(T), additive increment per run (0 = fixed)
  int ard_period_cap = 0;     // 0 = unbounded
  TemperatureSchedule temperature;
  double tau = 0.5;           // association threshold
  int episode_cap = 500;
  int step_cap = 0;           // 0 = environment default
  ArdConfig ard{.max_iters = 20, .step_tolerance = 1e-5};
  double ard_amp_box = 100.0;   // amplitude/noise trust factor around h0
  double ard_scale_box = 4.0;   // length-scale trust factor around h0
  int quota_pos = 3;
  int quota_neg = 3;
  int snapshot_every = 0;     // episodes between memory snapshots (0 = final only)
};

struct EpisodeRow {
  int episode = 0;
  double total_reward = 0.0;
  int steps = 0;
  double lml = 0.0;
  int memory_size = 0;
  bool hit_obstacle = false;
  // Populated by the abstract-action learner only.
  int abstract_chosen = -1;
  int resolved_primitive = -1;
  bool in_context = false;
  int cluster_count = 0;
  int reindex_events = 0;
};

struct TrainingLog {
  std::vector<EpisodeRow> episodes;
  std::vector<std::pair<int, std::vector<ExperienceParticle>>> snapshots;
  std::vector<double> lml_trace;        // after each ARD run
  std::vector<long> ard_transitions;    // global transition index of each run
  std::vector<ExperienceParticle> final_memory;
  KernelHyperparameters final_hyper;
  std::optional<GprModel> final_model;
  int max_memory_size = 0;
};

// Two-tier learner: a tabular SARSA layer supplies Q-values and temporal
// differences, the GPR layer predicts fitness over augmented states, action
// selection is softmax over fitness, ARD runs every T transitions (T growing
// by f(T)), and every transition feeds one particle to the working memory.
TrainingLog run_rf_sarsa(Environment& env, const RfSarsaConfig& cfg,
                         const KernelHyperparameters& h0, std::uint64_t seed,
                         const std::vector<ExperienceParticle>& seed_memory = {});

}  // namespace grl

#endif
