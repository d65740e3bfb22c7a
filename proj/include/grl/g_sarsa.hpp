#ifndef GRL_G_SARSA_HPP
#define GRL_G_SARSA_HPP

#include <Eigen/Dense>
#include <vector>

#include "grl/environment.hpp"
#include "grl/gpsc.hpp"
#include "grl/rf_sarsa.hpp"

namespace grl {

// Abstract actions as particle clusters plus the abstract-level Q-table.
// Cluster membership itself lives in the particles' cluster_id; this struct
// carries the learning state attached to the cluster indices, which stay
// stable across reformulations through majority-vote reindexing.
struct AbstractActionSet {
  int p = 0;
  BaseQTable q_table;           // keyed by (state partition, abstract index)
  BaseQTable primitive_mirror;  // diagnostic copy per resolved primitive
  std::vector<long> selections;
  std::vector<long> successes;  // in-context resolutions
  int reformulation_period = 10;
  double period_growth = 10.0;
  int period_cap = 100;

  explicit AbstractActionSet(int cluster_count = 0);
  double beta(int cluster) const;  // association success rate, 0 if unused
  void record_selection(int cluster, bool in_context);
};

// Per-cluster particle lists in deterministic memory order; particles with
// no cluster yet are skipped.
std::vector<std::vector<const ExperienceParticle*>> cluster_members(
    const std::vector<const ExperienceParticle*>& particles, int p);

struct Resolution {
  bool in_context = false;
  int primitive = -1;
  const ExperienceParticle* donor = nullptr;
  double correlation = 0.0;
};

// Greedy action resolution: graft each cluster particle's action onto the
// query state (hypothetical state), keep donors whose correlation reaches
// tau, pick the most correlated one, and classify its action vector back to
// a primitive.  Empty clusters and unmatched queries are out of context.
Resolution action_resolution(const Eigen::VectorXd& state_vec,
                             int abstract_index,
                             const std::vector<std::vector<const ExperienceParticle*>>& clusters,
                             const ParametricActionModel& model,
                             const KernelHyperparameters& h, double tau);

// Softmax over the abstract Q-values of one state partition.
SoftmaxResult abstract_policy(int partition, const AbstractActionSet& aset,
                              double temperature, Rng& rng);

// Two-step-horizon TD update over (partition, abstract action); the resolved
// primitive's mirror entry is written by the caller.
BaseQTable::TdResult g_sarsa_update(AbstractActionSet& aset, int s,
                                    int abstract_i, double r, int s2,
                                    int abstract_j, bool terminal);

// kNN cluster membership for a new particle: best average correlation to
// the k most correlated members of each cluster; below tau, prefer the
// lowest-index empty cluster, else the best average anyway.
int assign_cluster(const ExperienceParticle& particle,
                   const std::vector<std::vector<const ExperienceParticle*>>& clusters,
                   const KernelHyperparameters& h, int k, double tau);

struct FallbackAction {
  int primitive;
  Eigen::VectorXd action_vec;
};

// Randomized action resolution used at out-of-context states.
FallbackAction out_of_context_fallback(const ParametricActionModel& model,
                                       Rng& rng);

struct GSarsaConfig {
  double alpha = 0.2;
  double gamma = 0.98;
  GridGeometry memory_geometry;  // empty cells = environment default
  int cluster_count = 10;       // p
  int reform_period = 10;       // T, grows additively to the cap
  double reform_growth = 10.0;
  int reform_cap = 100;
  TemperatureSchedule temperature;
  double tau = 0.5;
  int episode_cap = 1000;
  int step_cap = 0;             // 0 = environment default
  ArdConfig ard{.max_iters = 20, .step_tolerance = 1e-5};
  double ard_amp_box = 100.0;
  double ard_scale_box = 4.0;
  int quota_pos = 3;
  int quota_neg = 3;
  int warmup_transitions = 200;  // random-policy seeding of the memory
  int knn = 5;
  int snapshot_every = 0;
};

struct GSarsaLog : TrainingLog {
  std::vector<double> final_beta;
  std::vector<int> final_cluster_ids;  // aligned with final_memory
  int reindex_count = 0;
};

// Concept-driven learner: seed the memory by a random-policy warmup, cluster
// it with GPSC, then learn a softmax policy over abstract actions with
// greedy resolution to primitives, kNN membership for new particles, and
// periodic ARD + GPSC reformulation with majority-vote reindexing.
GSarsaLog run_g_sarsa(Environment& env, const GSarsaConfig& cfg,
                      const KernelHyperparameters& h0, std::uint64_t seed);

}  // namespace grl

#endif
