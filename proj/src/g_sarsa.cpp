#include "grl/g_sarsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grl/errors.hpp"

namespace grl {

AbstractActionSet::AbstractActionSet(int cluster_count)
    : p(cluster_count),
      selections(static_cast<std::size_t>(std::max(cluster_count, 0)), 0),
      successes(static_cast<std::size_t>(std::max(cluster_count, 0)), 0) {}

double AbstractActionSet::beta(int cluster) const {
  const auto i = static_cast<std::size_t>(cluster);
  if (selections[i] == 0) return 0.0;
  return static_cast<double>(successes[i]) /
         static_cast<double>(selections[i]);
}

void AbstractActionSet::record_selection(int cluster, bool in_context) {
  const auto i = static_cast<std::size_t>(cluster);
  ++selections[i];
  if (in_context) ++successes[i];
}

std::vector<std::vector<const ExperienceParticle*>> cluster_members(
    const std::vector<const ExperienceParticle*>& particles, int p) {
  std::vector<std::vector<const ExperienceParticle*>> clusters(
      static_cast<std::size_t>(p));
  for (const ExperienceParticle* particle : particles)
    if (particle->cluster_id >= 0 && particle->cluster_id < p)
      clusters[static_cast<std::size_t>(particle->cluster_id)].push_back(
          particle);
  return clusters;
}

Resolution action_resolution(
    const Eigen::VectorXd& state_vec, int abstract_index,
    const std::vector<std::vector<const ExperienceParticle*>>& clusters,
    const ParametricActionModel& model, const KernelHyperparameters& h,
    double tau) {
  if (abstract_index < 0 ||
      abstract_index >= static_cast<int>(clusters.size()))
    throw PreconditionError("action_resolution: abstract index out of range");

  Resolution best;
  for (const ExperienceParticle* donor :
       clusters[static_cast<std::size_t>(abstract_index)]) {
    const AugmentedState hypothetical = make_hypothetical(state_vec, *donor);
    const double c = correlation(hypothetical, donor->aug, h);
    if (c < tau) continue;
    const bool better =
        c > best.correlation ||
        (c == best.correlation && best.donor != nullptr &&
         donor->birth_step < best.donor->birth_step);
    if (!best.in_context || better) {
      best.in_context = true;
      best.donor = donor;
      best.correlation = c;
    }
  }
  if (best.in_context)
    best.primitive = resolve_primitive(best.donor->aug.action_vec, model);
  return best;
}

SoftmaxResult abstract_policy(int partition, const AbstractActionSet& aset,
                              double temperature, Rng& rng) {
  if (aset.p < 1) throw PreconditionError("abstract_policy: empty action set");
  Eigen::VectorXd q(aset.p);
  for (int i = 0; i < aset.p; ++i) q[i] = aset.q_table.get(partition, i);
  return softmax_sample(q, temperature, rng);
}

BaseQTable::TdResult g_sarsa_update(AbstractActionSet& aset, int s,
                                    int abstract_i, double r, int s2,
                                    int abstract_j, bool terminal) {
  return aset.q_table.update(s, abstract_i, r, s2, abstract_j, terminal);
}

int assign_cluster(
    const ExperienceParticle& particle,
    const std::vector<std::vector<const ExperienceParticle*>>& clusters,
    const KernelHyperparameters& h, int k, double tau) {
  if (clusters.empty()) throw PreconditionError("assign_cluster: no clusters");

  int best = -1;
  double best_avg = -1.0;
  int first_empty = -1;
  std::vector<double> corr;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) {
      if (first_empty < 0) first_empty = static_cast<int>(c);
      continue;
    }
    corr.clear();
    corr.reserve(clusters[c].size());
    for (const ExperienceParticle* member : clusters[c])
      corr.push_back(correlation(particle.aug, member->aug, h));
    const int take = std::min<int>(k, static_cast<int>(corr.size()));
    std::partial_sort(corr.begin(), corr.begin() + take, corr.end(),
                      std::greater<double>());
    double avg = 0.0;
    for (int i = 0; i < take; ++i) avg += corr[static_cast<std::size_t>(i)];
    avg /= take;
    if (avg > best_avg) {
      best_avg = avg;
      best = static_cast<int>(c);
    }
  }
  if (best >= 0 && best_avg >= tau) return best;
  if (first_empty >= 0) return first_empty;
  return best >= 0 ? best : 0;
}

FallbackAction out_of_context_fallback(const ParametricActionModel& model,
                                       Rng& rng) {
  const int primitive = rng.uniform_int(model.primitive_count());
  return {primitive, sample_action(primitive, model, rng)};
}

GSarsaLog run_g_sarsa(Environment& env, const GSarsaConfig& cfg,
                      const KernelHyperparameters& h0, std::uint64_t seed) {
  h0.validate();
  if (cfg.cluster_count < 2)
    throw PreconditionError("g-sarsa: cluster_count must be >= 2");

  GSarsaLog log;
  Rng root(seed);
  Rng env_rng = root.substream("env");
  Rng policy_rng = root.substream("policy");
  Rng warmup_rng = root.substream("warmup");
  Rng cluster_rng = root.substream("clustering");

  const GridGeometry geometry = cfg.memory_geometry.cells.empty()
                                    ? env.default_geometry()
                                    : cfg.memory_geometry;
  const ParametricActionModel& model = env.action_model();
  const int n_primitives = model.primitive_count();
  const int step_cap = cfg.step_cap > 0 ? cfg.step_cap : env.default_max_steps();

  MemoryConfig mc{geometry, cfg.quota_pos, cfg.quota_neg};
  WorkingMemory mem(mc);
  KernelHyperparameters hyper = h0;

  // --- Warmup: random policy, primitive-level TD, to seed the memory.
  {
    BaseQTable warm;
    warm.alpha = cfg.alpha;
    warm.gamma = cfg.gamma;
    Eigen::VectorXd s = env.reset(env_rng);
    long birth = 0;
    int episode_steps = 0;
    for (int t = 0; t < cfg.warmup_transitions; ++t) {
      const int a = warmup_rng.uniform_int(n_primitives);
      const StepOutcome outcome = env.step(s, a, env_rng);
      ++episode_steps;
      const int a2 = warmup_rng.uniform_int(n_primitives);
      const auto [q, td] = warm.update(
          geometry.partition_of(s), a, outcome.reward,
          geometry.partition_of(outcome.next_state), a2, outcome.terminal);
      ExperienceParticle particle;
      particle.aug = AugmentedState(s, outcome.executed_action);
      particle.fitness = q;
      particle.td = td;
      particle.birth_step = ++birth;
      mem.update(std::move(particle), hyper, cfg.tau);
      if (outcome.terminal || episode_steps >= step_cap) {
        s = env.reset(env_rng);
        episode_steps = 0;
      } else {
        s = outcome.next_state;
      }
    }
  }

  std::optional<GprModel> gpr;
  const auto refit = [&] {
    if (mem.size() > 0) gpr = fit(mem.training_set(), hyper);
  };
  ArdConfig ard_cfg = cfg.ard;
  set_ard_box(ard_cfg, h0, cfg.ard_amp_box, cfg.ard_scale_box);
  const auto run_ard = [&](long transition) {
    if (mem.size() < 2) return;
    const ArdResult res = ard_optimize(mem.training_set(), hyper, ard_cfg);
    hyper = res.hyper;
    if (!res.lml_trace.empty()) log.lml_trace.push_back(res.lml_trace.back());
    log.ard_transitions.push_back(transition);
    refit();
  };

  AbstractActionSet aset(cfg.cluster_count);
  aset.q_table.alpha = cfg.alpha;
  aset.q_table.gamma = cfg.gamma;
  aset.primitive_mirror.alpha = cfg.alpha;
  aset.primitive_mirror.gamma = cfg.gamma;
  aset.reformulation_period = cfg.reform_period;
  aset.period_growth = cfg.reform_growth;
  aset.period_cap = cfg.reform_cap;

  const auto recluster = [&](bool reindex) {
    if (mem.size() < cfg.cluster_count) return;
    auto mutable_particles = mem.particles_mutable();
    std::vector<const ExperienceParticle*> view(mutable_particles.begin(),
                                                mutable_particles.end());
    const SimilarityGraph graph = SimilarityGraph::from_particles(view, hyper);
    const Partitioning part =
        spectral_partition(graph, cfg.cluster_count, cluster_rng);
    std::vector<int> labels = part.labels;
    if (reindex) {
      std::vector<int> old_labels(mutable_particles.size());
      bool complete = true;
      for (std::size_t i = 0; i < mutable_particles.size(); ++i) {
        old_labels[i] = mutable_particles[i]->cluster_id;
        complete = complete && old_labels[i] >= 0 &&
                   old_labels[i] < cfg.cluster_count;
      }
      if (complete) {
        labels = reindex_clusters(old_labels, labels, cfg.cluster_count);
        ++log.reindex_count;
      }
    }
    for (std::size_t i = 0; i < mutable_particles.size(); ++i)
      mutable_particles[i]->cluster_id = labels[i];
  };

  // Step 1: bootstrap hyperparameters and the initial abstract actions.
  run_ard(0);
  refit();
  recluster(/*reindex=*/false);

  long global_t = 0;
  long last_reform = 0;
  double period = cfg.reform_period;

  // Selects an abstract action and resolves it to an executable primitive.
  struct Choice {
    int abstract = -1;
    int primitive = -1;
    bool in_context = false;
  };
  const auto choose = [&](const Eigen::VectorXd& s, double temperature) {
    Choice c;
    const int partition = geometry.partition_of(s);
    c.abstract = abstract_policy(partition, aset, temperature, policy_rng).index;
    const auto clusters = cluster_members(mem.particles(), cfg.cluster_count);
    const Resolution res = action_resolution(s, c.abstract, clusters, model,
                                             hyper, cfg.tau);
    c.in_context = res.in_context;
    if (res.in_context) {
      c.primitive = res.primitive;
    } else {
      c.primitive = out_of_context_fallback(model, policy_rng).primitive;
    }
    aset.record_selection(c.abstract, c.in_context);
    return c;
  };

  for (int ep = 0; ep < cfg.episode_cap; ++ep) {
    const double temperature = cfg.temperature.at_episode(ep);
    Eigen::VectorXd s = env.reset(env_rng);
    Choice choice = choose(s, temperature);

    EpisodeRow row;
    row.episode = ep;
    for (int step = 0; step < step_cap; ++step) {
      if (global_t - last_reform >= static_cast<long>(period)) {
        run_ard(global_t);
        recluster(/*reindex=*/true);
        last_reform = global_t;
        period = std::min(period + cfg.reform_growth,
                          static_cast<double>(cfg.reform_cap));
      }

      // Execution resolves the primitive's stochastic effects; the donor's
      // stored vector served only to match the decision context.
      const StepOutcome outcome = env.step(s, choice.primitive, env_rng);
      ++global_t;
      ++row.steps;
      row.total_reward += outcome.reward;
      row.hit_obstacle = row.hit_obstacle || outcome.hit_obstacle;

      const int s_part = geometry.partition_of(s);
      const int s2_part = geometry.partition_of(outcome.next_state);

      Choice next;
      if (!outcome.terminal) next = choose(outcome.next_state, temperature);

      const auto [q_new, td] =
          g_sarsa_update(aset, s_part, choice.abstract, outcome.reward,
                         s2_part, std::max(next.abstract, 0), outcome.terminal);
      aset.primitive_mirror.values[{s_part, choice.primitive}] = q_new;

      ExperienceParticle particle;
      particle.aug = AugmentedState(s, outcome.executed_action);
      particle.fitness = q_new;
      particle.td = td;
      particle.birth_step = cfg.warmup_transitions + global_t;
      {
        const auto clusters = cluster_members(mem.particles(), cfg.cluster_count);
        bool any = false;
        for (const auto& c : clusters) any = any || !c.empty();
        particle.cluster_id =
            any ? assign_cluster(particle, clusters, hyper, cfg.knn, cfg.tau)
                : -1;
      }
      if (mem.update(std::move(particle), hyper, cfg.tau)) refit();

      row.abstract_chosen = choice.abstract;
      row.resolved_primitive = choice.primitive;
      row.in_context = choice.in_context;

      s = outcome.next_state;
      if (outcome.terminal) break;
      choice = next;
    }

    {
      const auto clusters = cluster_members(mem.particles(), cfg.cluster_count);
      int nonempty = 0;
      for (const auto& c : clusters)
        if (!c.empty()) ++nonempty;
      row.cluster_count = nonempty;
    }
    row.reindex_events = log.reindex_count;
    row.lml = gpr.has_value() ? log_marginal_likelihood(*gpr)
                              : std::numeric_limits<double>::quiet_NaN();
    row.memory_size = mem.size();
    log.max_memory_size = std::max(log.max_memory_size, mem.size());
    log.episodes.push_back(row);
    if (cfg.snapshot_every > 0 && (ep + 1) % cfg.snapshot_every == 0)
      log.snapshots.emplace_back(ep, mem.snapshot());
  }

  log.final_memory = mem.snapshot();
  log.final_hyper = hyper;
  log.final_model = gpr;
  log.final_beta.resize(static_cast<std::size_t>(cfg.cluster_count));
  for (int i = 0; i < cfg.cluster_count; ++i)
    log.final_beta[static_cast<std::size_t>(i)] = aset.beta(i);
  for (const auto& p : log.final_memory)
    log.final_cluster_ids.push_back(p.cluster_id);
  return log;
}

}  // namespace grl
