#include "grl/rf_sarsa.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "grl/errors.hpp"

namespace grl {

BaseQTable::TdResult BaseQTable::update(int s, int a, double r, int s2, int a2,
                                        bool terminal) {
  const double q = get(s, a);
  const double next = terminal ? 0.0 : get(s2, a2);
  const double td = r + gamma * next - q;
  const double new_q = q + alpha * td;
  values[{s, a}] = new_q;
  return {new_q, td};
}

SoftmaxResult softmax_sample(const Eigen::VectorXd& scores, double temperature,
                             Rng& rng) {
  if (scores.size() == 0)
    throw PreconditionError("softmax: needs at least one entry");
  if (!(temperature > 0.0))
    throw PreconditionError("softmax: temperature must be positive");
  SoftmaxResult out;
  const double top = scores.maxCoeff();
  out.probs = ((scores.array() - top) / temperature).exp();
  out.probs /= out.probs.sum();
  double r = rng.uniform();
  out.index = static_cast<int>(scores.size()) - 1;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    r -= out.probs[i];
    if (r <= 0.0) {
      out.index = static_cast<int>(i);
      break;
    }
  }
  return out;
}

double TemperatureSchedule::at_episode(int episode) const {
  return std::max(start * std::pow(decay, episode), floor);
}

namespace {

std::vector<ActionEvaluation> evaluate_with(
    const Eigen::VectorXd& state_vec, int primitive_count,
    const std::function<Eigen::VectorXd(int)>& provider, const GprModel* gpr) {
  std::vector<ActionEvaluation> out;
  out.reserve(static_cast<std::size_t>(primitive_count));
  for (int i = 0; i < primitive_count; ++i) {
    ActionEvaluation e;
    e.action_vec = provider(i);
    e.fitness = (gpr != nullptr && !gpr->empty())
                    ? predict_mean(*gpr, AugmentedState(state_vec, e.action_vec))
                    : 0.0;
    out.push_back(std::move(e));
  }
  return out;
}

Eigen::VectorXd fitness_vector(const std::vector<ActionEvaluation>& evals) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(evals.size()));
  for (std::size_t i = 0; i < evals.size(); ++i)
    f[static_cast<Eigen::Index>(i)] = evals[i].fitness;
  return f;
}

}  // namespace

std::vector<ActionEvaluation> evaluate_actions(
    const Eigen::VectorXd& state_vec, const ParametricActionModel& model,
    const GprModel* gpr, Rng& rng) {
  return evaluate_with(
      state_vec, model.primitive_count(),
      [&](int i) { return sample_action(i, model, rng); }, gpr);
}

TrainingLog run_rf_sarsa(Environment& env, const RfSarsaConfig& cfg,
                         const KernelHyperparameters& h0, std::uint64_t seed,
                         const std::vector<ExperienceParticle>& seed_memory) {
  h0.validate();
  TrainingLog log;

  Rng root(seed);
  Rng env_rng = root.substream("env");
  Rng policy_rng = root.substream("policy");

  const GridGeometry geometry = cfg.memory_geometry.cells.empty()
                                    ? env.default_geometry()
                                    : cfg.memory_geometry;
  MemoryConfig mc{geometry, cfg.quota_pos, cfg.quota_neg};
  WorkingMemory mem(mc);
  KernelHyperparameters hyper = h0;
  for (const auto& p : seed_memory) mem.update(p, hyper, cfg.tau);

  std::optional<GprModel> model;
  const auto refit = [&] {
    if (mem.size() > 0) model = fit(mem.training_set(), hyper);
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

  // Bootstrap hyperparameters from the seed particles when they exist.
  if (mem.size() >= 2) run_ard(0);
  refit();

  BaseQTable table;
  table.alpha = cfg.alpha;
  table.gamma = cfg.gamma;
  const int n_primitives = env.action_model().primitive_count();
  const int step_cap = cfg.step_cap > 0 ? cfg.step_cap : env.default_max_steps();

  long global_t = 0;
  long last_ard = 0;
  double period = cfg.ard_period;

  const auto evaluate_here = [&](const Eigen::VectorXd& s) {
    return evaluate_with(
        s, n_primitives, [&](int i) { return env.candidate_action(i, policy_rng); },
        model.has_value() ? &*model : nullptr);
  };

  for (int ep = 0; ep < cfg.episode_cap; ++ep) {
    const double temperature = cfg.temperature.at_episode(ep);
    Eigen::VectorXd s = env.reset(env_rng);

    int a = softmax_sample(fitness_vector(evaluate_here(s)), temperature,
                           policy_rng)
                .index;

    EpisodeRow row;
    row.episode = ep;
    for (int step = 0; step < step_cap; ++step) {
      // ARD cadence counts state transitions, not episodes.
      if (global_t - last_ard >= static_cast<long>(period)) {
        run_ard(global_t);
        last_ard = global_t;
        period += cfg.ard_growth;
        if (cfg.ard_period_cap > 0)
          period = std::min(period, static_cast<double>(cfg.ard_period_cap));
      }

      const StepOutcome outcome = env.step(s, a, env_rng);
      ++global_t;
      ++row.steps;
      row.total_reward += outcome.reward;
      row.hit_obstacle = row.hit_obstacle || outcome.hit_obstacle;

      const int s_part = geometry.partition_of(s);
      const int s2_part = geometry.partition_of(outcome.next_state);

      int a2 = -1;
      if (!outcome.terminal)
        a2 = softmax_sample(fitness_vector(evaluate_here(outcome.next_state)),
                            temperature, policy_rng)
                 .index;

      const auto [q_new, td] = table.update(
          s_part, a, outcome.reward, s2_part, std::max(a2, 0), outcome.terminal);

      // The particle carries the TD of this exact transition and the
      // executed action vector.
      ExperienceParticle particle;
      particle.aug = AugmentedState(s, outcome.executed_action);
      particle.fitness = q_new;
      particle.td = td;
      particle.birth_step = global_t;
      if (mem.update(std::move(particle), hyper, cfg.tau)) refit();

      s = outcome.next_state;
      if (outcome.terminal) break;
      a = a2;
    }

    row.lml = model.has_value()
                  ? log_marginal_likelihood(*model)
                  : std::numeric_limits<double>::quiet_NaN();
    row.memory_size = mem.size();
    log.max_memory_size = std::max(log.max_memory_size, mem.size());
    log.episodes.push_back(row);
    if (cfg.snapshot_every > 0 && (ep + 1) % cfg.snapshot_every == 0)
      log.snapshots.emplace_back(ep, mem.snapshot());
  }

  log.final_memory = mem.snapshot();
  log.final_hyper = hyper;
  log.final_model = model;
  return log;
}

}  // namespace grl
