#include <array>
#include <cmath>

#include "doctest.h"
#include "grl/environment.hpp"
#include "grl/errors.hpp"
#include "grl/g_sarsa.hpp"

using namespace grl;

namespace {

KernelHyperparameters task_kernel() {
  KernelHyperparameters h;
  h.state_dim = 3;
  h.action_dim = 6;
  h.signal_amplitude = 100.0;
  h.noise_scale = 1.0;
  h.length_scales.resize(9);
  h.length_scales << 0.25, 1.0, 1.0, 0.25, 50.0, 4.0, 64.0, 1.0, 16.0;
  return h;
}

KernelHyperparameters nav_kernel() {
  KernelHyperparameters h;
  h.state_dim = 2;
  h.action_dim = 2;
  h.signal_amplitude = 50.0;
  h.noise_scale = 1.0;
  h.length_scales.resize(4);
  h.length_scales << 1.0, 1.0, 0.1, 0.3;
  return h;
}

ExperienceParticle nav_particle(double x, double y, const Eigen::VectorXd& xa,
                                double fitness, double td, long birth,
                                int cluster) {
  ExperienceParticle p;
  p.aug = AugmentedState(Eigen::Vector2d(x, y), xa);
  p.fitness = fitness;
  p.td = td;
  p.birth_step = birth;
  p.cluster_id = cluster;
  return p;
}

}  // namespace

TEST_CASE("action_resolution greedy donor matching") {
  const auto model = make_clock_model();
  const auto h = nav_kernel();
  Rng rng(1);

  std::vector<ExperienceParticle> pool;
  const Eigen::VectorXd a3 = sample_action(2, model, rng);
  const Eigen::VectorXd a7 = sample_action(6, model, rng);
  pool.push_back(nav_particle(1.0, 1.0, a3, 5.0, 1.0, 1, 0));
  pool.push_back(nav_particle(3.0, 3.0, a7, 4.0, 1.0, 2, 0));
  pool.push_back(nav_particle(4.5, 4.5, a7, 4.0, 1.0, 3, 1));
  std::vector<const ExperienceParticle*> view;
  for (const auto& p : pool) view.push_back(&p);
  const auto clusters = cluster_members(view, 3);
  REQUIRE(clusters[0].size() == 2);
  REQUIRE(clusters[2].empty());

  // exact context match picks the matching donor with correlation 1
  const auto res = action_resolution(Eigen::Vector2d(1.0, 1.0), 0, clusters,
                                     model, h, 0.5);
  REQUIRE(res.in_context);
  CHECK(res.primitive == 2);
  CHECK(res.correlation == doctest::Approx(1.0));

  // empty cluster is out of context
  CHECK_FALSE(action_resolution(Eigen::Vector2d(1.0, 1.0), 2, clusters, model,
                                h, 0.5)
                  .in_context);

  // far query falls below tau everywhere — also out of context
  CHECK_FALSE(action_resolution(Eigen::Vector2d(-30.0, -30.0), 0, clusters,
                                model, h, 0.5)
                  .in_context);

  // agreement with a brute-force max-correlation scan
  Rng fuzz(2);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Vector2d q(fuzz.uniform(0, 5), fuzz.uniform(0, 5));
    const auto r = action_resolution(q, 0, clusters, model, h, 0.3);
    const ExperienceParticle* best = nullptr;
    double best_c = -1.0;
    for (const auto* p : clusters[0]) {
      const double c = correlation(make_hypothetical(q, *p), p->aug, h);
      if (c >= 0.3 && c > best_c) {
        best_c = c;
        best = p;
      }
    }
    CHECK(r.in_context == (best != nullptr));
    if (best != nullptr) {
      CHECK(r.donor == best);
      CHECK(r.primitive == resolve_primitive(best->aug.action_vec, model));
    }
  }
}

TEST_CASE("abstract_policy softmax over the abstract table") {
  AbstractActionSet aset(3);
  Rng rng(3);
  const auto uniform = abstract_policy(0, aset, 1.0, rng);
  for (int i = 0; i < 3; ++i)
    CHECK(uniform.probs[i] == doctest::Approx(1.0 / 3));

  aset.q_table.values[{0, 0}] = 1.0;
  aset.q_table.values[{0, 1}] = 0.0;
  aset.q_table.values[{0, 2}] = -1e9;
  const auto d = abstract_policy(0, aset, 1.0, rng);
  const double e = std::exp(1.0);
  CHECK(d.probs[0] == doctest::Approx(e / (e + 1.0)).epsilon(1e-6));

  // shift invariance
  for (int i = 0; i < 3; ++i) {
    auto& v = aset.q_table.values[{0, i}];
    v += 55.5;
  }
  const auto d2 = abstract_policy(0, aset, 1.0, rng);
  CHECK(d2.probs.isApprox(d.probs, 1e-9));
}

TEST_CASE("g_sarsa_update arithmetic and mirror") {
  AbstractActionSet aset(4);
  aset.q_table.alpha = 0.5;
  aset.q_table.gamma = 0.9;
  const auto r = g_sarsa_update(aset, 0, 1, 10.0, 2, 3, false);
  CHECK(r.td == doctest::Approx(10.0));
  CHECK(r.new_q == doctest::Approx(5.0));

  // fixed point
  const double fix = aset.q_table.get(0, 1) - 0.9 * aset.q_table.get(2, 3);
  const auto r2 = g_sarsa_update(aset, 0, 1, fix, 2, 3, false);
  CHECK(r2.td == doctest::Approx(0.0));

  // zero learning rate leaves the table untouched
  aset.q_table.alpha = 0.0;
  const double before = aset.q_table.get(0, 1);
  g_sarsa_update(aset, 0, 1, 99.0, 2, 3, true);
  CHECK(aset.q_table.get(0, 1) == doctest::Approx(before));
}

TEST_CASE("assign_cluster knn rules") {
  const auto model = make_clock_model();
  const auto h = nav_kernel();
  Rng rng(5);
  const Eigen::VectorXd a1 = sample_action(0, model, rng);

  std::vector<ExperienceParticle> pool;
  // cluster 0: three near-identical contexts around (1,1)
  pool.push_back(nav_particle(1.0, 1.0, a1, 1.0, 1.0, 1, 0));
  pool.push_back(nav_particle(1.1, 1.0, a1, 1.0, 1.0, 2, 0));
  pool.push_back(nav_particle(1.0, 1.1, a1, 1.0, 1.0, 3, 0));
  // cluster 1: far corner
  pool.push_back(nav_particle(4.5, 4.5, a1, 1.0, 1.0, 4, 1));
  std::vector<const ExperienceParticle*> view;
  for (const auto& p : pool) view.push_back(&p);

  SUBCASE("close particle joins the most correlated cluster") {
    auto clusters = cluster_members(view, 2);
    const auto p = nav_particle(1.05, 1.05, a1, 1.0, 1.0, 9, -1);
    CHECK(assign_cluster(p, clusters, h, 3, 0.5) == 0);
  }

  SUBCASE("below tau an empty cluster wins") {
    auto clusters = cluster_members(view, 3);  // cluster 2 exists but is empty
    const auto p = nav_particle(2.8, 2.8, a1, 1.0, 1.0, 9, -1);
    // verify the premise: best average is below tau
    double best_avg = 0.0;
    for (int c = 0; c < 2; ++c) {
      double avg = 0.0;
      for (const auto* m : clusters[static_cast<std::size_t>(c)])
        avg += correlation(p.aug, m->aug, h);
      avg /= static_cast<double>(clusters[static_cast<std::size_t>(c)].size());
      best_avg = std::max(best_avg, avg);
    }
    REQUIRE(best_avg < 0.5);
    CHECK(assign_cluster(p, clusters, h, 3, 0.5) == 2);
  }

  SUBCASE("below tau with no empties takes the best anyway") {
    auto clusters = cluster_members(view, 2);
    const auto p = nav_particle(2.4, 2.4, a1, 1.0, 1.0, 9, -1);
    const int c = assign_cluster(p, clusters, h, 3, 0.5);
    CHECK(c == 0);  // nearer to the (1,1) cloud than the corner
  }
}

TEST_CASE("out_of_context_fallback is uniform and feasible") {
  const auto model = make_clock_model();
  Rng rng(7);
  std::array<int, 12> freq{};
  for (int t = 0; t < 10000; ++t) {
    const auto fb = out_of_context_fallback(model, rng);
    REQUIRE(fb.primitive >= 0);
    REQUIRE(fb.primitive < 12);
    ++freq[static_cast<std::size_t>(fb.primitive)];
    CHECK(resolve_primitive(fb.action_vec, model) == fb.primitive);
  }
  for (const int c : freq)
    CHECK(std::abs(c / 10000.0 - 1.0 / 12.0) < 0.02);

  // beta bookkeeping contract
  AbstractActionSet aset(2);
  aset.record_selection(0, true);
  aset.record_selection(0, false);
  aset.record_selection(0, false);
  aset.record_selection(1, true);
  CHECK(aset.beta(0) == doctest::Approx(1.0 / 3));
  CHECK(aset.beta(1) == doctest::Approx(1.0));
}

TEST_CASE("g-sarsa smoke run on the task world") {
  GSarsaConfig cfg;
  cfg.episode_cap = 40;
  cfg.cluster_count = 4;
  cfg.warmup_transitions = 60;
  cfg.reform_period = 20;
  cfg.ard.max_iters = 2;

  TaskEnvironment env1(task_default_world());
  const GSarsaLog log1 = run_g_sarsa(env1, cfg, task_kernel(), 21);
  TaskEnvironment env2(task_default_world());
  const GSarsaLog log2 = run_g_sarsa(env2, cfg, task_kernel(), 21);

  REQUIRE(log1.episodes.size() == 40);
  for (std::size_t i = 0; i < log1.episodes.size(); ++i) {
    CHECK(log1.episodes[i].total_reward == log2.episodes[i].total_reward);
    CHECK(log1.episodes[i].abstract_chosen == log2.episodes[i].abstract_chosen);
    CHECK(log1.episodes[i].resolved_primitive ==
          log2.episodes[i].resolved_primitive);
  }

  // beta statistics reconstruct exactly from the log
  std::vector<long> selections(4, 0), successes(4, 0);
  for (const auto& row : log1.episodes) {
    if (row.abstract_chosen < 0) continue;
    ++selections[static_cast<std::size_t>(row.abstract_chosen)];
    if (row.in_context) ++successes[static_cast<std::size_t>(row.abstract_chosen)];
  }
  for (int c = 0; c < 4; ++c) {
    if (selections[static_cast<std::size_t>(c)] == 0) continue;
    CHECK(log1.final_beta[static_cast<std::size_t>(c)] ==
          doctest::Approx(static_cast<double>(successes[static_cast<std::size_t>(c)]) /
                          selections[static_cast<std::size_t>(c)]));
  }

  // every resolved primitive names a real server
  for (const auto& row : log1.episodes) {
    CHECK(row.resolved_primitive >= 0);
    CHECK(row.resolved_primitive < 6);
  }

  // reformulation preserves particle count and clusters stay in range
  for (const int c : log1.final_cluster_ids) {
    CHECK(c >= 0);
    CHECK(c < 4);
  }
  CHECK(log1.reindex_count >= 1);
}

TEST_CASE("g-sarsa runs on the navigation world too") {
  GSarsaConfig cfg;
  cfg.episode_cap = 6;
  cfg.step_cap = 25;
  cfg.cluster_count = 3;
  cfg.warmup_transitions = 40;
  cfg.reform_period = 30;
  cfg.ard.max_iters = 2;

  NavEnvironment env(nav_5x5(), make_clock_model());
  const GSarsaLog log = run_g_sarsa(env, cfg, nav_kernel(), 31);
  CHECK(log.episodes.size() == 6);
  CHECK(log.max_memory_size <= 150);
}
