#include "grl/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "grl/errors.hpp"
#include "grl/field_plot.hpp"
#include "grl/summary.hpp"
#include "json.hpp"

namespace grl {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GridGeometry grid_override(const RunConfig& cfg, const Environment& env) {
  GridGeometry g;  // empty cells = use the environment default
  if (!cfg.memory_grid_cells.empty()) {
    g = env.default_geometry();
    g.cells = cfg.memory_grid_cells;
    g.validate();
  }
  return g;
}

RfSarsaConfig rf_config(const RunConfig& cfg) {
  RfSarsaConfig rc;
  rc.alpha = cfg.alpha;
  rc.gamma = cfg.gamma;
  rc.ard_period = cfg.ard_period;
  rc.ard_growth = cfg.ard_growth;
  rc.ard_period_cap = cfg.ard_period_cap;
  rc.temperature = cfg.temperature;
  rc.tau = cfg.tau;
  rc.episode_cap = cfg.episodes;
  rc.step_cap = cfg.step_cap;
  rc.ard.max_iters = cfg.ard_max_iters;
  rc.quota_pos = cfg.quota_pos;
  rc.quota_neg = cfg.quota_neg;
  rc.snapshot_every = cfg.snapshot_every;
  return rc;
}

GSarsaConfig g_config(const RunConfig& cfg) {
  GSarsaConfig gc;
  gc.alpha = cfg.alpha;
  gc.gamma = cfg.gamma;
  gc.cluster_count = cfg.cluster_count;
  gc.reform_period = cfg.ard_period;
  gc.reform_growth = cfg.ard_growth;
  gc.reform_cap = cfg.ard_period_cap > 0 ? cfg.ard_period_cap : 100;
  gc.temperature = cfg.temperature;
  gc.tau = cfg.tau;
  gc.episode_cap = cfg.episodes;
  gc.step_cap = cfg.step_cap;
  gc.ard.max_iters = cfg.ard_max_iters;
  gc.quota_pos = cfg.quota_pos;
  gc.quota_neg = cfg.quota_neg;
  gc.warmup_transitions = cfg.warmup_transitions;
  gc.knn = cfg.knn;
  gc.snapshot_every = cfg.snapshot_every;
  return gc;
}

void write_snapshot(const fs::path& path,
                    const std::vector<ExperienceParticle>& particles,
                    int state_dim, int action_dim) {
  std::ofstream out(path);
  save_particles(out, particles, state_dim, action_dim);
}

}  // namespace

void write_learning_curve_csv(std::ostream& os, const TrainingLog& log,
                              bool abstract_columns) {
  os << "episode,total_reward,steps,lml,memory_size";
  if (abstract_columns)
    os << ",abstract_chosen,resolved_primitive,in_context,cluster_count,"
          "reindex_events";
  os << "\n";
  for (const auto& row : log.episodes) {
    os << row.episode << ',' << fmt_double(row.total_reward) << ','
       << row.steps << ',' << fmt_double(row.lml) << ',' << row.memory_size;
    if (abstract_columns)
      os << ',' << row.abstract_chosen << ',' << row.resolved_primitive << ','
         << (row.in_context ? 1 : 0) << ',' << row.cluster_count << ','
         << row.reindex_events;
    os << "\n";
  }
}

TrainingLog run_baseline(TaskEnvironment& env, Algo baseline, int episodes,
                         std::uint64_t seed) {
  TrainingLog log;
  Rng root(seed);
  Rng env_rng = root.substream("env");
  Rng policy_rng = root.substream("policy");
  for (int ep = 0; ep < episodes; ++ep) {
    const Eigen::VectorXd task = env.reset(env_rng);
    const BaselineStep step =
        baseline == Algo::BaselineMatchmaker
            ? matchmaker_step(task.head<3>(), env.profiles(), env.world(),
                              env_rng)
            : random_step(task.head<3>(), env.profiles(), env.world(), env_rng);
    (void)policy_rng;
    EpisodeRow row;
    row.episode = ep;
    row.total_reward = step.reward;
    row.steps = 1;
    row.lml = std::numeric_limits<double>::quiet_NaN();
    row.memory_size = 0;
    row.resolved_primitive = step.server;
    log.episodes.push_back(row);
  }
  return log;
}

RunReport run(const RunConfig& cfg) {
  RunReport report;
  report.problems = validate_config(cfg);
  if (!report.problems.empty()) return report;
  report.out_dir = cfg.out_dir;

  fs::create_directories(cfg.out_dir);
  ordered_json summary;
  summary["config"] = {{"env", env_name(cfg.env)},
                       {"episodes", cfg.episodes},
                       {"window", 50}};

  for (const Algo algo : cfg.algos) {
    ordered_json per_algo = ordered_json::array();
    for (const std::uint64_t seed : cfg.seeds) {
      auto env = make_environment(cfg);
      const KernelHyperparameters h0 = make_kernel(cfg, *env);
      const std::string run_name =
          algo_name(algo) + "_" + env_name(cfg.env) + "_seed" +
          std::to_string(seed);
      const fs::path run_dir = fs::path(cfg.out_dir) / run_name;
      fs::create_directories(run_dir);

      TrainingLog log;
      GSarsaLog glog;
      bool abstract_columns = false;
      switch (algo) {
        case Algo::RfSarsa: {
          RfSarsaConfig rc = rf_config(cfg);
          rc.memory_geometry = grid_override(cfg, *env);
          log = run_rf_sarsa(*env, rc, h0, seed);
          break;
        }
        case Algo::GSarsa: {
          GSarsaConfig gc = g_config(cfg);
          gc.memory_geometry = grid_override(cfg, *env);
          glog = run_g_sarsa(*env, gc, h0, seed);
          log = static_cast<const TrainingLog&>(glog);
          abstract_columns = true;
          break;
        }
        case Algo::BaselineMatchmaker:
        case Algo::BaselineRandom: {
          auto* task_env = dynamic_cast<TaskEnvironment*>(env.get());
          if (task_env == nullptr)
            throw ConfigError("baselines need the task environment");
          log = run_baseline(*task_env, algo, cfg.episodes, seed);
          break;
        }
      }

      {
        std::ofstream out(run_dir / "learning_curve.csv");
        write_learning_curve_csv(out, log, abstract_columns);
      }
      const int sd = env->state_dim();
      const int ad = env->action_model().action_dim;
      if (!log.final_memory.empty())
        write_snapshot(run_dir / "memory_final.txt", log.final_memory, sd, ad);
      for (const auto& [ep, snap] : log.snapshots)
        write_snapshot(run_dir / ("memory_ep" + std::to_string(ep) + ".txt"),
                       snap, sd, ad);

      ordered_json run_summary;
      run_summary["algo"] = algo_name(algo);
      run_summary["seed"] = seed;
      std::vector<double> rewards;
      rewards.reserve(log.episodes.size());
      for (const auto& row : log.episodes) rewards.push_back(row.total_reward);
      if (!rewards.empty()) {
        const CurveSummary cs = summarize_curve(rewards);
        run_summary["final_window_median"] = cs.final_window_median;
        run_summary["final_window_iqr"] = cs.final_window_iqr;
        run_summary["convergence_episode"] = cs.convergence_episode;
        double mean = 0.0;
        const int w = std::min<int>(50, static_cast<int>(rewards.size()));
        for (int i = 0; i < w; ++i)
          mean += rewards[rewards.size() - static_cast<std::size_t>(w) +
                          static_cast<std::size_t>(i)];
        run_summary["final_window_mean"] = mean / w;
      }
      run_summary["max_memory_size"] = log.max_memory_size;

      if (auto* nav_env = dynamic_cast<NavEnvironment*>(env.get())) {
        const GprModel* model =
            log.final_model.has_value() ? &*log.final_model : nullptr;
        const FieldPlot plot = field_plot(model, env->action_model(),
                                          nav_env->world(),
                                          cfg.field_plot_resolution);
        {
          std::ofstream out(run_dir / "field_plot.csv");
          write_field_plot_csv(out, plot);
        }
        {
          std::ofstream out(run_dir / "field_plot.svg");
          out << field_plot_svg(plot, nav_env->world());
        }
        // Obstacle-adjacent arrow statistics for the summary.
        const NavWorld& world = nav_env->world();
        int adjacent = 0, into = 0, obstacle_hits_tail = 0;
        for (const auto& rec : plot.records) {
          const auto cell = world.cell_of(rec.x, rec.y);
          if (world.is_obstacle(cell)) continue;
          bool near = false;
          for (int dx = -1; dx <= 1 && !near; ++dx)
            for (int dy = -1; dy <= 1 && !near; ++dy)
              near = world.is_obstacle({cell.first + dx, cell.second + dy});
          if (!near) continue;
          ++adjacent;
          if (points_into_obstacle(rec, world)) ++into;
        }
        const int tail = std::min<int>(50, static_cast<int>(log.episodes.size()));
        for (std::size_t i = log.episodes.size() - static_cast<std::size_t>(tail);
             i < log.episodes.size(); ++i)
          if (log.episodes[i].hit_obstacle) ++obstacle_hits_tail;
        if (adjacent > 0) {
          run_summary["obstacle_adjacent_points"] = adjacent;
          run_summary["obstacle_adjacent_into_fraction"] =
              static_cast<double>(into) / adjacent;
        }
        if (tail > 0)
          run_summary["obstacle_hit_rate_final50"] =
              static_cast<double>(obstacle_hits_tail) / tail;
      }
      if (abstract_columns) {
        run_summary["reindex_count"] = glog.reindex_count;
        run_summary["beta"] = glog.final_beta;
      }
      per_algo.push_back(run_summary);
    }
    summary["runs"][algo_name(algo)] = per_algo;
  }

  std::ofstream out(fs::path(cfg.out_dir) / "summary.json");
  out << summary.dump(2) << "\n";
  report.ok = true;
  return report;
}

}  // namespace grl
