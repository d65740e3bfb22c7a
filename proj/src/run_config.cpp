#include "grl/run_config.hpp"

#include <fstream>
#include <sstream>

#include "grl/errors.hpp"
#include "json.hpp"

namespace grl {

using nlohmann::json;

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::RfSarsa: return "rf_sarsa";
    case Algo::GSarsa: return "g_sarsa";
    case Algo::BaselineMatchmaker: return "baseline_matchmaker";
    case Algo::BaselineRandom: return "baseline_random";
  }
  return "?";
}

std::string env_name(EnvKind e) {
  switch (e) {
    case EnvKind::Nav5x5: return "nav_5x5";
    case EnvKind::Nav7x5: return "nav_7x5";
    case EnvKind::Nav9x9: return "nav_9x9";
    case EnvKind::TaskAssign: return "task_assign";
    case EnvKind::CustomFile: return "custom";
  }
  return "?";
}

namespace {

Algo parse_algo(const std::string& s) {
  if (s == "rf_sarsa") return Algo::RfSarsa;
  if (s == "g_sarsa") return Algo::GSarsa;
  if (s == "baseline_matchmaker") return Algo::BaselineMatchmaker;
  if (s == "baseline_random") return Algo::BaselineRandom;
  throw ConfigError("config: unknown algo '" + s + "'");
}

EnvKind parse_env(const std::string& s) {
  if (s == "nav_5x5") return EnvKind::Nav5x5;
  if (s == "nav_7x5") return EnvKind::Nav7x5;
  if (s == "nav_9x9") return EnvKind::Nav9x9;
  if (s == "task_assign") return EnvKind::TaskAssign;
  if (s == "custom") return EnvKind::CustomFile;
  throw ConfigError("config: unknown env '" + s + "'");
}

NavWorld nav_world_from_json(const json& j) {
  NavWorld w;
  w.width = j.value("width", w.width);
  w.height = j.value("height", w.height);
  if (j.contains("grid")) {
    w.grid_x = j["grid"].at(0).get<int>();
    w.grid_y = j["grid"].at(1).get<int>();
  }
  if (j.contains("start"))
    w.start_cell = {j["start"].at(0).get<int>(), j["start"].at(1).get<int>()};
  if (j.contains("goal"))
    w.goal_cell = {j["goal"].at(0).get<int>(), j["goal"].at(1).get<int>()};
  if (j.contains("obstacles"))
    for (const auto& c : j["obstacles"])
      w.obstacle_cells.insert({c.at(0).get<int>(), c.at(1).get<int>()});
  if (j.contains("rewards")) {
    const auto& r = j["rewards"];
    w.step_reward = r.value("step", w.step_reward);
    w.goal_reward = r.value("goal", w.goal_reward);
    w.obstacle_reward = r.value("obstacle", w.obstacle_reward);
  }
  w.max_steps = j.value("max_steps", w.max_steps);
  return w;
}

CoordinateSpec coord_from_json(const json& j) {
  CoordinateSpec c;
  c.target = j.at("target").get<double>();
  c.lo = j.at("lo").get<double>();
  c.hi = j.at("hi").get<double>();
  c.noise_sigma = j.value("sigma", 0.0);
  c.wraps = j.value("wraps", false);
  return c;
}

TaskServerWorld task_world_from_json(const json& j) {
  TaskServerWorld w = task_default_world();
  if (j.contains("servers")) {
    w.servers.clear();
    for (const auto& s : j["servers"]) {
      ServerSpec spec;
      spec.service_type = s.at("service_type").get<int>();
      spec.pct_cpu = coord_from_json(s.at("pct_cpu"));
      spec.memory = coord_from_json(s.at("memory"));
      spec.disk = coord_from_json(s.at("disk"));
      spec.cpu_speed = coord_from_json(s.at("cpu_speed"));
      spec.job_slots = coord_from_json(s.at("job_slots"));
      w.servers.push_back(spec);
    }
  }
  w.task_types = j.value("task_types", w.task_types);
  w.availability = j.value("availability", w.availability);
  if (j.contains("rewards")) {
    const auto& r = j["rewards"];
    w.success_base = r.value("success_base", w.success_base);
    w.success_bonus = r.value("success_bonus", w.success_bonus);
    w.failure_reward = r.value("failure", w.failure_reward);
  }
  return w;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }

  RunConfig cfg;
  try {
    if (j.contains("algo")) {
      cfg.algos.clear();
      if (j["algo"].is_array())
        for (const auto& a : j["algo"]) cfg.algos.push_back(parse_algo(a));
      else
        cfg.algos.push_back(parse_algo(j["algo"]));
    }
    if (j.contains("env")) cfg.env = parse_env(j["env"]);
    cfg.env_file = j.value("env_file", cfg.env_file);
    if (j.contains("seeds")) {
      cfg.seeds.clear();
      for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
    } else if (j.contains("seed")) {
      cfg.seeds = {j["seed"].get<std::uint64_t>()};
    }
    cfg.episodes = j.value("episodes", cfg.episodes);
    cfg.step_cap = j.value("step_cap", cfg.step_cap);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.gamma = j.value("gamma", cfg.gamma);

    if (j.contains("kernel")) {
      const auto& k = j["kernel"];
      const std::string kind = k.value("kind", "se_joint");
      if (kind == "se_joint")
        cfg.kernel_kind = KernelKind::SquaredExponentialJoint;
      else if (kind == "product")
        cfg.kernel_kind = KernelKind::ProductStateAction;
      else
        throw ConfigError("config: unknown kernel kind '" + kind + "'");
      cfg.signal_amplitude = k.value("signal_amplitude", cfg.signal_amplitude);
      cfg.noise_scale = k.value("noise_scale", cfg.noise_scale);
      if (k.contains("length_scales"))
        cfg.length_scales = k["length_scales"].get<std::vector<double>>();
    }

    if (j.contains("action_model")) {
      const auto& a = j["action_model"];
      cfg.dr_target = a.value("dr_target", cfg.dr_target);
      cfg.dr_lo = a.value("dr_lo", cfg.dr_lo);
      cfg.dr_hi = a.value("dr_hi", cfg.dr_hi);
      cfg.dr_sigma = a.value("dr_sigma", cfg.dr_sigma);
      cfg.angle_sigma = a.value("angle_sigma", cfg.angle_sigma);
      cfg.eta = a.value("eta", cfg.eta);
    }

    if (j.contains("memory")) {
      const auto& m = j["memory"];
      cfg.quota_pos = m.value("quota_pos", cfg.quota_pos);
      cfg.quota_neg = m.value("quota_neg", cfg.quota_neg);
      cfg.tau = m.value("tau", cfg.tau);
      if (m.contains("grid_cells"))
        cfg.memory_grid_cells = m["grid_cells"].get<std::vector<int>>();
    }

    if (j.contains("schedule")) {
      const auto& s = j["schedule"];
      cfg.temperature.start = s.value("temperature_start", cfg.temperature.start);
      cfg.temperature.decay = s.value("temperature_decay", cfg.temperature.decay);
      cfg.temperature.floor = s.value("temperature_floor", cfg.temperature.floor);
      cfg.ard_period = s.value("ard_period", cfg.ard_period);
      cfg.ard_growth = s.value("ard_growth", cfg.ard_growth);
      cfg.ard_period_cap = s.value("ard_period_cap", cfg.ard_period_cap);
      cfg.ard_max_iters = s.value("ard_max_iters", cfg.ard_max_iters);
      cfg.cluster_count = s.value("cluster_count", cfg.cluster_count);
      cfg.warmup_transitions = s.value("warmup_transitions", cfg.warmup_transitions);
      cfg.knn = s.value("knn", cfg.knn);
    }

    cfg.snapshot_every = j.value("snapshot_every", cfg.snapshot_every);
    cfg.field_plot_resolution =
        j.value("field_plot_resolution", cfg.field_plot_resolution);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::unique_ptr<Environment> make_environment(const RunConfig& cfg) {
  const auto nav = [&](NavWorld w) {
    return std::make_unique<NavEnvironment>(
        std::move(w), make_clock_model(cfg.dr_target, cfg.dr_lo, cfg.dr_hi,
                                       cfg.dr_sigma, cfg.angle_sigma, cfg.eta));
  };
  switch (cfg.env) {
    case EnvKind::Nav5x5: return nav(nav_5x5());
    case EnvKind::Nav7x5: return nav(nav_7x5());
    case EnvKind::Nav9x9: return nav(nav_9x9());
    case EnvKind::TaskAssign:
      return std::make_unique<TaskEnvironment>(task_default_world());
    case EnvKind::CustomFile: {
      std::ifstream in(cfg.env_file);
      if (!in) throw ConfigError("config: cannot open env_file '" + cfg.env_file + "'");
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("env_file: JSON parse error: ") + e.what());
      }
      const std::string type = j.value("type", "nav");
      if (type == "nav") return nav(nav_world_from_json(j));
      if (type == "task")
        return std::make_unique<TaskEnvironment>(task_world_from_json(j));
      throw ConfigError("env_file: unknown type '" + type + "'");
    }
  }
  throw ConfigError("config: unknown environment");
}

KernelHyperparameters make_kernel(const RunConfig& cfg, const Environment& env) {
  KernelHyperparameters h;
  h.kind = cfg.kernel_kind;
  h.state_dim = env.state_dim();
  h.action_dim = env.action_model().action_dim;
  h.signal_amplitude = cfg.signal_amplitude;
  h.noise_scale = cfg.noise_scale;
  if (!cfg.length_scales.empty()) {
    h.length_scales = Eigen::Map<const Eigen::VectorXd>(
        cfg.length_scales.data(),
        static_cast<Eigen::Index>(cfg.length_scales.size()));
  } else if (h.joint_dim() == 4) {
    // Navigation default: unit state scales, tight radius, moderate angle.
    h.length_scales.resize(4);
    h.length_scales << 1.0, 1.0, 0.1, 0.3;
  } else if (h.joint_dim() == 9) {
    // Task-assignment default, one entry per (task, server) coordinate.
    h.length_scales.resize(9);
    h.length_scales << 0.25, 1.0, 1.0, 0.25, 50.0, 4.0, 64.0, 1.0, 16.0;
  } else {
    h.length_scales = Eigen::VectorXd::Ones(h.joint_dim());
  }
  return h;
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  const auto check = [&](const auto& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      problems.emplace_back(e.what());
    }
  };

  std::unique_ptr<Environment> env;
  check([&] { env = make_environment(cfg); });
  if (!env) return problems;

  check([&] { make_kernel(cfg, *env).validate(); });
  check([&] { env->action_model().validate(); });
  check([&] {
    GridGeometry g = env->default_geometry();
    if (!cfg.memory_grid_cells.empty()) g.cells = cfg.memory_grid_cells;
    MemoryConfig mc{g, cfg.quota_pos, cfg.quota_neg};
    mc.validate();
  });
  if (cfg.algos.empty()) problems.emplace_back("config: no algorithms listed");
  if (cfg.seeds.empty()) problems.emplace_back("config: no seeds listed");
  if (cfg.episodes <= 0) problems.emplace_back("config: episodes must be > 0");
  if (!(cfg.tau > 0.0 && cfg.tau < 1.0))
    problems.emplace_back("config: tau must lie in (0, 1)");
  if (!(cfg.temperature.floor > 0.0))
    problems.emplace_back("config: temperature floor must be > 0");
  if (cfg.ard_period < 1) problems.emplace_back("config: ard_period must be >= 1");
  for (const Algo a : cfg.algos) {
    if (a == Algo::GSarsa && cfg.cluster_count < 2)
      problems.emplace_back("config: g_sarsa needs cluster_count >= 2");
    if ((a == Algo::BaselineMatchmaker || a == Algo::BaselineRandom) &&
        cfg.env != EnvKind::TaskAssign && dynamic_cast<TaskEnvironment*>(env.get()) == nullptr)
      problems.emplace_back("config: baselines only run on the task environment");
  }
  return problems;
}

}  // namespace grl
