#include "grl/task_world.hpp"

#include <algorithm>
#include <cmath>

#include "grl/errors.hpp"

namespace grl {

namespace {

double clipped_draw(const CoordinateSpec& c, Rng& rng) {
  return std::clamp(c.target + c.noise_sigma * rng.normal(), c.lo, c.hi);
}

}  // namespace

void TaskServerWorld::validate() const {
  if (servers.empty()) throw ConfigError("task world: needs at least one server");
  if (task_types < 1) throw ConfigError("task world: task_types must be >= 1");
  if (availability < 0.0 || availability > 1.0)
    throw ConfigError("task world: availability must lie in [0, 1]");
  if (!(failure_reward < 0.0))
    throw ConfigError("task world: failure reward must be negative");
  for (const auto& s : servers)
    if (s.service_type < 1 || s.service_type > task_types)
      throw ConfigError("task world: service type outside the task type range");
  action_model().validate();
}

ParametricActionModel TaskServerWorld::action_model() const {
  ParametricActionModel model;
  model.action_dim = 6;
  model.yield_threshold = 0.95;
  for (const auto& s : servers) {
    PrimitiveSpec prim;
    const double t = static_cast<double>(s.service_type);
    prim.coords.push_back({t, t - 0.25, t + 0.25, 0.0, false});
    prim.coords.push_back(s.pct_cpu);
    prim.coords.push_back(s.memory);
    prim.coords.push_back(s.disk);
    prim.coords.push_back(s.cpu_speed);
    prim.coords.push_back(s.job_slots);
    model.primitives.push_back(std::move(prim));
  }
  return model;
}

GridGeometry TaskServerWorld::geometry() const {
  GridGeometry g;
  const double t = static_cast<double>(task_types);
  g.lo = Eigen::Vector3d(0.5, 0.0, 0.0);
  g.hi = Eigen::Vector3d(t + 0.5, t + 1.5, t + 1.5);
  g.cells = {task_types, 3, 3};
  return g;
}

Eigen::Vector3d TaskServerWorld::task_arrival(Rng& rng) const {
  const int type = 1 + rng.uniform_int(task_types);
  const double size = type + task_size_sigma * rng.normal();
  const double runtime = type * (1.0 + task_runtime_sigma * rng.normal());
  return {static_cast<double>(type), std::max(0.0, size),
          std::max(0.0, runtime)};
}

std::vector<Eigen::VectorXd> TaskServerWorld::server_tick(Rng& rng) const {
  std::vector<Eigen::VectorXd> profiles;
  profiles.reserve(servers.size());
  for (const auto& s : servers) {
    Eigen::VectorXd v(6);
    v[kServiceType] = static_cast<double>(s.service_type);
    v[kPctCpu] = clipped_draw(s.pct_cpu, rng);
    v[kMemory] = clipped_draw(s.memory, rng);
    v[kDisk] = clipped_draw(s.disk, rng);
    v[kCpuSpeed] = clipped_draw(s.cpu_speed, rng);
    v[kJobSlots] = clipped_draw(s.job_slots, rng);
    profiles.push_back(std::move(v));
  }
  return profiles;
}

double assign_task(const Eigen::Vector3d& task, const Eigen::VectorXd& snapshot,
                   const TaskServerWorld& world, Rng& rng) {
  const bool available = rng.uniform() < world.availability;
  const bool type_match =
      std::llround(task[0]) == std::llround(snapshot[kServiceType]);
  const bool capacity_ok = snapshot[kMemory] >= task[1];
  if (!type_match || !available || !capacity_ok) return world.failure_reward;
  const double headroom =
      std::clamp((snapshot[kMemory] - task[1]) / world.memory_norm, 0.0, 1.0);
  const double cpu = std::clamp((snapshot[kCpuSpeed] - world.cpu_speed_lo) /
                                    (world.cpu_speed_hi - world.cpu_speed_lo),
                                0.0, 1.0);
  return world.success_base + world.success_bonus * headroom * cpu;
}

TaskServerWorld task_default_world() {
  TaskServerWorld w;
  for (int type = 1; type <= 3; ++type) {
    // One resource-rich server per type...
    ServerSpec rich;
    rich.service_type = type;
    rich.pct_cpu = {12.0, 5.0, 18.0, 2.0, false};
    rich.memory = {6.0, 4.0, 8.0, 0.5, false};
    rich.disk = {30.0, 10.0, 50.0, 4.0, false};
    rich.cpu_speed = {3.2, 2.5, 3.9, 0.2, false};
    rich.job_slots = {10.0, 6.0, 14.0, 1.2, false};
    w.servers.push_back(rich);
    // ...and one lean server whose memory often falls short of larger tasks.
    ServerSpec lean;
    lean.service_type = type;
    lean.pct_cpu = {23.0, 19.0, 29.0, 2.0, false};
    lean.memory = {2.8, 1.5, 4.0, 0.4, false};
    lean.disk = {30.0, 10.0, 50.0, 4.0, false};
    lean.cpu_speed = {1.6, 1.0, 2.2, 0.15, false};
    lean.job_slots = {5.0, 2.0, 8.0, 1.0, false};
    w.servers.push_back(lean);
  }
  w.validate();
  return w;
}

BaselineStep matchmaker_step(const Eigen::Vector3d& task,
                             const std::vector<Eigen::VectorXd>& profiles,
                             const TaskServerWorld& world, Rng& rng) {
  std::vector<int> matches;
  for (int i = 0; i < world.server_count(); ++i)
    if (world.servers[static_cast<std::size_t>(i)].service_type ==
        std::llround(task[0]))
      matches.push_back(i);
  BaselineStep step;
  if (matches.empty()) {
    step.fallback = true;
    step.server = rng.uniform_int(world.server_count());
  } else {
    step.server = matches[static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(matches.size())))];
  }
  step.reward = assign_task(
      task, profiles[static_cast<std::size_t>(step.server)], world, rng);
  return step;
}

BaselineStep random_step(const Eigen::Vector3d& task,
                         const std::vector<Eigen::VectorXd>& profiles,
                         const TaskServerWorld& world, Rng& rng) {
  BaselineStep step;
  step.server = rng.uniform_int(world.server_count());
  step.reward = assign_task(
      task, profiles[static_cast<std::size_t>(step.server)], world, rng);
  return step;
}

}  // namespace grl
