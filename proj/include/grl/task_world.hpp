#ifndef GRL_TASK_WORLD_HPP
#define GRL_TASK_WORLD_HPP

#include <Eigen/Dense>
#include <vector>

#include "grl/action_model.hpp"
#include "grl/particle_memory.hpp"
#include "grl/rng.hpp"

namespace grl {

// Task-assignment benchmark: a stream of typed tasks is matched against a
// roster of servers with time-varying resource profiles.  State is the 3-D
// task vector (type, size, expected runtime); the action is the 6-D server
// snapshot (service type, %cpu time, memory, disk, cpu speed, job slots).
// Each assignment is a one-step episode.

// Drifting server features in action-vector order after service_type.
enum TaskActionCoord {
  kServiceType = 0,
  kPctCpu = 1,
  kMemory = 2,
  kDisk = 3,
  kCpuSpeed = 4,
  kJobSlots = 5,
};

struct ServerSpec {
  int service_type = 1;  // time-invariant requirement statement
  // target / lo / hi / sigma per drifting feature
  CoordinateSpec pct_cpu, memory, disk, cpu_speed, job_slots;
};

struct TaskServerWorld {
  std::vector<ServerSpec> servers;
  int task_types = 3;
  double task_size_sigma = 0.15;     // size ~ type + N(0, sigma)
  double task_runtime_sigma = 0.05;  // runtime ~ type * (1 + N(0, sigma))
  double availability = 0.8;         // per-assignment Bernoulli success
  double success_base = 100.0;
  double success_bonus = 40.0;
  double failure_reward = -50.0;
  double memory_norm = 8.0;     // headroom normalizer
  double cpu_speed_lo = 1.0;    // cpu-speed percentile range
  double cpu_speed_hi = 4.0;

  int server_count() const { return static_cast<int>(servers.size()); }
  void validate() const;  // throws ConfigError

  // The roster expressed as a parametric action model: one primitive per
  // server, coordinates in TaskActionCoord order.  service_type has zero
  // noise so its draw never varies.
  ParametricActionModel action_model() const;
  GridGeometry geometry() const;

  // Samples a task: type uniform over the configured types, size and
  // runtime drawn correlated with the type, frozen for the task's lifetime.
  Eigen::Vector3d task_arrival(Rng& rng) const;

  // One tick of the time-varying resource profiles: every drifting feature
  // takes a fresh clipped draw around its target; service_type is untouched.
  std::vector<Eigen::VectorXd> server_tick(Rng& rng) const;
};

// Reward for committing a task to a server snapshot.  Type mismatch,
// unavailability (one Bernoulli draw), or insufficient memory all pay the
// same failure reward; success pays base + bonus scaled by capacity
// headroom and cpu-speed percentile.
double assign_task(const Eigen::Vector3d& task, const Eigen::VectorXd& snapshot,
                   const TaskServerWorld& world, Rng& rng);

// The default 6-server roster: two servers per type, one resource-rich and
// one lean, pairwise disjoint in at least one coordinate.
TaskServerWorld task_default_world();

struct BaselineStep {
  int server = -1;
  double reward = 0.0;
  bool fallback = false;  // matchmaker found no type match
};

// Matchmaking baseline: uniform choice among type-matching servers
// (uniform over everything if no match exists, flagged).
BaselineStep matchmaker_step(const Eigen::Vector3d& task,
                             const std::vector<Eigen::VectorXd>& profiles,
                             const TaskServerWorld& world, Rng& rng);

// Uniform-random assignment baseline.
BaselineStep random_step(const Eigen::Vector3d& task,
                         const std::vector<Eigen::VectorXd>& profiles,
                         const TaskServerWorld& world, Rng& rng);

}  // namespace grl

#endif
