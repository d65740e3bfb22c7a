#ifndef GRL_ENVIRONMENT_HPP
#define GRL_ENVIRONMENT_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "grl/action_model.hpp"
#include "grl/nav_world.hpp"
#include "grl/particle_memory.hpp"
#include "grl/rng.hpp"
#include "grl/task_world.hpp"

namespace grl {

struct StepOutcome {
  Eigen::VectorXd next_state;
  Eigen::VectorXd executed_action;  // the realized action vector
  double reward = 0.0;
  bool terminal = false;
  bool hit_obstacle = false;
};

// Uniform face of the two benchmark domains for the learners.  Candidate
// vectors are hypothetical realizations used by the fitness evaluation; the
// action's stochastic effects resolve again when the operator acts, so
// step() draws the executed vector itself and reports it (an agent cannot
// foresee its own actuator noise).  The task world's profiles are advertised
// per tick, so there candidates and executions coincide within an episode.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int state_dim() const = 0;
  virtual const ParametricActionModel& action_model() const = 0;
  virtual GridGeometry default_geometry() const = 0;
  virtual int default_max_steps() const = 0;
  virtual Eigen::VectorXd reset(Rng& env_rng) = 0;
  virtual Eigen::VectorXd candidate_action(int primitive, Rng& rng) = 0;
  virtual StepOutcome step(const Eigen::VectorXd& state, int primitive,
                           Rng& env_rng) = 0;
};

class NavEnvironment : public Environment {
 public:
  NavEnvironment(NavWorld world, ParametricActionModel model)
      : world_(std::move(world)), model_(std::move(model)) {
    world_.validate();
    model_.validate();
  }

  int state_dim() const override { return 2; }
  const ParametricActionModel& action_model() const override { return model_; }
  GridGeometry default_geometry() const override { return world_.geometry(); }
  int default_max_steps() const override { return world_.max_steps; }
  const NavWorld& world() const { return world_; }

  Eigen::VectorXd reset(Rng& env_rng) override {
    return world_.sample_start(env_rng);
  }

  Eigen::VectorXd candidate_action(int primitive, Rng& rng) override {
    return sample_action(primitive, model_, rng);
  }

  StepOutcome step(const Eigen::VectorXd& state, int primitive,
                   Rng& env_rng) override {
    const Eigen::VectorXd x_a = sample_action(primitive, model_, env_rng);
    const NavStepResult r = nav_step(state.head<2>(), x_a.head<2>(), world_);
    return {r.position, x_a, r.reward, r.terminal, r.hit_obstacle};
  }

 private:
  NavWorld world_;
  ParametricActionModel model_;
};

// One-step episodes: each reset() delivers a fresh task and re-draws the
// server profiles; every assignment terminates the episode.
class TaskEnvironment : public Environment {
 public:
  explicit TaskEnvironment(TaskServerWorld world)
      : world_(std::move(world)), model_(world_.action_model()) {
    world_.validate();
  }

  int state_dim() const override { return 3; }
  const ParametricActionModel& action_model() const override { return model_; }
  GridGeometry default_geometry() const override { return world_.geometry(); }
  int default_max_steps() const override { return 1; }
  const TaskServerWorld& world() const { return world_; }
  const std::vector<Eigen::VectorXd>& profiles() const { return profiles_; }

  Eigen::VectorXd reset(Rng& env_rng) override {
    profiles_ = world_.server_tick(env_rng);
    return world_.task_arrival(env_rng);
  }

  Eigen::VectorXd candidate_action(int primitive, Rng& /*rng*/) override {
    return profiles_.at(static_cast<std::size_t>(primitive));
  }

  StepOutcome step(const Eigen::VectorXd& state, int primitive,
                   Rng& env_rng) override {
    // Commit the advertised snapshot of the chosen server.
    const Eigen::VectorXd x_a = profiles_.at(static_cast<std::size_t>(primitive));
    const double r = assign_task(state.head<3>(), x_a, world_, env_rng);
    // The successor task is independent of the assignment.
    return {state, x_a, r, true, false};
  }

 private:
  TaskServerWorld world_;
  ParametricActionModel model_;
  std::vector<Eigen::VectorXd> profiles_;
};

}  // namespace grl

#endif
