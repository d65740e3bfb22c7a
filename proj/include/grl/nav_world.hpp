#ifndef GRL_NAV_WORLD_HPP
#define GRL_NAV_WORLD_HPP

#include <Eigen/Dense>
#include <set>
#include <utility>
#include <vector>

#include "grl/particle_memory.hpp"
#include "grl/rng.hpp"

namespace grl {

// 2D navigation benchmark: continuous positions over a grid-partitioned
// rectangle, clock-direction moves of roughly unit length, border clamping,
// and terminally rewarded goal/obstacle cells.
struct NavWorld {
  double width = 5.0;
  double height = 5.0;
  int grid_x = 5;
  int grid_y = 5;
  std::pair<int, int> start_cell{0, 0};
  std::pair<int, int> goal_cell{4, 4};
  std::set<std::pair<int, int>> obstacle_cells;
  double step_reward = -1.0;
  double goal_reward = 100.0;
  double obstacle_reward = -100.0;
  int max_steps = 150;

  void validate() const;  // throws ConfigError
  GridGeometry geometry() const;
  double cell_w() const { return width / grid_x; }
  double cell_h() const { return height / grid_y; }
  std::pair<int, int> cell_of(double x, double y) const;
  bool is_obstacle(const std::pair<int, int>& cell) const {
    return obstacle_cells.count(cell) > 0;
  }
  // Uniform position within the start cell.
  Eigen::Vector2d sample_start(Rng& rng) const;
};

struct NavStepResult {
  Eigen::Vector2d position;
  double reward;
  bool terminal;
  bool hit_obstacle;
  bool reached_goal;
};

// Executes one resolved move (dr, phi).  The motion ray is clipped at the
// world border; the first entry into the goal cell terminates with the goal
// bonus and the first contact with an obstacle cell stops at the crossing
// point and terminates with the obstacle penalty.  Every step also pays the
// per-step cost.
NavStepResult nav_step(const Eigen::Vector2d& pos, const Eigen::Vector2d& x_a,
                       const NavWorld& world);

// The benchmark layouts: 5x5 open, 7x5 with two center obstacle cells, and
// a 9x9 layout with obstacles scattered across the space.
NavWorld nav_5x5();
NavWorld nav_7x5();
NavWorld nav_9x9();

// Start-to-goal reachability through non-obstacle cells (4-neighborhood).
bool nav_path_exists(const NavWorld& world);

}  // namespace grl

#endif
