#include "grl/nav_world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "grl/errors.hpp"

namespace grl {

void NavWorld::validate() const {
  if (!(width > 0.0) || !(height > 0.0))
    throw ConfigError("nav world: extents must be positive");
  if (grid_x <= 0 || grid_y <= 0)
    throw ConfigError("nav world: grid counts must be positive");
  auto in_grid = [&](const std::pair<int, int>& c) {
    return c.first >= 0 && c.first < grid_x && c.second >= 0 &&
           c.second < grid_y;
  };
  if (!in_grid(start_cell) || !in_grid(goal_cell))
    throw ConfigError("nav world: start/goal outside the grid");
  if (start_cell == goal_cell)
    throw ConfigError("nav world: start and goal must differ");
  for (const auto& c : obstacle_cells) {
    if (!in_grid(c)) throw ConfigError("nav world: obstacle outside the grid");
    if (c == goal_cell) throw ConfigError("nav world: goal cell is an obstacle");
    if (c == start_cell)
      throw ConfigError("nav world: start cell is an obstacle");
  }
  if (!(step_reward < 0.0) || !(goal_reward > 0.0) || !(obstacle_reward < 0.0))
    throw ConfigError("nav world: rewards must satisfy step<0<goal, obstacle<0");
  if (max_steps <= 0) throw ConfigError("nav world: max_steps must be positive");
}

GridGeometry NavWorld::geometry() const {
  GridGeometry g;
  g.lo = Eigen::Vector2d(0.0, 0.0);
  g.hi = Eigen::Vector2d(width, height);
  g.cells = {grid_x, grid_y};
  return g;
}

std::pair<int, int> NavWorld::cell_of(double x, double y) const {
  const int cx = std::clamp(static_cast<int>(std::floor(x / cell_w())), 0,
                            grid_x - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(y / cell_h())), 0,
                            grid_y - 1);
  return {cx, cy};
}

Eigen::Vector2d NavWorld::sample_start(Rng& rng) const {
  const double x = (start_cell.first + rng.uniform()) * cell_w();
  const double y = (start_cell.second + rng.uniform()) * cell_h();
  return {x, y};
}

NavStepResult nav_step(const Eigen::Vector2d& pos, const Eigen::Vector2d& x_a,
                       const NavWorld& world) {
  NavStepResult result{pos, world.step_reward, false, false, false};
  const double dr = x_a[0];
  const double phi = x_a[1];
  if (dr <= 0.0) return result;  // identity move, step cost still applies

  const Eigen::Vector2d dir(std::cos(phi), std::sin(phi));

  // Fraction of the ray that stays inside the world.
  double t_stop = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    const double d = dr * dir[axis];
    const double bound = axis == 0 ? world.width : world.height;
    if (d > 0.0) t_stop = std::min(t_stop, (bound - pos[axis]) / d);
    if (d < 0.0) t_stop = std::min(t_stop, (0.0 - pos[axis]) / d);
  }
  t_stop = std::max(0.0, t_stop);

  // Grid-line crossings within the clipped ray, in traversal order.
  std::vector<double> ts{0.0};
  for (int axis = 0; axis < 2; ++axis) {
    const double d = dr * dir[axis];
    if (d == 0.0) continue;
    const double cw = axis == 0 ? world.cell_w() : world.cell_h();
    const int n = axis == 0 ? world.grid_x : world.grid_y;
    for (int k = 1; k < n; ++k) {
      const double t = (k * cw - pos[axis]) / d;
      if (t > 0.0 && t < t_stop) ts.push_back(t);
    }
  }
  ts.push_back(t_stop);
  std::sort(ts.begin(), ts.end());

  // Round-off on clipped rays can land epsilon outside; clamp exactly.
  auto point_at = [&](double t) -> Eigen::Vector2d {
    Eigen::Vector2d p = pos + t * dr * dir;
    p[0] = std::clamp(p[0], 0.0, world.width);
    p[1] = std::clamp(p[1], 0.0, world.height);
    return p;
  };

  // Walk the entered cells in order; cell membership is sampled at segment
  // midpoints, which keeps boundary ties out of the classification.
  for (std::size_t s = 1; s < ts.size(); ++s) {
    const double t0 = ts[s - 1];
    const double t1 = ts[s];
    if (t1 - t0 <= 0.0) continue;
    const Eigen::Vector2d mid = point_at(0.5 * (t0 + t1));
    const auto cell = world.cell_of(mid[0], mid[1]);
    if (s == 1) continue;  // the segment the agent starts in
    if (world.is_obstacle(cell)) {
      result.position = point_at(t0);  // stop at the boundary crossing
      result.reward += world.obstacle_reward;
      result.terminal = true;
      result.hit_obstacle = true;
      return result;
    }
    if (cell == world.goal_cell) {
      result.position = point_at(t0);
      result.reward += world.goal_reward;
      result.terminal = true;
      result.reached_goal = true;
      return result;
    }
  }

  result.position = point_at(t_stop);
  return result;
}

NavWorld nav_5x5() {
  NavWorld w;
  w.width = 5.0;
  w.height = 5.0;
  w.grid_x = 5;
  w.grid_y = 5;
  w.start_cell = {0, 0};
  w.goal_cell = {4, 4};
  w.validate();
  return w;
}

NavWorld nav_7x5() {
  NavWorld w;
  w.width = 7.0;
  w.height = 5.0;
  w.grid_x = 7;
  w.grid_y = 5;
  w.start_cell = {0, 2};
  w.goal_cell = {6, 2};
  w.obstacle_cells = {{3, 2}, {4, 2}};
  w.validate();
  return w;
}

NavWorld nav_9x9() {
  NavWorld w;
  w.width = 9.0;
  w.height = 9.0;
  w.grid_x = 9;
  w.grid_y = 9;
  w.start_cell = {0, 0};
  w.goal_cell = {8, 8};
  w.obstacle_cells = {{2, 7}, {2, 6}, {2, 5}, {5, 7}, {5, 6}, {5, 5}, {6, 5},
                      {0, 3}, {1, 3}, {4, 3}, {4, 2}, {3, 1}, {4, 1}};
  w.max_steps = 250;
  w.validate();
  return w;
}

bool nav_path_exists(const NavWorld& world) {
  std::deque<std::pair<int, int>> frontier{world.start_cell};
  std::set<std::pair<int, int>> seen{world.start_cell};
  while (!frontier.empty()) {
    const auto [x, y] = frontier.front();
    frontier.pop_front();
    if (std::pair<int, int>{x, y} == world.goal_cell) return true;
    const std::pair<int, int> next[] = {{x + 1, y}, {x - 1, y}, {x, y + 1},
                                        {x, y - 1}};
    for (const auto& c : next) {
      if (c.first < 0 || c.first >= world.grid_x || c.second < 0 ||
          c.second >= world.grid_y)
        continue;
      if (world.is_obstacle(c) || seen.count(c)) continue;
      seen.insert(c);
      frontier.push_back(c);
    }
  }
  return false;
}

}  // namespace grl
