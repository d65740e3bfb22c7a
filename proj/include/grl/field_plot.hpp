#ifndef GRL_FIELD_PLOT_HPP
#define GRL_FIELD_PLOT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "grl/action_model.hpp"
#include "grl/gpr.hpp"
#include "grl/nav_world.hpp"

namespace grl {

// One test point of a reinforcement-field plot: the unit direction of the
// best-scoring primitive at that point.
struct FieldPlotRecord {
  double x = 0.0;
  double y = 0.0;
  double dir_x = 0.0;
  double dir_y = 0.0;
  int best_primitive = -1;
  double fitness = 0.0;
};

struct FieldPlot {
  std::vector<FieldPlotRecord> records;
  bool degenerate = false;  // no trained model: all fitness zero
  int resolution = 0;
};

// Evaluates every primitive at evenly spaced test points (resolution^2 per
// cell) with noiseless action targets and records the argmax direction.
FieldPlot field_plot(const GprModel* gpr, const ParametricActionModel& model,
                     const NavWorld& world, int resolution);

// Arrow rendering with uniform arrow scaling; directions only, not step sizes.
std::string field_plot_svg(const FieldPlot& plot, const NavWorld& world);

void write_field_plot_csv(std::ostream& os, const FieldPlot& plot);

// Does a unit-length move from (x, y) along the record's direction cross
// into an obstacle cell?  Used for obstacle-adjacency reporting.
bool points_into_obstacle(const FieldPlotRecord& rec, const NavWorld& world,
                          double probe_length = 1.0);

}  // namespace grl

#endif
