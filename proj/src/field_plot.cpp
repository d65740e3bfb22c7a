#include "grl/field_plot.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "grl/errors.hpp"

namespace grl {

FieldPlot field_plot(const GprModel* gpr, const ParametricActionModel& model,
                     const NavWorld& world, int resolution) {
  if (resolution <= 0) throw ConfigError("field_plot: resolution must be > 0");
  FieldPlot plot;
  plot.resolution = resolution;
  plot.degenerate = gpr == nullptr || gpr->empty();

  for (int cy = 0; cy < world.grid_y; ++cy)
    for (int cx = 0; cx < world.grid_x; ++cx)
      for (int iy = 0; iy < resolution; ++iy)
        for (int ix = 0; ix < resolution; ++ix) {
          FieldPlotRecord rec;
          rec.x = (cx + (ix + 0.5) / resolution) * world.cell_w();
          rec.y = (cy + (iy + 0.5) / resolution) * world.cell_h();
          const Eigen::Vector2d pos(rec.x, rec.y);
          int best = 0;
          double best_fit = -std::numeric_limits<double>::infinity();
          for (int p = 0; p < model.primitive_count(); ++p) {
            const double fit =
                plot.degenerate
                    ? 0.0
                    : predict_mean(*gpr, AugmentedState(
                                             pos, action_targets(p, model)));
            if (fit > best_fit) {
              best_fit = fit;
              best = p;
            }
          }
          const Eigen::Vector2d dir = clock_direction(best);
          rec.dir_x = dir[0];
          rec.dir_y = dir[1];
          rec.best_primitive = best;
          rec.fitness = plot.degenerate ? 0.0 : best_fit;
          plot.records.push_back(rec);
        }
  return plot;
}

bool points_into_obstacle(const FieldPlotRecord& rec, const NavWorld& world,
                          double probe_length) {
  const Eigen::Vector2d pos(rec.x, rec.y);
  const double phi = std::atan2(rec.dir_y, rec.dir_x);
  const NavStepResult r = nav_step(pos, Eigen::Vector2d(probe_length, phi),
                                   world);
  return r.hit_obstacle;
}

std::string field_plot_svg(const FieldPlot& plot, const NavWorld& world) {
  const double scale = 100.0;
  const double w = world.width * scale;
  const double h = world.height * scale;
  std::ostringstream svg;
  char buf[160];
  const auto emitf = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    svg << buf;
  };

  emitf(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.1f %.1f\" "
      "width=\"%.0f\" height=\"%.0f\">\n",
      w, h, w, h);
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Obstacles, goal, start.
  for (const auto& [cx, cy] : world.obstacle_cells)
    emitf("<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
          "fill=\"#9a9a9a\"/>\n",
          cx * world.cell_w() * scale,
          h - (cy + 1) * world.cell_h() * scale, world.cell_w() * scale,
          world.cell_h() * scale);
  emitf("<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
        "fill=\"#cdeccd\"/>\n",
        world.goal_cell.first * world.cell_w() * scale,
        h - (world.goal_cell.second + 1) * world.cell_h() * scale,
        world.cell_w() * scale, world.cell_h() * scale);
  emitf("<text x=\"%.1f\" y=\"%.1f\" font-size=\"24\">S</text>\n",
        (world.start_cell.first + 0.4) * world.cell_w() * scale,
        h - (world.start_cell.second + 0.4) * world.cell_h() * scale);

  // Grid lines.
  for (int gx = 0; gx <= world.grid_x; ++gx)
    emitf("<line x1=\"%.1f\" y1=\"0\" x2=\"%.1f\" y2=\"%.1f\" "
          "stroke=\"#d0d0d0\" stroke-width=\"1\"/>\n",
          gx * world.cell_w() * scale, gx * world.cell_w() * scale, h);
  for (int gy = 0; gy <= world.grid_y; ++gy)
    emitf("<line x1=\"0\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
          "stroke=\"#d0d0d0\" stroke-width=\"1\"/>\n",
          gy * world.cell_h() * scale, w, gy * world.cell_h() * scale);

  // Arrows scaled uniformly for legibility.
  const double arrow =
      0.35 * scale * std::min(world.cell_w(), world.cell_h()) /
      std::max(1, plot.resolution);
  for (const auto& rec : plot.records) {
    const double cx = rec.x * scale;
    const double cy = h - rec.y * scale;
    // Screen y grows downward.
    const double dx = rec.dir_x, dy = -rec.dir_y;
    const double x0 = cx - arrow * dx, y0 = cy - arrow * dy;
    const double x1 = cx + arrow * dx, y1 = cy + arrow * dy;
    emitf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
          "stroke=\"#1f4e99\" stroke-width=\"1.5\"/>\n",
          x0, y0, x1, y1);
    // Arrowhead: two back-strokes at +-30 degrees from the tip.
    const double bx = -dx, by = -dy;
    const double c30 = 0.866, s30 = 0.5;
    const double k = 0.45 * arrow;
    emitf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
          "stroke=\"#1f4e99\" stroke-width=\"1.5\"/>\n",
          x1, y1, x1 + k * (bx * c30 - by * s30), y1 + k * (bx * s30 + by * c30));
    emitf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
          "stroke=\"#1f4e99\" stroke-width=\"1.5\"/>\n",
          x1, y1, x1 + k * (bx * c30 + by * s30), y1 + k * (-bx * s30 + by * c30));
  }
  if (plot.degenerate)
    svg << "<text x=\"10\" y=\"24\" font-size=\"20\" fill=\"#b00\">"
           "degenerate: untrained model</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_field_plot_csv(std::ostream& os, const FieldPlot& plot) {
  os << "x,y,dir_x,dir_y,best_primitive,fitness\n";
  char buf[200];
  for (const auto& r : plot.records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%.17g\n", r.x,
                  r.y, r.dir_x, r.dir_y, r.best_primitive, r.fitness);
    os << buf;
  }
}

}  // namespace grl
