#ifndef GRL_ACTION_MODEL_HPP
#define GRL_ACTION_MODEL_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "grl/rng.hpp"

namespace grl {

// One coordinate of a parametric action: a nominal target value, a closed
// feasible support, and the spread of the Gaussian variation superimposed on
// the target.  Angular coordinates are compared modulo 2pi.
struct CoordinateSpec {
  double target = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  double noise_sigma = 0.0;
  bool wraps = false;

  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  double width() const { return hi - lo; }
  // Whether value lies in the support (modulo 2pi for wrapping coordinates).
  bool contains(double value) const;
  // Distance to the support, 0 inside, wrapped for angular coordinates.
  double distance(double value) const;
};

struct PrimitiveSpec {
  std::vector<CoordinateSpec> coords;
};

// A primitive action set expressed through shared action parameters.
// Feasible supports of distinct primitives must be disjoint in at least one
// coordinate so that classification back to a primitive is well-defined.
struct ParametricActionModel {
  std::vector<PrimitiveSpec> primitives;
  double yield_threshold = 0.95;  // eta
  int action_dim = 0;

  int primitive_count() const { return static_cast<int>(primitives.size()); }
  void validate() const;  // throws ConfigError
};

// P(value + w lands in the support), w ~ N(0, sigma^2).
double yield_prob(double value, const CoordinateSpec& c);

// f_A+: resolve a primitive into an action vector.  Each coordinate draws
// target + Gaussian noise, rejection-resampled until feasible (at most 32
// retries, then clamped to the nearest support endpoint), so the output
// always lies in the primitive's feasible region.
Eigen::VectorXd sample_action(int primitive_index,
                              const ParametricActionModel& model, Rng& rng);

// Noise-free coordinate targets of a primitive (used for field plots).
Eigen::VectorXd action_targets(int primitive_index,
                               const ParametricActionModel& model);

// f_A: classify an action vector back to a primitive.  Returns the unique
// primitive whose feasible region contains the vector; on boundaries the
// lowest index wins, and an infeasible vector maps to the primitive with the
// smallest per-coordinate support distance normalized by support width.
int resolve_primitive(const Eigen::VectorXd& x_a,
                      const ParametricActionModel& model);

// Environment-provided state-transition rule for a resolved action vector.
using TransitionHook = std::function<Eigen::VectorXd(
    const Eigen::VectorXd& state, const Eigen::VectorXd& x_a)>;

// Applies the action operator: the vector's stochastic effects are already
// resolved, so this is a plain function application.
Eigen::VectorXd apply_operator(const Eigen::VectorXd& state_vec,
                               const Eigen::VectorXd& x_a,
                               const TransitionHook& dynamics);

// The 12 clock-direction navigation primitives: action vector (dr, phi).
// Clock position i (1..12) is primitive index i-1 and has center direction
// phi = pi/2 - i*pi/6 normalized to (-pi, pi], so clock 3 points due east and
// clock 12 due north; each arc spans +-15 degrees around its center.
ParametricActionModel make_clock_model(double dr_target = 1.0,
                                       double dr_lo = 0.8, double dr_hi = 1.2,
                                       double dr_sigma = 0.1,
                                       double angle_sigma = 0.1308996938995747,
                                       double eta = 0.95);

// Unit direction of a clock primitive's center angle.
Eigen::Vector2d clock_direction(int primitive_index);

// Signed angular difference wrapped into (-pi, pi].
double wrap_angle(double a);

}  // namespace grl

#endif
