#include "grl/action_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "grl/errors.hpp"

namespace grl {

namespace {
constexpr double kPi = 3.14159265358979323846;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

bool CoordinateSpec::contains(double value) const {
  if (!wraps) return value >= lo && value <= hi;
  return std::abs(wrap_angle(value - center())) <= half_width();
}

double CoordinateSpec::distance(double value) const {
  if (contains(value)) return 0.0;
  if (!wraps) return value < lo ? lo - value : value - hi;
  return std::abs(wrap_angle(value - center())) - half_width();
}

void ParametricActionModel::validate() const {
  if (primitives.empty())
    throw ConfigError("action model: needs at least one primitive");
  if (action_dim <= 0) throw ConfigError("action model: action_dim must be > 0");
  if (yield_threshold < 0.0 || yield_threshold > 1.0)
    throw ConfigError("action model: yield threshold must lie in [0, 1]");
  for (std::size_t p = 0; p < primitives.size(); ++p) {
    const auto& prim = primitives[p];
    if (static_cast<int>(prim.coords.size()) != action_dim)
      throw ConfigError("action model: primitive " + std::to_string(p) +
                        " has wrong coordinate count");
    for (const auto& c : prim.coords) {
      if (!(c.lo < c.hi))
        throw ConfigError("action model: coordinate support must have lo < hi");
      if (!c.contains(c.target))
        throw ConfigError("action model: target outside its support");
      if (c.noise_sigma < 0.0)
        throw ConfigError("action model: noise sigma must be >= 0");
    }
  }
  // Classification is only well-defined when any two primitives are
  // separated by at least one coordinate with disjoint supports.
  for (std::size_t a = 0; a < primitives.size(); ++a)
    for (std::size_t b = a + 1; b < primitives.size(); ++b) {
      bool disjoint_somewhere = false;
      for (int d = 0; d < action_dim && !disjoint_somewhere; ++d) {
        const auto& ca = primitives[a].coords[d];
        const auto& cb = primitives[b].coords[d];
        // Supports may touch at a boundary point; the lowest-index rule
        // breaks those ties during classification.
        if (ca.wraps || cb.wraps) {
          const double gap = std::abs(wrap_angle(ca.center() - cb.center()));
          disjoint_somewhere = gap >= ca.half_width() + cb.half_width() - 1e-12;
        } else {
          disjoint_somewhere = ca.hi <= cb.lo || cb.hi <= ca.lo;
        }
      }
      if (!disjoint_somewhere)
        throw ConfigError("action model: primitives " + std::to_string(a) +
                          " and " + std::to_string(b) +
                          " overlap in every coordinate");
    }
}

double yield_prob(double value, const CoordinateSpec& c) {
  if (c.noise_sigma == 0.0) return c.contains(value) ? 1.0 : 0.0;
  if (!c.wraps)
    return normal_cdf((c.hi - value) / c.noise_sigma) -
           normal_cdf((c.lo - value) / c.noise_sigma);
  const double d = wrap_angle(value - c.center());
  const double w = c.half_width();
  return normal_cdf((w - d) / c.noise_sigma) -
         normal_cdf((-w - d) / c.noise_sigma);
}

Eigen::VectorXd sample_action(int primitive_index,
                              const ParametricActionModel& model, Rng& rng) {
  if (primitive_index < 0 || primitive_index >= model.primitive_count())
    throw ConfigError("sample_action: invalid primitive index " +
                      std::to_string(primitive_index));
  const auto& prim = model.primitives[static_cast<std::size_t>(primitive_index)];
  Eigen::VectorXd x(model.action_dim);
  for (int d = 0; d < model.action_dim; ++d) {
    const auto& c = prim.coords[static_cast<std::size_t>(d)];
    double v = c.target;
    if (c.noise_sigma > 0.0) {
      bool ok = false;
      for (int attempt = 0; attempt < 32; ++attempt) {
        v = c.target + c.noise_sigma * rng.normal();
        if (c.contains(v)) {
          ok = true;
          break;
        }
      }
      // Draws stay in the target's unwrapped neighborhood, so endpoint
      // clamping is feasible for wrapping coordinates too.
      if (!ok) v = std::clamp(v, c.lo, c.hi);
    }
    x[d] = v;
  }
  return x;
}

Eigen::VectorXd action_targets(int primitive_index,
                               const ParametricActionModel& model) {
  if (primitive_index < 0 || primitive_index >= model.primitive_count())
    throw ConfigError("action_targets: invalid primitive index");
  const auto& prim = model.primitives[static_cast<std::size_t>(primitive_index)];
  Eigen::VectorXd x(model.action_dim);
  for (int d = 0; d < model.action_dim; ++d)
    x[d] = prim.coords[static_cast<std::size_t>(d)].target;
  return x;
}

int resolve_primitive(const Eigen::VectorXd& x_a,
                      const ParametricActionModel& model) {
  if (x_a.size() != model.action_dim)
    throw ConfigError("resolve_primitive: action vector dimension mismatch");
  int best = -1;
  double best_distance = std::numeric_limits<double>::infinity();
  for (int p = 0; p < model.primitive_count(); ++p) {
    const auto& prim = model.primitives[static_cast<std::size_t>(p)];
    double total = 0.0;
    for (int d = 0; d < model.action_dim; ++d) {
      const auto& c = prim.coords[static_cast<std::size_t>(d)];
      total += c.distance(x_a[d]) / c.width();
    }
    if (total == 0.0) return p;  // first containing primitive wins ties
    if (total < best_distance) {
      best_distance = total;
      best = p;
    }
  }
  return best;
}

Eigen::VectorXd apply_operator(const Eigen::VectorXd& state_vec,
                               const Eigen::VectorXd& x_a,
                               const TransitionHook& dynamics) {
  return dynamics(state_vec, x_a);
}

ParametricActionModel make_clock_model(double dr_target, double dr_lo,
                                       double dr_hi, double dr_sigma,
                                       double angle_sigma, double eta) {
  ParametricActionModel model;
  model.action_dim = 2;
  model.yield_threshold = eta;
  model.primitives.reserve(12);
  const double arc = kPi / 12.0;  // +-15 degrees
  for (int clock = 1; clock <= 12; ++clock) {
    const double phi = wrap_angle(kPi / 2.0 - clock * kPi / 6.0);
    PrimitiveSpec prim;
    prim.coords.push_back(
        {dr_target, dr_lo, dr_hi, dr_sigma, /*wraps=*/false});
    prim.coords.push_back({phi, phi - arc, phi + arc, angle_sigma,
                           /*wraps=*/true});
    model.primitives.push_back(std::move(prim));
  }
  model.validate();
  return model;
}

Eigen::Vector2d clock_direction(int primitive_index) {
  const double phi = wrap_angle(kPi / 2.0 - (primitive_index + 1) * kPi / 6.0);
  return {std::cos(phi), std::sin(phi)};
}

}  // namespace grl
