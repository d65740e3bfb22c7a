#ifndef GRL_RNG_HPP
#define GRL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace grl {

// Deterministic random source with named sub-streams.
//
// Every piece of randomness in a run flows from one root seed through
// substream(name) so that adding a new consumer never perturbs existing
// streams, and any single stage can be replayed in isolation from its
// derived seed.  The uniform/normal transforms are implemented here rather
// than via std::*_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_seed_(seed), engine_(mix(seed)) {}

  Rng substream(std::string_view name) const {
    return Rng(mix(root_seed_ ^ hash_name(name)));
  }

  std::uint64_t root_seed() const { return root_seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    auto v = static_cast<int>(uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  // Standard normal via Box-Muller (no caching, so draw count is predictable).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  static std::uint64_t hash_name(std::string_view name) {
    // FNV-1a
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : name) {
      h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
      h *= 1099511628211ULL;
    }
    return h;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t root_seed_;
  std::mt19937_64 engine_;
};

}  // namespace grl

#endif
