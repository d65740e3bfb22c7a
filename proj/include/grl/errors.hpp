#ifndef GRL_ERRORS_HPP
#define GRL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace grl {

// Invalid configuration: bad dimensions, out-of-range parameters, malformed input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated an operation's stated precondition (e.g. empty input).
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure (e.g. kernel matrix not positive definite after max jitter).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Similarity graph unusable for a random-walk construction (zero-degree vertex).
struct DegenerateGraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Query point so far from all data that every kernel weight underflowed.
struct DegenerateQueryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace grl

#endif
