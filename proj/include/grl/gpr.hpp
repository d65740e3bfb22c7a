#ifndef GRL_GPR_HPP
#define GRL_GPR_HPP

#include <Eigen/Dense>
#include <limits>
#include <utility>
#include <vector>

#include "grl/kernels.hpp"

namespace grl {

// Gaussian-process regressor over experience particles with a zero prior
// mean.  Immutable after fit(); concurrent predictions are safe.
struct GprModel {
  std::vector<AugmentedState> inputs;
  Eigen::MatrixXd X;       // joint vectors, one row per training input
  Eigen::VectorXd targets; // q
  KernelHyperparameters hyper;
  Eigen::MatrixXd chol;    // lower-triangular L with L L^T = K + jitter I
  Eigen::VectorXd alpha;   // (K + jitter I)^-1 q
  double jitter = 0.0;     // diagonal jitter actually used

  bool empty() const { return targets.size() == 0; }
  int size() const { return static_cast<int>(targets.size()); }
};

using TrainingSet = std::vector<std::pair<AugmentedState, double>>;

// Builds and factorizes the Gram matrix.  Jitter of 1e-8 * amplitude is
// added to the diagonal and doubled up to 6 times if the factorization
// fails; exhaustion raises NumericalError.  Exact duplicate inputs with
// zero noise are rejected as a singular system.
GprModel fit(const TrainingSet& particles, const KernelHyperparameters& h);

// Posterior mean k(x*, X)^T alpha.
double predict_mean(const GprModel& m, const AugmentedState& x_star);

// Latent posterior variance k(x*,x*) - k(x*,X)^T K^-1 k(X,x*), clamped at 0.
double predict_variance(const GprModel& m, const AugmentedState& x_star);

// -1/2 q^T K^-1 q - 1/2 log|K| - (n/2) log 2pi, from the cached factorization.
double log_marginal_likelihood(const GprModel& m);

// Gradient of the log marginal likelihood w.r.t. the log hyperparameters,
// ordered [log amplitude, log noise, log length scales...].
Eigen::VectorXd lml_gradient(const GprModel& m);

struct ArdConfig {
  int max_iters = 50;
  double step_tolerance = 1e-6;
  // Optional per-parameter search box in log space (layout as lml_gradient).
  // Empty vectors leave the search unconstrained.  Callers re-running ARD
  // periodically anchor the box at the run's initial hyperparameters so
  // drift cannot accumulate across calls.
  Eigen::VectorXd log_lower;
  Eigen::VectorXd log_upper;
};

// Search box around anchor hyperparameters: amplitude and noise may move by
// amp_factor, every length scale by scale_factor.
void set_ard_box(ArdConfig& cfg, const KernelHyperparameters& anchor,
                 double amp_factor, double scale_factor);

struct ArdResult {
  KernelHyperparameters hyper;
  std::vector<double> lml_trace;  // accepted iterates, non-decreasing
};

// Hyperparameter search by gradient ascent on the log marginal likelihood in
// log-parameter space, with a backtracking line search that accepts only
// improving steps.  Numerical failures during trial steps revert to the best
// iterate so far; this never throws once the initial fit succeeds (and
// returns h0 untouched if even that fails).
ArdResult ard_optimize(const TrainingSet& particles,
                       const KernelHyperparameters& h0,
                       const ArdConfig& cfg = {});

struct NadarayaWatsonResult {
  Eigen::VectorXd weights;  // non-negative, sums to 1
  double estimate;          // convex combination of the targets
};

// Kernel-weighted average with w_i = k(x*, x_i) / sum_j k(x*, x_j) using the
// noise-free kernel.  Throws DegenerateQueryError when every kernel value
// underflows to zero.
NadarayaWatsonResult nadaraya_watson(const TrainingSet& particles,
                                     const AugmentedState& x_star,
                                     const KernelHyperparameters& h);

}  // namespace grl

#endif
