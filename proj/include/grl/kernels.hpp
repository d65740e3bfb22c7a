#ifndef GRL_KERNELS_HPP
#define GRL_KERNELS_HPP

#include <Eigen/Dense>
#include <vector>

namespace grl {

enum class KernelKind {
  SquaredExponentialJoint,  // one SE over the concatenated state/action vector
  ProductStateAction,       // unit-amplitude SE over state times SE over action
};

// Hyperparameters shared by every kernel evaluation.
//
// length_scales holds the diagonal of D in the quadratic form
// (x - x')^T D^-1 (x - x'), one entry per joint dimension.  For the product
// kernel the first state_dim entries parameterize the state factor and the
// remaining action_dim entries the action factor.  noise_scale is the single
// additive observation-noise term; it appears on the Gram diagonal only.
struct KernelHyperparameters {
  KernelKind kind = KernelKind::SquaredExponentialJoint;
  int state_dim = 0;
  int action_dim = 0;
  double signal_amplitude = 1.0;  // theta0 > 0
  double noise_scale = 0.0;       // >= 0
  Eigen::VectorXd length_scales;  // all > 0, size state_dim + action_dim

  int joint_dim() const { return state_dim + action_dim; }
  // Hyperparameter vector layout used by gradients and ARD:
  // [log amplitude, log noise, log length_scale_0 .. log length_scale_{d-1}]
  int param_count() const { return 2 + joint_dim(); }

  void validate() const;  // throws ConfigError
};

// A state vector paired with an action vector; the canonical joint view is
// the concatenation (state..., action...) in fixed coordinate order.
struct AugmentedState {
  Eigen::VectorXd state_vec;
  Eigen::VectorXd action_vec;

  AugmentedState() = default;
  AugmentedState(Eigen::VectorXd s, Eigen::VectorXd a)
      : state_vec(std::move(s)), action_vec(std::move(a)) {}

  Eigen::VectorXd joint() const {
    Eigen::VectorXd j(state_vec.size() + action_vec.size());
    j << state_vec, action_vec;
    return j;
  }
};

// k(x, x2), optionally with the additive noise term.
double kernel_value(const AugmentedState& x, const AugmentedState& x2,
                    const KernelHyperparameters& h, bool include_noise = false);

// Same kernel evaluated on pre-concatenated joint vectors.
double kernel_value_joint(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          const KernelHyperparameters& h,
                          bool include_noise = false);

// Normalized, noise-free similarity in (0, 1]; equals 1 iff x == x2 and is
// invariant under amplitude changes, so association thresholds are scale-free.
double correlation(const AugmentedState& x, const AugmentedState& x2,
                   const KernelHyperparameters& h);
double correlation_joint(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const KernelHyperparameters& h);

// K with K_ij = k(x_i, x_j) noise-free and noise_scale added on the diagonal.
Eigen::MatrixXd gram_matrix(const std::vector<AugmentedState>& X,
                            const KernelHyperparameters& h);
// Rows of X are joint vectors.
Eigen::MatrixXd gram_matrix_joint(const Eigen::MatrixXd& X,
                                  const KernelHyperparameters& h,
                                  bool noise_on_diagonal = true);

// Partial derivative of k(x, x2) w.r.t. the log of the hyperparameter at
// param_index (layout as in KernelHyperparameters::param_count).  The noise
// term contributes only when the two inputs coincide exactly.
double kernel_param_gradient(const AugmentedState& x, const AugmentedState& x2,
                             const KernelHyperparameters& h, int param_index);

}  // namespace grl

#endif
