#include "grl/kernels.hpp"

#include <cmath>
#include <string>

#include "grl/errors.hpp"

namespace grl {

void KernelHyperparameters::validate() const {
  if (state_dim < 0 || action_dim < 0 || joint_dim() <= 0)
    throw ConfigError("kernel: state_dim + action_dim must be positive");
  if (!(signal_amplitude > 0.0))
    throw ConfigError("kernel: signal_amplitude must be > 0");
  if (!(noise_scale >= 0.0))
    throw ConfigError("kernel: noise_scale must be >= 0");
  if (length_scales.size() != joint_dim())
    throw ConfigError("kernel: need one length scale per joint dimension (" +
                      std::to_string(joint_dim()) + "), got " +
                      std::to_string(length_scales.size()));
  for (Eigen::Index i = 0; i < length_scales.size(); ++i)
    if (!(length_scales[i] > 0.0))
      throw ConfigError("kernel: length scales must be > 0");
}

namespace {

void check_dims(Eigen::Index da, Eigen::Index db,
                const KernelHyperparameters& h) {
  if (da != h.joint_dim() || db != h.joint_dim())
    throw ConfigError("kernel: input dimension mismatch, expected " +
                      std::to_string(h.joint_dim()));
}

// -1/2 sum over [begin, end) of (a_i - b_i)^2 / D_ii
double half_neg_quadform(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& scales, Eigen::Index begin,
                         Eigen::Index end) {
  double q = 0.0;
  for (Eigen::Index i = begin; i < end; ++i) {
    const double d = a[i] - b[i];
    q += d * d / scales[i];
  }
  return -0.5 * q;
}

double noise_free_joint(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        const KernelHyperparameters& h) {
  const Eigen::Index m = h.state_dim;
  const Eigen::Index d = h.joint_dim();
  switch (h.kind) {
    case KernelKind::SquaredExponentialJoint:
      return h.signal_amplitude *
             std::exp(half_neg_quadform(a, b, h.length_scales, 0, d));
    case KernelKind::ProductStateAction: {
      const double ks = std::exp(half_neg_quadform(a, b, h.length_scales, 0, m));
      const double ka = std::exp(half_neg_quadform(a, b, h.length_scales, m, d));
      return h.signal_amplitude * ks * ka;
    }
  }
  throw ConfigError("kernel: unknown kernel kind");
}

}  // namespace

double kernel_value_joint(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          const KernelHyperparameters& h, bool include_noise) {
  check_dims(a.size(), b.size(), h);
  double k = noise_free_joint(a, b, h);
  if (include_noise) k += h.noise_scale;
  return k;
}

double kernel_value(const AugmentedState& x, const AugmentedState& x2,
                    const KernelHyperparameters& h, bool include_noise) {
  return kernel_value_joint(x.joint(), x2.joint(), h, include_noise);
}

double correlation_joint(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const KernelHyperparameters& h) {
  check_dims(a.size(), b.size(), h);
  const double kab = noise_free_joint(a, b, h);
  const double kaa = noise_free_joint(a, a, h);
  const double kbb = noise_free_joint(b, b, h);
  return kab / std::sqrt(kaa * kbb);
}

double correlation(const AugmentedState& x, const AugmentedState& x2,
                   const KernelHyperparameters& h) {
  return correlation_joint(x.joint(), x2.joint(), h);
}

Eigen::MatrixXd gram_matrix_joint(const Eigen::MatrixXd& X,
                                  const KernelHyperparameters& h,
                                  bool noise_on_diagonal) {
  if (X.rows() == 0) throw PreconditionError("gram_matrix: empty input");
  check_dims(X.cols(), X.cols(), h);
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double k = noise_free_joint(X.row(i), X.row(j), h);
      K(i, j) = k;
      K(j, i) = k;
    }
    if (noise_on_diagonal) K(i, i) += h.noise_scale;
  }
  return K;
}

Eigen::MatrixXd gram_matrix(const std::vector<AugmentedState>& X,
                            const KernelHyperparameters& h) {
  if (X.empty()) throw PreconditionError("gram_matrix: empty input");
  Eigen::MatrixXd J(static_cast<Eigen::Index>(X.size()), h.joint_dim());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Eigen::VectorXd j = X[i].joint();
    check_dims(j.size(), j.size(), h);
    J.row(static_cast<Eigen::Index>(i)) = j;
  }
  return gram_matrix_joint(J, h);
}

double kernel_param_gradient(const AugmentedState& x, const AugmentedState& x2,
                             const KernelHyperparameters& h, int param_index) {
  if (param_index < 0 || param_index >= h.param_count())
    throw ConfigError("kernel_param_gradient: parameter index out of range");
  const Eigen::VectorXd a = x.joint();
  const Eigen::VectorXd b = x2.joint();
  check_dims(a.size(), b.size(), h);
  if (param_index == 0) {
    // d k / d log theta0 = noise-free kernel value
    return noise_free_joint(a, b, h);
  }
  if (param_index == 1) {
    // Noise sits on the Gram diagonal only; treat identical inputs as the
    // diagonal case.  d (s) / d log s = s.
    return (a.array() == b.array()).all() ? h.noise_scale : 0.0;
  }
  const Eigen::Index d = param_index - 2;
  const double delta = a[d] - b[d];
  // d k / d log l_d = k * (1/2) delta^2 / l_d
  return noise_free_joint(a, b, h) * 0.5 * delta * delta / h.length_scales[d];
}

}  // namespace grl
