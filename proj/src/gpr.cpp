#include "grl/gpr.hpp"

#include <cmath>
#include <limits>

#include "grl/errors.hpp"

namespace grl {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd cross_covariance(const GprModel& m, const AugmentedState& x) {
  const Eigen::VectorXd j = x.joint();
  Eigen::VectorXd k(m.size());
  for (int i = 0; i < m.size(); ++i)
    k[i] = kernel_value_joint(m.X.row(i), j, m.hyper, false);
  return k;
}

// Hyperparameters reconstructed from a log-parameter vector.  A zero noise
// scale has no log representation; it stays pinned at zero.
KernelHyperparameters from_log_params(const KernelHyperparameters& base,
                                      const Eigen::VectorXd& v) {
  KernelHyperparameters h = base;
  h.signal_amplitude = std::exp(v[0]);
  h.noise_scale = base.noise_scale > 0.0 ? std::exp(v[1]) : 0.0;
  for (int d = 0; d < base.joint_dim(); ++d)
    h.length_scales[d] = std::exp(v[2 + d]);
  return h;
}

Eigen::VectorXd to_log_params(const KernelHyperparameters& h) {
  Eigen::VectorXd v(h.param_count());
  v[0] = std::log(h.signal_amplitude);
  v[1] = h.noise_scale > 0.0 ? std::log(h.noise_scale) : 0.0;
  for (int d = 0; d < h.joint_dim(); ++d) v[2 + d] = std::log(h.length_scales[d]);
  return v;
}

}  // namespace

GprModel fit(const TrainingSet& particles, const KernelHyperparameters& h) {
  if (particles.empty()) throw PreconditionError("gpr fit: empty training set");
  h.validate();

  GprModel m;
  m.hyper = h;
  m.inputs.reserve(particles.size());
  const Eigen::Index n = static_cast<Eigen::Index>(particles.size());
  m.X.resize(n, h.joint_dim());
  m.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [aug, q] = particles[static_cast<std::size_t>(i)];
    if (!std::isfinite(q)) throw PreconditionError("gpr fit: non-finite target");
    m.inputs.push_back(aug);
    m.X.row(i) = aug.joint();
    m.targets[i] = q;
  }

  // With zero observation noise an exact duplicate row makes K singular in
  // exact arithmetic, but jitter lets the factorization squeak through
  // numerically; reject it outright instead of masking the configuration.
  if (h.noise_scale == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if ((m.X.row(i).array() == m.X.row(j).array()).all())
          throw NumericalError(
              "gpr fit: kernel matrix is singular (duplicate training inputs "
              "with zero noise)");
  }

  // First attempt is jitter-free so zero-noise models interpolate exactly;
  // jitter of 1e-8 * amplitude enters only on factorization failure and
  // doubles up to 6 times before giving up.
  const Eigen::MatrixXd K = gram_matrix_joint(m.X, h);
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 7; ++attempt) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) {
      m.chol = llt.matrixL();
      m.alpha = llt.solve(m.targets);
      m.jitter = jitter;
      return m;
    }
    jitter = jitter == 0.0 ? 1e-8 * h.signal_amplitude : 2.0 * jitter;
  }
  throw NumericalError(
      "gpr fit: kernel matrix not positive definite after max jitter");
}

double predict_mean(const GprModel& m, const AugmentedState& x_star) {
  if (m.empty()) throw PreconditionError("predict_mean: unfitted model");
  return cross_covariance(m, x_star).dot(m.alpha);
}

double predict_variance(const GprModel& m, const AugmentedState& x_star) {
  if (m.empty()) throw PreconditionError("predict_variance: unfitted model");
  const Eigen::VectorXd k = cross_covariance(m, x_star);
  const Eigen::VectorXd v = m.chol.triangularView<Eigen::Lower>().solve(k);
  const double prior = kernel_value(x_star, x_star, m.hyper, false);
  return std::max(0.0, prior - v.squaredNorm());
}

double log_marginal_likelihood(const GprModel& m) {
  if (m.empty())
    throw PreconditionError("log_marginal_likelihood: unfitted model");
  const double data_fit = -0.5 * m.targets.dot(m.alpha);
  const double log_det = m.chol.diagonal().array().log().sum();  // 1/2 log|K|
  return data_fit - log_det - 0.5 * m.size() * std::log(2.0 * kPi);
}

Eigen::VectorXd lml_gradient(const GprModel& m) {
  if (m.empty()) throw PreconditionError("lml_gradient: unfitted model");
  const int n = m.size();
  const int np = m.hyper.param_count();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt;
  // Reuse the cached factor: K^-1 = L^-T L^-1.
  const Eigen::MatrixXd Linv =
      m.chol.triangularView<Eigen::Lower>().solve(identity);
  const Eigen::MatrixXd Kinv = Linv.transpose() * Linv;

  // dK/dtheta for each log parameter; the exponential part is shared.
  Eigen::MatrixXd E(n, n);  // noise-free Gram
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      E(i, j) = kernel_value_joint(m.X.row(i), m.X.row(j), m.hyper, false);

  Eigen::VectorXd grad(np);
  auto grad_for = [&](const Eigen::MatrixXd& dK) {
    const Eigen::VectorXd dKa = dK * m.alpha;
    return 0.5 * m.alpha.dot(dKa) - 0.5 * (Kinv.cwiseProduct(dK)).sum();
  };

  grad[0] = grad_for(E);  // d/d log theta0: dK = E
  if (m.hyper.noise_scale > 0.0) {
    grad[1] = grad_for(m.hyper.noise_scale * identity);
  } else {
    grad[1] = 0.0;
  }
  for (int d = 0; d < m.hyper.joint_dim(); ++d) {
    Eigen::MatrixXd dK(n, n);
    const double scale = m.hyper.length_scales[d];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double delta = m.X(i, d) - m.X(j, d);
        dK(i, j) = E(i, j) * 0.5 * delta * delta / scale;
      }
    grad[2 + d] = grad_for(dK);
  }
  return grad;
}

ArdResult ard_optimize(const TrainingSet& particles,
                       const KernelHyperparameters& h0, const ArdConfig& cfg) {
  if (particles.size() < 2)
    throw PreconditionError("ard_optimize: need at least 2 particles");

  ArdResult out;
  out.hyper = h0;

  GprModel best_model;
  try {
    best_model = fit(particles, h0);
  } catch (const NumericalError&) {
    return out;  // cannot even evaluate the start point; keep h0
  }
  double best_lml = log_marginal_likelihood(best_model);
  out.lml_trace.push_back(best_lml);

  Eigen::VectorXd v = to_log_params(h0);
  Eigen::VectorXd v_lo = Eigen::VectorXd::Constant(v.size(), -20.0);
  Eigen::VectorXd v_hi = Eigen::VectorXd::Constant(v.size(), 20.0);
  if (cfg.log_lower.size() == v.size()) v_lo = v_lo.cwiseMax(cfg.log_lower);
  if (cfg.log_upper.size() == v.size()) v_hi = v_hi.cwiseMin(cfg.log_upper);
  v = v.cwiseMax(v_lo).cwiseMin(v_hi);
  const bool noise_free = h0.noise_scale > 0.0;
  double lr = 0.1;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    Eigen::VectorXd g = lml_gradient(best_model);
    if (!noise_free) g[1] = 0.0;
    const double gmax = g.cwiseAbs().maxCoeff();
    if (gmax < 1e-12) break;
    // Normalize so lr bounds the largest log-space move per attempt.
    g /= gmax;

    bool accepted = false;
    bool converged = false;
    double step = lr;
    for (int shrink = 0; shrink < 25; ++shrink, step *= 0.5) {
      Eigen::VectorXd v_try = v + step * g;
      v_try = v_try.cwiseMax(v_lo).cwiseMin(v_hi);
      const KernelHyperparameters h_try = from_log_params(h0, v_try);
      double lml_try;
      GprModel m_try;
      try {
        m_try = fit(particles, h_try);
        lml_try = log_marginal_likelihood(m_try);
      } catch (const NumericalError&) {
        continue;
      }
      if (std::isfinite(lml_try) && lml_try > best_lml) {
        converged = (v_try - v).cwiseAbs().maxCoeff() < cfg.step_tolerance;
        v = v_try;
        best_model = std::move(m_try);
        best_lml = lml_try;
        out.lml_trace.push_back(best_lml);
        out.hyper = h_try;
        lr = std::min(step * 2.0, 1.0);
        accepted = true;
        break;
      }
    }
    if (!accepted || converged) break;
  }
  return out;
}

void set_ard_box(ArdConfig& cfg, const KernelHyperparameters& anchor,
                 double amp_factor, double scale_factor) {
  const int np = anchor.param_count();
  cfg.log_lower.resize(np);
  cfg.log_upper.resize(np);
  const double la = std::log(amp_factor);
  const double ls = std::log(scale_factor);
  const double amp = std::log(anchor.signal_amplitude);
  const double noise =
      anchor.noise_scale > 0.0 ? std::log(anchor.noise_scale) : 0.0;
  cfg.log_lower[0] = amp - la;
  cfg.log_upper[0] = amp + la;
  cfg.log_lower[1] = noise - la;
  cfg.log_upper[1] = noise + la;
  for (int d = 0; d < anchor.joint_dim(); ++d) {
    const double s = std::log(anchor.length_scales[d]);
    cfg.log_lower[2 + d] = s - ls;
    cfg.log_upper[2 + d] = s + ls;
  }
}

NadarayaWatsonResult nadaraya_watson(const TrainingSet& particles,
                                     const AugmentedState& x_star,
                                     const KernelHyperparameters& h) {
  if (particles.empty())
    throw PreconditionError("nadaraya_watson: empty training set");
  const Eigen::Index n = static_cast<Eigen::Index>(particles.size());
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = kernel_value(x_star, particles[static_cast<std::size_t>(i)].first, h,
                        false);
  const double total = w.sum();
  if (!(total > 0.0))
    throw DegenerateQueryError(
        "nadaraya_watson: all kernel weights underflowed to zero");
  w /= total;
  double estimate = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    estimate += w[i] * particles[static_cast<std::size_t>(i)].second;
  return {std::move(w), estimate};
}

}  // namespace grl
