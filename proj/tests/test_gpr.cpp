#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "grl/errors.hpp"
#include "grl/gpr.hpp"
#include "grl/rng.hpp"

using namespace grl;

namespace {

KernelHyperparameters se_params(int m, int n, double amp = 1.0,
                                double noise = 0.0) {
  KernelHyperparameters h;
  h.state_dim = m;
  h.action_dim = n;
  h.signal_amplitude = amp;
  h.noise_scale = noise;
  h.length_scales = Eigen::VectorXd::Ones(m + n);
  return h;
}

AugmentedState random_aug(Rng& rng, int m, int n, double span = 5.0) {
  Eigen::VectorXd s(m), a(n);
  for (int i = 0; i < m; ++i) s[i] = rng.uniform(0.0, span);
  for (int i = 0; i < n; ++i) a[i] = rng.uniform(0.0, span);
  return {s, a};
}

TrainingSet random_set(Rng& rng, int count, int m, int n, double qspan = 4.0) {
  TrainingSet ts;
  for (int i = 0; i < count; ++i)
    ts.emplace_back(random_aug(rng, m, n), rng.uniform(-qspan, qspan));
  return ts;
}

AugmentedState point1d(double s, double a) {
  return {Eigen::VectorXd::Constant(1, s), Eigen::VectorXd::Constant(1, a)};
}

// Dense-inverse oracle for the posterior, independent of the Cholesky path.
struct DenseOracle {
  Eigen::MatrixXd Kinv;
  TrainingSet data;
  KernelHyperparameters h;

  DenseOracle(const TrainingSet& ts, const KernelHyperparameters& hp,
              double jitter)
      : data(ts), h(hp) {
    std::vector<AugmentedState> xs;
    for (const auto& [x, q] : ts) xs.push_back(x);
    Eigen::MatrixXd K = gram_matrix(xs, hp);
    K.diagonal().array() += jitter;
    Kinv = K.inverse();
  }

  Eigen::VectorXd cross(const AugmentedState& x) const {
    Eigen::VectorXd k(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
      k[static_cast<Eigen::Index>(i)] = kernel_value(x, data[i].first, h, false);
    return k;
  }

  double mean(const AugmentedState& x) const {
    Eigen::VectorXd q(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
      q[static_cast<Eigen::Index>(i)] = data[i].second;
    return cross(x).dot(Kinv * q);
  }

  double variance(const AugmentedState& x) const {
    const Eigen::VectorXd k = cross(x);
    return kernel_value(x, x, h, false) - k.dot(Kinv * k);
  }

  double lml() const {
    Eigen::VectorXd q(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
      q[static_cast<Eigen::Index>(i)] = data[i].second;
    Eigen::MatrixXd K = Kinv.inverse();
    const double n = static_cast<double>(data.size());
    return -0.5 * q.dot(Kinv * q) - 0.5 * std::log(K.determinant()) -
           0.5 * n * std::log(2.0 * 3.14159265358979323846);
  }
};

}  // namespace

TEST_CASE("fit closed forms on one particle") {
  const auto x1 = point1d(0.4, 1.0);

  auto h0 = se_params(1, 1, 1.0, 0.0);
  const GprModel m0 = fit({{x1, 2.0}}, h0);
  CHECK(m0.alpha[0] == doctest::Approx(2.0).epsilon(1e-6));

  auto h1 = se_params(1, 1, 1.0, 1.0);
  const GprModel m1 = fit({{x1, 2.0}}, h1);
  CHECK(m1.alpha[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(predict_mean(m1, x1) == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(fit({}, h1), PreconditionError);
}

TEST_CASE("duplicate inputs with zero noise are a numerical error") {
  const auto h = se_params(1, 1, 1.0, 0.0);
  const auto x = point1d(1.0, 2.0);
  CHECK_THROWS_AS(fit({{x, 1.0}, {x, 2.0}}, h), NumericalError);
  // with observation noise the same data is fine
  const auto hn = se_params(1, 1, 1.0, 0.5);
  CHECK_NOTHROW(fit({{x, 1.0}, {x, 2.0}}, hn));
}

TEST_CASE("zero-noise models interpolate training targets") {
  Rng rng(2);
  const auto h = se_params(2, 1, 1.5, 0.0);
  const auto ts = random_set(rng, 12, 2, 1);
  const GprModel m = fit(ts, h);
  for (const auto& [x, q] : ts) {
    CHECK(predict_mean(m, x) == doctest::Approx(q).epsilon(1e-8));
    CHECK(predict_variance(m, x) <= 1e-8);
  }
}

TEST_CASE("predictions match the dense-inverse oracle") {
  Rng rng(3);
  for (const auto kind :
       {KernelKind::SquaredExponentialJoint, KernelKind::ProductStateAction}) {
    auto h = se_params(2, 2, 2.0, 0.3);
    h.kind = kind;
    const auto ts = random_set(rng, 15, 2, 2);
    const GprModel m = fit(ts, h);
    const DenseOracle oracle(ts, h, m.jitter);
    for (int t = 0; t < 20; ++t) {
      const auto x = random_aug(rng, 2, 2);
      CHECK(predict_mean(m, x) == doctest::Approx(oracle.mean(x)).epsilon(1e-8));
      CHECK(predict_variance(m, x) ==
            doctest::Approx(std::max(0.0, oracle.variance(x))).epsilon(1e-8));
    }
  }
}

TEST_CASE("posterior limits far away and variance bound") {
  Rng rng(4);
  const auto h = se_params(1, 1, 2.5, 0.1);
  const auto ts = random_set(rng, 10, 1, 1);
  const GprModel m = fit(ts, h);
  const auto far = point1d(1e6, -1e6);
  CHECK(predict_mean(m, far) == doctest::Approx(0.0));
  CHECK(predict_variance(m, far) == doctest::Approx(2.5));
  for (int t = 0; t < 50; ++t)
    CHECK(predict_variance(m, random_aug(rng, 1, 1)) <= 2.5 + 1e-9);
}

TEST_CASE("prediction is linear in targets; variance ignores them") {
  Rng rng(5);
  const auto h = se_params(1, 1, 1.0, 0.2);
  auto ts = random_set(rng, 8, 1, 1);
  auto doubled = ts;
  for (auto& [x, q] : doubled) q *= 2.0;
  const GprModel m1 = fit(ts, h);
  const GprModel m2 = fit(doubled, h);
  for (int t = 0; t < 10; ++t) {
    const auto x = random_aug(rng, 1, 1);
    CHECK(predict_mean(m2, x) == doctest::Approx(2.0 * predict_mean(m1, x)));
    CHECK(predict_variance(m2, x) == doctest::Approx(predict_variance(m1, x)));
  }
}

TEST_CASE("log marginal likelihood closed form and oracle") {
  // one particle, q=2, K=[2]
  const auto h = se_params(1, 1, 1.0, 1.0);
  const GprModel m = fit({{point1d(0.0, 0.0), 2.0}}, h);
  const double expected =
      -1.0 - 0.5 * std::log(2.0) - 0.5 * std::log(2.0 * 3.14159265358979323846);
  CHECK(log_marginal_likelihood(m) == doctest::Approx(expected).epsilon(1e-6));

  // zero targets leave only the complexity and constant terms
  Rng rng(6);
  auto ts = random_set(rng, 6, 1, 1);
  for (auto& [x, q] : ts) q = 0.0;
  const GprModel mz = fit(ts, se_params(1, 1, 1.0, 0.4));
  const DenseOracle oz(ts, mz.hyper, mz.jitter);
  CHECK(log_marginal_likelihood(mz) == doctest::Approx(oz.lml()).epsilon(1e-8));

  for (int t = 0; t < 5; ++t) {
    const auto ts10 = random_set(rng, 10, 1, 1);
    const GprModel m10 = fit(ts10, se_params(1, 1, 1.3, 0.25));
    const DenseOracle o10(ts10, m10.hyper, m10.jitter);
    CHECK(log_marginal_likelihood(m10) ==
          doctest::Approx(o10.lml()).epsilon(1e-8));
  }
}

TEST_CASE("lml gradient matches central finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    auto h = se_params(2, 1, 1.0 + rng.uniform(), 0.2 + 0.3 * rng.uniform());
    h.length_scales << 0.9, 1.4, 0.7;
    const int count = 5 + trial * 8;
    const auto ts = random_set(rng, count, 2, 1);
    const GprModel m = fit(ts, h);
    const Eigen::VectorXd g = lml_gradient(m);

    const double eps = 1e-5;
    for (int idx = 0; idx < h.param_count(); ++idx) {
      auto lml_at = [&](double sign) {
        auto hb = h;
        if (idx == 0)
          hb.signal_amplitude *= std::exp(sign * eps);
        else if (idx == 1)
          hb.noise_scale *= std::exp(sign * eps);
        else
          hb.length_scales[idx - 2] *= std::exp(sign * eps);
        return log_marginal_likelihood(fit(ts, hb));
      };
      const double fd = (lml_at(1.0) - lml_at(-1.0)) / (2.0 * eps);
      if (std::abs(fd) > 1e-7)
        CHECK(std::abs(g[idx] - fd) / std::abs(fd) < 1e-4);
      else
        CHECK(std::abs(g[idx] - fd) < 1e-6);
    }

    // zero targets zero out the data-fit term; the gradient must equal the
    // pure complexity gradient, checked via finite differences already.
    auto ts0 = ts;
    for (auto& [x, q] : ts0) q = 0.0;
    const Eigen::VectorXd g0 = lml_gradient(fit(ts0, h));
    CHECK(g0.size() == g.size());
  }
}

TEST_CASE("ard improves the likelihood and never degrades it") {
  Rng rng(8);
  auto h = se_params(1, 1, 0.7, 0.5);
  h.length_scales << 2.5, 2.5;
  const auto ts = random_set(rng, 20, 1, 1);
  const double lml0 = log_marginal_likelihood(fit(ts, h));

  const ArdResult res = ard_optimize(ts, h, {50, 1e-6});
  CHECK(log_marginal_likelihood(fit(ts, res.hyper)) >= lml0 - 1e-9);
  for (std::size_t i = 1; i < res.lml_trace.size(); ++i)
    CHECK(res.lml_trace[i] >= res.lml_trace[i - 1]);
}

TEST_CASE("ard is a no-op at an optimum") {
  Rng rng(9);
  auto h = se_params(1, 1, 1.0, 0.3);
  const auto ts = random_set(rng, 15, 1, 1);
  const ArdResult first = ard_optimize(ts, h, {80, 1e-7});
  const double lml_star = log_marginal_likelihood(fit(ts, first.hyper));
  const ArdResult second = ard_optimize(ts, first.hyper, {80, 1e-7});
  const double lml_again = log_marginal_likelihood(fit(ts, second.hyper));
  CHECK(lml_again >= lml_star - 1e-9);
  CHECK(lml_again - lml_star < 0.05 * (std::abs(lml_star) + 1.0));
}

TEST_CASE("ard recovers a known generative length scale") {
  Rng rng(10);
  auto truth = se_params(1, 1, 1.0, 0.1);
  // inputs spread over a few length scales
  std::vector<AugmentedState> xs;
  for (int i = 0; i < 40; ++i) xs.push_back(random_aug(rng, 1, 1, 6.0));
  Eigen::MatrixXd K = gram_matrix(xs, truth);
  K.diagonal().array() += 1e-10;
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(K).matrixL();
  Eigen::VectorXd z(40);
  for (int i = 0; i < 40; ++i) z[i] = rng.normal();
  const Eigen::VectorXd q = L * z;

  TrainingSet ts;
  for (int i = 0; i < 40; ++i) ts.emplace_back(xs[static_cast<std::size_t>(i)], q[i]);

  auto h0 = se_params(1, 1, 0.5, 0.2);
  h0.length_scales << 3.0, 3.0;
  const ArdResult res = ard_optimize(ts, h0, {120, 1e-7});
  for (int d = 0; d < 2; ++d) {
    CHECK(res.hyper.length_scales[d] > 0.7);
    CHECK(res.hyper.length_scales[d] < 1.3);
  }
}

TEST_CASE("nadaraya-watson weights and estimate") {
  const auto h = se_params(1, 1, 2.0, 0.3);
  const auto x1 = point1d(1.0, 1.0);

  const auto solo = nadaraya_watson({{x1, 3.5}}, x1, h);
  CHECK(solo.weights[0] == doctest::Approx(1.0));
  CHECK(solo.estimate == doctest::Approx(3.5));

  // two equidistant particles average their targets
  const auto left = point1d(0.0, 0.0);
  const auto right = point1d(2.0, 2.0);
  const auto mid = nadaraya_watson({{left, 0.0}, {right, 4.0}}, x1, h);
  CHECK(mid.estimate == doctest::Approx(2.0));

  Rng rng(11);
  const auto ts = random_set(rng, 12, 1, 1);
  double qmin = 1e300, qmax = -1e300;
  for (const auto& [x, q] : ts) {
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
  }
  for (int t = 0; t < 200; ++t) {
    const auto res = nadaraya_watson(ts, random_aug(rng, 1, 1), h);
    CHECK(res.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.weights.minCoeff() >= 0.0);
    CHECK(res.estimate >= qmin - 1e-9);
    CHECK(res.estimate <= qmax + 1e-9);
  }

  // hopeless queries underflow every weight
  const auto far = point1d(1e6, 1e6);
  CHECK_THROWS_AS(nadaraya_watson(ts, far, h), DegenerateQueryError);
}
