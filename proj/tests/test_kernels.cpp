#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "grl/errors.hpp"
#include "grl/kernels.hpp"
#include "grl/rng.hpp"

using namespace grl;

namespace {

KernelHyperparameters se_params(int m, int n, double amp = 1.0,
                                double noise = 0.0) {
  KernelHyperparameters h;
  h.kind = KernelKind::SquaredExponentialJoint;
  h.state_dim = m;
  h.action_dim = n;
  h.signal_amplitude = amp;
  h.noise_scale = noise;
  h.length_scales = Eigen::VectorXd::Ones(m + n);
  return h;
}

AugmentedState make_aug(std::initializer_list<double> s,
                        std::initializer_list<double> a) {
  Eigen::VectorXd sv(static_cast<Eigen::Index>(s.size()));
  Eigen::VectorXd av(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (double v : s) sv[i++] = v;
  i = 0;
  for (double v : a) av[i++] = v;
  return {sv, av};
}

AugmentedState random_aug(Rng& rng, int m, int n, double span = 4.0) {
  Eigen::VectorXd s(m), a(n);
  for (int i = 0; i < m; ++i) s[i] = rng.uniform(0.0, span);
  for (int i = 0; i < n; ++i) a[i] = rng.uniform(0.0, span);
  return {s, a};
}

}  // namespace

TEST_CASE("kernel_value basics") {
  const auto h = se_params(1, 1);
  const auto x = make_aug({0.3}, {1.2});

  // zero distance, theta0 = 1
  CHECK(kernel_value(x, x, h) == doctest::Approx(1.0));

  // hand evaluation of the SE exponent at unit distance
  const auto h2 = se_params(2, 0);
  const auto a = make_aug({0.0, 0.0}, {});
  const auto b = make_aug({1.0, 0.0}, {});
  CHECK(kernel_value(a, b, h2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));

  // 9-dimensional joint inputs (3 state + 6 action coordinates)
  auto h9 = se_params(3, 6, 2.0, 0.5);
  Rng rng(1);
  const auto p = random_aug(rng, 3, 6);
  const auto q = random_aug(rng, 3, 6);
  CHECK(std::isfinite(kernel_value(p, q, h9, true)));
  CHECK(kernel_value(p, p, h9, true) == doctest::Approx(2.5));
}

TEST_CASE("kernel symmetry and product kernel form") {
  Rng rng(5);
  auto h = se_params(2, 2, 3.0, 0.25);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_aug(rng, 2, 2);
    const auto b = random_aug(rng, 2, 2);
    CHECK(kernel_value(a, b, h) == doctest::Approx(kernel_value(b, a, h)));
  }

  // The product kernel multiplies unit-amplitude state/action SE factors
  // under the single leading amplitude.
  auto hp = h;
  hp.kind = KernelKind::ProductStateAction;
  const auto a = random_aug(rng, 2, 2);
  const auto b = random_aug(rng, 2, 2);
  double qs = 0.0, qa = 0.0;
  for (int d = 0; d < 2; ++d) {
    const double ds = a.state_vec[d] - b.state_vec[d];
    const double da = a.action_vec[d] - b.action_vec[d];
    qs += ds * ds / hp.length_scales[d];
    qa += da * da / hp.length_scales[2 + d];
  }
  const double expected =
      hp.signal_amplitude * std::exp(-0.5 * qs) * std::exp(-0.5 * qa);
  CHECK(kernel_value(a, b, hp) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("correlation is normalized and amplitude-free") {
  Rng rng(9);
  auto h = se_params(2, 1, 1.0, 0.3);
  const auto a = random_aug(rng, 2, 1);
  const auto b = random_aug(rng, 2, 1);

  CHECK(correlation(a, a, h) == doctest::Approx(1.0));

  // quadform = 2 gives exp(-1)
  auto h1 = se_params(1, 0);
  const auto p = make_aug({0.0}, {});
  const auto q = make_aug({std::sqrt(2.0)}, {});
  CHECK(correlation(p, q, h1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  auto h10 = h;
  h10.signal_amplitude = 10.0;
  CHECK(correlation(a, b, h) == doctest::Approx(correlation(a, b, h10)));

  for (int t = 0; t < 50; ++t) {
    const double c = correlation(random_aug(rng, 2, 1), random_aug(rng, 2, 1), h);
    CHECK(c > 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("shrinking a length scale decreases correlation of differing pairs") {
  auto h = se_params(2, 0);
  const auto a = make_aug({0.0, 0.5}, {});
  const auto b = make_aug({0.7, 0.5}, {});
  const double before = correlation(a, b, h);
  h.length_scales[0] = 0.5;
  CHECK(correlation(a, b, h) < before);
  // a coordinate with no difference leaves correlation unchanged
  auto h2 = se_params(2, 0);
  h2.length_scales[1] = 0.25;
  CHECK(correlation(a, b, h2) == doctest::Approx(before));
}

TEST_CASE("gram matrix: noise diagonal, symmetry, eigenvalue floor, jitter") {
  const auto h = se_params(1, 1, 1.0, 0.1);
  const auto single = gram_matrix({make_aug({0.0}, {0.0})}, h);
  CHECK(single.rows() == 1);
  CHECK(single(0, 0) == doctest::Approx(1.1));

  Rng rng(21);
  std::vector<AugmentedState> pts;
  for (int i = 0; i < 12; ++i) pts.push_back(random_aug(rng, 1, 1));
  const auto K = gram_matrix(pts, h);
  CHECK(K.isApprox(K.transpose()));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  CHECK(eig.eigenvalues().minCoeff() >= 0.1 - 1e-9);

  // jittered Cholesky succeeds on every test configuration
  Eigen::MatrixXd Kj = K;
  Kj.diagonal().array() += 1e-8 * h.signal_amplitude;
  Eigen::LLT<Eigen::MatrixXd> llt(Kj);
  CHECK(llt.info() == Eigen::Success);

  CHECK_THROWS_AS(gram_matrix({}, h), PreconditionError);
}

TEST_CASE("kernel_param_gradient matches central finite differences") {
  Rng rng(33);
  for (const auto kind :
       {KernelKind::SquaredExponentialJoint, KernelKind::ProductStateAction}) {
    auto h = se_params(2, 2, 1.7, 0.2);
    h.kind = kind;
    h.length_scales << 0.8, 1.3, 0.6, 2.0;
    const auto x = random_aug(rng, 2, 2);
    const auto x2 = random_aug(rng, 2, 2);

    // d k / d log theta0 equals the noise-free value
    CHECK(kernel_param_gradient(x, x2, h, 0) ==
          doctest::Approx(kernel_value(x, x2, h, false)).epsilon(1e-12));
    // noise enters the diagonal only
    CHECK(kernel_param_gradient(x, x2, h, 1) == 0.0);
    CHECK(kernel_param_gradient(x, x, h, 1) == doctest::Approx(h.noise_scale));

    const double eps = 1e-6;
    for (int idx = 0; idx < h.param_count(); ++idx) {
      auto bump = [&](double sign) {
        auto hb = h;
        if (idx == 0)
          hb.signal_amplitude *= std::exp(sign * eps);
        else if (idx == 1)
          hb.noise_scale *= std::exp(sign * eps);
        else
          hb.length_scales[idx - 2] *= std::exp(sign * eps);
        // include the noise term exactly when the points coincide
        const bool diag = idx == 1;
        return kernel_value(x, diag ? x : x2, hb, diag);
      };
      const double fd = (bump(1.0) - bump(-1.0)) / (2.0 * eps);
      const double an =
          kernel_param_gradient(x, idx == 1 ? x : x2, h, idx);
      if (std::abs(fd) > 1e-12)
        CHECK(std::abs(an - fd) / std::abs(fd) < 1e-6);
      else
        CHECK(std::abs(an - fd) < 1e-9);
    }
    CHECK_THROWS_AS(kernel_param_gradient(x, x2, h, h.param_count()),
                    ConfigError);
  }
}

TEST_CASE("dimension mismatches raise configuration errors") {
  const auto h = se_params(2, 1);
  const auto bad = make_aug({0.0}, {0.0});
  const auto good = make_aug({0.0, 0.0}, {0.0});
  CHECK_THROWS_AS(kernel_value(bad, good, h), ConfigError);
  KernelHyperparameters invalid = h;
  invalid.signal_amplitude = 0.0;
  CHECK_THROWS_AS(invalid.validate(), ConfigError);
}
