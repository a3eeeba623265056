#include <cmath>
#include <random>

#include "doctest.h"
#include "phibe/estimators.hpp"
#include "phibe/rng.hpp"

using namespace phibe;

namespace {
Eigen::MatrixXd window1d(std::initializer_list<double> vals) {
  Eigen::MatrixXd w(static_cast<int>(vals.size()), 1);
  int i = 0;
  for (double v : vals) w(i++, 0) = v;
  return w;
}
}  // namespace

TEST_CASE("mu_bar: hand-evaluated windows") {
  CHECK(mu_bar(window1d({0.0, 0.5}), 0.5, fd_coefficients(1))(0) == doctest::Approx(1.0));
  CHECK(mu_bar(window1d({0.0, 0.5, 1.2}), 0.5, fd_coefficients(2))(0) ==
        doctest::Approx(0.8).epsilon(1e-12));

  // exact linear flow window, lambda = 0.05, dt = 5
  const double e = std::exp(0.25);
  CHECK(mu_bar(window1d({1.0, e}), 5.0, fd_coefficients(1))(0) ==
        doctest::Approx(0.0568051).epsilon(1e-5));

  CHECK_THROWS(mu_bar(window1d({0.0, 0.5}), 5.0, fd_coefficients(2)));
  CHECK_THROWS(mu_bar(window1d({0.0, 0.5, 1.0}), 0.0, fd_coefficients(2)));
}

TEST_CASE("sigma_bar: hand-evaluated windows") {
  CHECK(sigma_bar(window1d({0.0, 0.5}), 0.5, fd_coefficients(1))(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sigma_bar(window1d({0.7, 0.7, 0.7}), 1.0, fd_coefficients(2))(0, 0) == 0.0);
  // noiseless linear motion cancels at order 2: 2*1 - 0.5*4 = 0
  CHECK(sigma_bar(window1d({0.0, 1.0, 2.0}), 1.0, fd_coefficients(2))(0, 0) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sigma_bar: exact symmetry in d = 3") {
  Eigen::MatrixXd w(3, 3);
  w << 0.1, -0.4, 0.9, 0.3, 0.2, 1.1, -0.2, 0.5, 0.8;
  const Eigen::MatrixXd S = sigma_bar(w, 0.25, fd_coefficients(2));
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model_mu_sigma_hat: OU first-order moments") {
  const TransitionMomentProvider prov = TransitionMomentProvider::ou(0.05, 1.0);
  const LocalDynamicsEstimate est =
      model_mu_sigma_hat(prov, Eigen::VectorXd::Constant(1, 1.0), 1.0, fd_coefficients(1));
  CHECK(est.mu_bar(0) == doctest::Approx(0.0512711).epsilon(1e-5));
  // E[(s_dt - s)^2] = Var + shift^2 = 1.0517092 + 0.0512711^2
  CHECK(est.sigma_bar(0, 0) == doctest::Approx(1.0543379).epsilon(1e-6));
  CHECK(est.anchor(0) == 1.0);
}

TEST_CASE("model_mu_sigma_hat: deterministic provider has drift-squared sigma") {
  const double lambda = 0.3, dt = 0.5, s = 1.3;
  const TransitionMomentProvider prov = TransitionMomentProvider::linear1d(lambda);
  const FdCoefficients c2 = fd_coefficients(2);
  const LocalDynamicsEstimate est =
      model_mu_sigma_hat(prov, Eigen::VectorXd::Constant(1, s), dt, c2);
  double expected = 0.0;
  for (int j = 1; j <= 2; ++j) {
    const double shift = (std::exp(lambda * j * dt) - 1.0) * s;
    expected += c2.weights[j] * shift * shift / dt;
  }
  CHECK(est.sigma_bar(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("model_mu_sigma_hat: dt -> 0 recovers the drift at first order") {
  const double lambda = 0.05;
  const TransitionMomentProvider prov = TransitionMomentProvider::linear1d(lambda);
  const FdCoefficients c1 = fd_coefficients(1);
  for (double s : {-2.0, 0.5, 3.0}) {
    const Eigen::VectorXd sv = Eigen::VectorXd::Constant(1, s);
    const double e2 = std::abs(model_mu_sigma_hat(prov, sv, 1e-2, c1).mu_bar(0) - lambda * s);
    const double e3 = std::abs(model_mu_sigma_hat(prov, sv, 1e-3, c1).mu_bar(0) - lambda * s);
    CHECK(e2 <= 0.01 * std::abs(lambda * s) + 1e-12);
    if (s != 0.0) CHECK(e3 <= 0.2 * e2);
  }
}

TEST_CASE("estimator_order_check: slopes match the estimator order") {
  const DynamicsModel model = DynamicsModel::linear1d(0.05);
  const std::vector<double> grid = {5.0, 2.5, 1.25, 0.625};
  const OrderCheck o1 = estimator_order_check(model, fd_coefficients(1), grid);
  CHECK(std::abs(o1.slope - 1.0) <= 0.15);
  const OrderCheck o2 = estimator_order_check(model, fd_coefficients(2), grid);
  CHECK(std::abs(o2.slope - 2.0) <= 0.2);
  const OrderCheck o3 = estimator_order_check(model, fd_coefficients(3), grid);
  CHECK(std::abs(o3.slope - 3.0) <= 0.25);

  CHECK_THROWS(estimator_order_check(model, fd_coefficients(1), {1.0, 0.5}));

  const DynamicsModel zero = DynamicsModel::linear1d(0.0);
  const OrderCheck oz = estimator_order_check(zero, fd_coefficients(1), grid);
  for (double e : oz.errors) CHECK(e == 0.0);
  CHECK(std::isnan(oz.slope));
}

TEST_CASE("mu_bar / sigma_bar are unbiased for the model-based surrogates") {
  const double lambda = -0.25, sigma = 0.5, dt = 0.5, s0 = 0.8;
  const FdCoefficients c1 = fd_coefficients(1);
  const TransitionMomentProvider prov = TransitionMomentProvider::ou(lambda, sigma);
  const LocalDynamicsEstimate target =
      model_mu_sigma_hat(prov, Eigen::VectorXd::Constant(1, s0), dt, c1);

  const OuMoments m = ou_transition_moments(lambda, sigma, s0, dt);
  auto rng = make_stream(2024, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 100000;
  double acc_mu = 0.0, acc_sd = 0.0, acc_mu2 = 0.0, acc_sd2 = 0.0;
  Eigen::MatrixXd w(2, 1);
  w(0, 0) = s0;
  for (int i = 0; i < n; ++i) {
    w(1, 0) = m.mean + std::sqrt(m.variance) * gauss(rng);
    const double mb = mu_bar(w, dt, c1)(0);
    const double sb = sigma_bar(w, dt, c1)(0, 0);
    acc_mu += mb;
    acc_mu2 += mb * mb;
    acc_sd += sb;
    acc_sd2 += sb * sb;
  }
  const double mu_mean = acc_mu / n, sd_mean = acc_sd / n;
  const double mu_se = std::sqrt((acc_mu2 / n - mu_mean * mu_mean) / n);
  const double sd_se = std::sqrt((acc_sd2 / n - sd_mean * sd_mean) / n);
  CHECK(std::abs(mu_mean - target.mu_bar(0)) <= 4 * mu_se);
  CHECK(std::abs(sd_mean - target.sigma_bar(0, 0)) <= 4 * sd_se);
}

TEST_CASE("monte_carlo provider: reproducible and consistent with closed form") {
  const DynamicsModel model = DynamicsModel::ou1d(-0.25, 0.5);
  const TransitionMomentProvider mc =
      TransitionMomentProvider::monte_carlo(model, 1e-2, 40000, 77);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 0.8);

  const Eigen::VectorXd f1 = mc.first(0.5, s);
  const Eigen::VectorXd f2 = mc.first(0.5, s);
  CHECK(f1(0) == f2(0));

  const OuMoments m = ou_transition_moments(-0.25, 0.5, 0.8, 0.5);
  const double se = std::sqrt(m.variance / 40000.0);
  CHECK(std::abs(f1(0) - (m.mean - 0.8)) <= 4 * se + 2e-3);

  const Eigen::MatrixXd s2 = mc.second(0.5, s);
  const double exact2 = m.variance + (m.mean - 0.8) * (m.mean - 0.8);
  CHECK(std::abs(s2(0, 0) - exact2) <= 0.05 * exact2 + 2e-3);
}

TEST_CASE("deterministic_flow provider matches the exact linear flow") {
  const DynamicsModel model = DynamicsModel::linear1d(0.05);
  const TransitionMomentProvider flow = TransitionMomentProvider::deterministic_flow(model, 1e-4);
  const TransitionMomentProvider exact = TransitionMomentProvider::linear1d(0.05);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(std::abs(flow.first(1.0, s)(0) - exact.first(1.0, s)(0)) <= 1e-5);
  CHECK(std::abs(flow.second(1.0, s)(0, 0) - exact.second(1.0, s)(0, 0)) <= 1e-4);
}

TEST_CASE("linear_nd provider: moments match the d = 1 OU provider") {
  Eigen::MatrixXd A(1, 1), Sigma(1, 1);
  A << -0.25;
  Sigma << 0.25;
  const TransitionMomentProvider nd = TransitionMomentProvider::linear_nd(A, Sigma);
  const TransitionMomentProvider ou = TransitionMomentProvider::ou(-0.25, 0.5);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 1.4);
  for (double t : {0.3, 0.6}) {
    CHECK(nd.first(t, s)(0) == doctest::Approx(ou.first(t, s)(0)).epsilon(1e-10));
    CHECK(nd.second(t, s)(0, 0) == doctest::Approx(ou.second(t, s)(0, 0)).epsilon(1e-10));
  }
}
