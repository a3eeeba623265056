#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "phibe/galerkin.hpp"
#include "phibe/modelfree.hpp"
#include "phibe/rng.hpp"

using namespace phibe;

namespace {

Trajectory make_traj(std::initializer_list<double> states, double dt) {
  Trajectory t;
  t.states.resize(static_cast<Eigen::Index>(states.size()), 1);
  Eigen::Index i = 0;
  for (double s : states) t.states(i++, 0) = s;
  t.dt = dt;
  return t;
}

Eigen::VectorXd const_rewards(int n, double r) { return Eigen::VectorXd::Constant(n, r); }

}  // namespace

TEST_CASE("accumulate_phibe: constant basis isolates beta theta = r") {
  const BasisSet basis = BasisSet::monomial1d(0);
  const double beta = 0.8, r = 0.3;
  EmpiricalSystem sys(1);
  const Trajectory traj = make_traj({0.2, 0.5, 0.1}, 0.5);
  accumulate_phibe(sys, traj, const_rewards(3, r), beta, fd_coefficients(1), basis, true);
  const ValueApprox va = solve_empirical(sys, basis);
  CHECK(va.theta(0) == doctest::Approx(r / beta).epsilon(1e-14));
}

TEST_CASE("accumulate_lstd: constant basis gives the discounted-sum fixed point") {
  const BasisSet basis = BasisSet::monomial1d(0);
  const double beta = 0.8, r = 0.3, dt = 0.5;
  EmpiricalSystem sys(1);
  accumulate_lstd(sys, make_traj({0.2, 0.5, 0.1}, dt), const_rewards(3, r), beta, basis);
  const ValueApprox va = solve_empirical(sys, basis);
  CHECK(va.theta(0) == doctest::Approx(r * dt / (1.0 - std::exp(-beta * dt))).epsilon(1e-14));
}

TEST_CASE("accumulate_pairs_first_order: frozen pairs reduce to a weighted projection") {
  const BasisSet basis = BasisSet::monomial1d(2);
  const double beta = 0.6;
  const int n = 7;
  TransitionPairs pairs;
  pairs.starts.resize(n, 1);
  pairs.rewards.resize(n);
  for (int i = 0; i < n; ++i) {
    pairs.starts(i, 0) = -1.0 + 2.0 * i / (n - 1);
    pairs.rewards(i) = std::sin(1.0 + i);
  }
  pairs.ends = pairs.starts;  // s' = s: mu_bar and Sigma_bar vanish
  pairs.dt = 0.25;

  EmpiricalSystem sys(basis.p);
  accumulate_pairs_first_order(sys, pairs, beta, basis);

  EmpiricalSystem direct(basis.p);
  Eigen::VectorXd phi(basis.p);
  for (int i = 0; i < n; ++i) {
    basis.value(pairs.starts.row(i).transpose(), phi);
    direct.add(phi, beta * phi, pairs.rewards(i));
  }
  CHECK((sys.normalized().A - direct.normalized().A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.normalized().b - direct.normalized().b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("EmpiricalSystem: duplicated data leaves the normalized system fixed") {
  const BasisSet basis = BasisSet::fourier(2);
  const Trajectory traj = make_traj({0.3, -0.2, 0.9, 1.4}, 0.4);
  const RewardFn reward = [](const Eigen::VectorXd& s) { return std::cos(s(0)); };

  EmpiricalSystem once(basis.p), twice(basis.p);
  accumulate_phibe(once, traj, reward, 0.5, fd_coefficients(2), basis, true);
  accumulate_phibe(twice, traj, reward, 0.5, fd_coefficients(2), basis, true);
  accumulate_phibe(twice, traj, reward, 0.5, fd_coefficients(2), basis, true);
  CHECK(twice.count == 2 * once.count);
  CHECK((once.normalized().A - twice.normalized().A).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((once.normalized().b - twice.normalized().b).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("EmpiricalSystem: accumulation order does not matter") {
  const BasisSet basis = BasisSet::fourier(3);
  const RewardFn reward = [](const Eigen::VectorXd& s) { return std::cos(s(0)) + 0.2 * s(0); };
  const DynamicsModel model = DynamicsModel::ou1d(0.05, 1.0);
  std::vector<Trajectory> trajs;
  for (int j = 0; j < 20; ++j) {
    const Eigen::VectorXd s0 = Eigen::VectorXd::Constant(1, -3.0 + 0.3 * j);
    trajs.push_back(sample_trajectory_exact(model, s0, 0.5, 4, 900 + j));
  }

  EmpiricalSystem fwd(basis.p), rev(basis.p);
  for (const Trajectory& t : trajs)
    accumulate_phibe(fwd, t, reward, 0.5, fd_coefficients(2), basis, true);
  for (auto it = trajs.rbegin(); it != trajs.rend(); ++it)
    accumulate_phibe(rev, *it, reward, 0.5, fd_coefficients(2), basis, true);

  const double scale = fwd.normalized().A.cwiseAbs().maxCoeff();
  CHECK((fwd.normalized().A - rev.normalized().A).cwiseAbs().maxCoeff() <= 1e-13 * scale);
  const ValueApprox a = solve_empirical(fwd, basis);
  const ValueApprox b = solve_empirical(rev, basis);
  CHECK((a.theta - b.theta).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("EmpiricalSystem: merging disjoint halves equals one pass") {
  const BasisSet basis = BasisSet::fourier(2);
  const RewardFn reward = [](const Eigen::VectorXd& s) { return std::sin(s(0)); };
  const DynamicsModel model = DynamicsModel::ou1d(-0.2, 0.7);
  std::vector<Trajectory> trajs;
  for (int j = 0; j < 12; ++j)
    trajs.push_back(sample_trajectory_exact(model, Eigen::VectorXd::Constant(1, 0.1 * j), 0.3, 3,
                                            70 + j));

  EmpiricalSystem full(basis.p), lo(basis.p), hi(basis.p);
  for (int j = 0; j < 12; ++j) {
    accumulate_phibe(full, trajs[j], reward, 0.4, fd_coefficients(1), basis, true);
    accumulate_phibe(j < 6 ? lo : hi, trajs[j], reward, 0.4, fd_coefficients(1), basis, true);
  }
  lo.merge(hi);
  CHECK(lo.count == full.count);
  const double scale = full.normalized().A.cwiseAbs().maxCoeff();
  CHECK((lo.normalized().A - full.normalized().A).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  CHECK((lo.normalized().b - full.normalized().b).cwiseAbs().maxCoeff() <= 1e-12);

  EmpiricalSystem other(basis.p + 1);
  CHECK_THROWS_AS(lo.merge(other), std::invalid_argument);
}

TEST_CASE("EmpiricalSystem: reward scaling by a power of two is exact") {
  const BasisSet basis = BasisSet::monomial1d(2);
  const Trajectory traj = make_traj({0.3, -0.2, 0.9, 1.4, 0.6}, 0.4);
  const RewardFn r1 = [](const Eigen::VectorXd& s) { return std::cos(s(0)) + 0.1; };
  const RewardFn r4 = [&r1](const Eigen::VectorXd& s) { return 4.0 * r1(s); };

  EmpiricalSystem s1(basis.p), s4(basis.p);
  accumulate_phibe(s1, traj, r1, 0.5, fd_coefficients(2), basis, true);
  accumulate_phibe(s4, traj, r4, 0.5, fd_coefficients(2), basis, true);
  const Eigen::VectorXd t1 = solve_empirical(s1, basis).theta;
  const Eigen::VectorXd t4 = solve_empirical(s4, basis).theta;
  CHECK((t4 - 4.0 * t1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("EmpiricalSystem: input validation") {
  const BasisSet basis = BasisSet::monomial1d(1);
  EmpiricalSystem sys(basis.p);
  CHECK_THROWS_AS(sys.normalized(), std::runtime_error);
  CHECK_THROWS_AS(EmpiricalSystem(0), std::invalid_argument);

  const Trajectory two = make_traj({0.0, 1.0}, 0.5);
  CHECK_THROWS_WITH_AS(
      accumulate_phibe(sys, two, const_rewards(2, 1.0), 0.5, fd_coefficients(2), basis, false),
      doctest::Contains("shorter"), std::invalid_argument);
  CHECK_THROWS_AS(
      accumulate_phibe(sys, two, const_rewards(5, 1.0), 0.5, fd_coefficients(1), basis, false),
      std::invalid_argument);

  const Trajectory one = make_traj({0.0}, 0.5);
  CHECK_THROWS_AS(accumulate_lstd(sys, one, const_rewards(1, 1.0), 0.5, basis),
                  std::invalid_argument);

  TransitionPairs empty;
  empty.starts.resize(0, 1);
  empty.ends.resize(0, 1);
  empty.rewards.resize(0);
  empty.dt = 0.1;
  CHECK_THROWS_AS(accumulate_pairs_first_order(sys, empty, 0.5, basis), std::invalid_argument);
  CHECK_THROWS_AS(accumulate_lstd_pairs(sys, empty, 0.5, basis), std::invalid_argument);
}

TEST_CASE("solve_empirical: singular systems name the empirical context") {
  const BasisSet basis = BasisSet::monomial1d(2);
  EmpiricalSystem sys(basis.p);
  Eigen::VectorXd phi(basis.p);
  basis.value(Eigen::VectorXd::Constant(1, 0.5), phi);
  sys.add(phi, phi, 1.0);  // one rank-1 sample cannot determine 3 coefficients
  CHECK_THROWS_WITH_AS(solve_empirical(sys, basis), doctest::Contains("empirical system"),
                       std::runtime_error);
}

TEST_CASE("accumulate_lstd_pairs: matches accumulate_lstd on two-state trajectories") {
  const BasisSet basis = BasisSet::fourier(2);
  const double beta = 0.7, dt = 0.3;
  const int n = 9;
  TransitionPairs pairs;
  pairs.starts.resize(n, 1);
  pairs.ends.resize(n, 1);
  pairs.rewards.resize(n);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int i = 0; i < n; ++i) {
    pairs.starts(i, 0) = unif(gen);
    pairs.ends(i, 0) = unif(gen);
    pairs.rewards(i) = unif(gen);
  }
  pairs.dt = dt;

  EmpiricalSystem via_pairs(basis.p), via_traj(basis.p);
  accumulate_lstd_pairs(via_pairs, pairs, beta, basis);
  for (int i = 0; i < n; ++i) {
    Trajectory t = make_traj({pairs.starts(i, 0), pairs.ends(i, 0)}, dt);
    Eigen::VectorXd r(2);
    r << pairs.rewards(i), 0.0;  // the second state never anchors an update
    accumulate_lstd(via_traj, t, r, beta, basis);
  }
  CHECK(via_pairs.count == via_traj.count);
  CHECK((via_pairs.normalized().A - via_traj.normalized().A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((via_pairs.normalized().b - via_traj.normalized().b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("accumulate_phibe: population limit matches the model-based system") {
  // One window per trajectory keeps the anchor distribution exactly uniform,
  // so the empirical system is an unbiased Monte Carlo draw of the Galerkin
  // system with uniform rho. Ten independent batches give an error bar.
  const double lambda = 0.05, sigma = 1.0, beta = 0.1, dt = 1.0;
  const int order = 2, batches = 10, J = 400;
  const BasisSet basis = BasisSet::fourier(2);
  const DynamicsModel model = DynamicsModel::ou1d(lambda, sigma);
  const RewardFn reward = designed_reward_cos3(model, beta, 1.0);

  const Quadrature quad = gauss_legendre(-M_PI, M_PI, 400);
  const TransitionMomentProvider prov = TransitionMomentProvider::ou(lambda, sigma);
  const Eigen::VectorXd theta_star =
      solve(assemble_phibe(basis, prov, reward, beta, dt, order, quad, {}, true), basis).theta;

  Eigen::MatrixXd thetas(batches, basis.p);
  for (int b = 0; b < batches; ++b) {
    EmpiricalSystem sys(basis.p);
    std::mt19937_64 gen = make_stream(424242, static_cast<std::uint64_t>(b));
    std::uniform_real_distribution<double> unif(-M_PI, M_PI);
    for (int j = 0; j < J; ++j) {
      const Eigen::VectorXd s0 = Eigen::VectorXd::Constant(1, unif(gen));
      const Trajectory traj = sample_trajectory_exact(
          model, s0, dt, order, derive_stream_seed(424242, 100 + b * J + j));
      accumulate_phibe(sys, traj, reward, beta, fd_coefficients(order), basis, true);
    }
    CHECK(sys.count == J);
    thetas.row(b) = solve_empirical(sys, basis).theta.transpose();
  }
  for (int k = 0; k < basis.p; ++k) {
    const double mean = thetas.col(k).mean();
    const double var =
        (thetas.col(k).array() - mean).square().sum() / (batches - 1);
    const double se = std::sqrt(var / batches);
    CHECK(std::abs(mean - theta_star(k)) <= 4.0 * se + 2e-3);
  }
}

TEST_CASE("accumulate_phibe: deterministic flag drops the Hessian term") {
  const BasisSet basis = BasisSet::fourier(2);
  const DynamicsModel det = DynamicsModel::linear1d(0.05);
  const Trajectory traj =
      sample_trajectory_exact(det, Eigen::VectorXd::Constant(1, 1.2), 0.5, 4, 5);
  const RewardFn reward = [](const Eigen::VectorXd& s) { return std::cos(s(0)); };

  EmpiricalSystem with(basis.p), without(basis.p);
  accumulate_phibe(with, traj, reward, 0.5, fd_coefficients(1), basis, true);
  accumulate_phibe(without, traj, reward, 0.5, fd_coefficients(1), basis, false);
  // deterministic data still has nonzero quadratic variation estimates
  CHECK((with.normalized().A - without.normalized().A).cwiseAbs().maxCoeff() > 1e-12);
  CHECK((with.normalized().b - without.normalized().b).cwiseAbs().maxCoeff() == 0.0);
}
