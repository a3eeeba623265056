#include "phibe/modelfree.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "phibe/estimators.hpp"

namespace phibe {

namespace {

inline void kahan_add(double& sum, double& comp, double term) {
  const double y = term - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

void check_rewards(const Trajectory& traj, const Eigen::VectorXd& rewards, const char* who) {
  if (rewards.size() != traj.states.rows()) {
    std::ostringstream os;
    os << who << ": rewards misaligned with trajectory states (" << rewards.size() << " vs "
       << traj.states.rows() << ")";
    throw std::invalid_argument(os.str());
  }
}

Eigen::VectorXd eval_rewards(const Trajectory& traj, const RewardFn& reward) {
  Eigen::VectorXd r(traj.states.rows());
  for (Eigen::Index j = 0; j < traj.states.rows(); ++j)
    r(j) = reward(traj.states.row(j).transpose());
  return r;
}

}  // namespace

EmpiricalSystem::EmpiricalSystem(int p_dim) : p(p_dim) {
  if (p_dim < 1) throw std::invalid_argument("EmpiricalSystem: p must be >= 1");
  A_bar = Eigen::MatrixXd::Zero(p, p);
  A_comp = Eigen::MatrixXd::Zero(p, p);
  b_bar = Eigen::VectorXd::Zero(p);
  b_comp = Eigen::VectorXd::Zero(p);
}

void EmpiricalSystem::add(const Eigen::VectorXd& phi, const Eigen::VectorXd& row,
                          double reward_term) {
  for (int l = 0; l < p; ++l) {
    const double rl = row(l);
    for (int k = 0; k < p; ++k) kahan_add(A_bar(k, l), A_comp(k, l), phi(k) * rl);
  }
  for (int k = 0; k < p; ++k) kahan_add(b_bar(k), b_comp(k), reward_term * phi(k));
  ++count;
}

void EmpiricalSystem::merge(const EmpiricalSystem& other) {
  if (other.p != p) throw std::invalid_argument("EmpiricalSystem::merge: size mismatch");
  for (int l = 0; l < p; ++l)
    for (int k = 0; k < p; ++k) {
      kahan_add(A_bar(k, l), A_comp(k, l), other.A_bar(k, l));
      kahan_add(A_bar(k, l), A_comp(k, l), -other.A_comp(k, l));
    }
  for (int k = 0; k < p; ++k) {
    kahan_add(b_bar(k), b_comp(k), other.b_bar(k));
    kahan_add(b_bar(k), b_comp(k), -other.b_comp(k));
  }
  count += other.count;
}

LinearSystem EmpiricalSystem::normalized() const {
  if (count == 0) throw std::runtime_error("EmpiricalSystem: no data accumulated");
  LinearSystem sys;
  const double inv = 1.0 / static_cast<double>(count);
  sys.A = (A_bar - A_comp) * inv;
  sys.b = (b_bar - b_comp) * inv;
  return sys;
}

void accumulate_phibe(EmpiricalSystem& system, const Trajectory& traj,
                      const Eigen::VectorXd& rewards, double beta, const FdCoefficients& coeffs,
                      const BasisSet& basis, bool stochastic) {
  check_rewards(traj, rewards, "accumulate_phibe");
  const int i = coeffs.order;
  const Eigen::Index num_states = traj.states.rows();
  if (num_states < i + 1)
    throw std::invalid_argument("accumulate_phibe: trajectory shorter than order + 1");
  if (basis.d != traj.states.cols())
    throw std::invalid_argument("accumulate_phibe: basis dimension mismatch");

  const int p = basis.p;
  Eigen::VectorXd phi(p), row(p), gdot(p), hc(p);
  for (Eigen::Index j = 0; j + i < num_states; ++j) {
    const Eigen::MatrixXd window = traj.states.middleRows(j, i + 1);
    const Eigen::VectorXd anchor = window.row(0).transpose();
    const Eigen::VectorXd mu = mu_bar(window, traj.dt, coeffs);
    basis.value(anchor, phi);
    basis.grad_dot(anchor, mu, gdot);
    row = beta * phi - gdot;
    if (stochastic) {
      basis.hess_contract(anchor, sigma_bar(window, traj.dt, coeffs), hc);
      row -= 0.5 * hc;
    }
    system.add(phi, row, rewards(j));
  }
}

void accumulate_phibe(EmpiricalSystem& system, const Trajectory& traj, const RewardFn& reward,
                      double beta, const FdCoefficients& coeffs, const BasisSet& basis,
                      bool stochastic) {
  accumulate_phibe(system, traj, eval_rewards(traj, reward), beta, coeffs, basis, stochastic);
}

void accumulate_pairs_first_order(EmpiricalSystem& system, const TransitionPairs& pairs,
                                  double beta, const BasisSet& basis) {
  const Eigen::Index n = pairs.starts.rows();
  if (n == 0) throw std::invalid_argument("accumulate_pairs_first_order: no pairs");
  if (basis.d != pairs.starts.cols())
    throw std::invalid_argument("accumulate_pairs_first_order: basis dimension mismatch");

  const int p = basis.p;
  const double inv_dt = 1.0 / pairs.dt;
  Eigen::VectorXd phi(p), row(p), gdot(p), hc(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd s = pairs.starts.row(i).transpose();
    const Eigen::VectorXd delta = (pairs.ends.row(i) - pairs.starts.row(i)).transpose();
    basis.value(s, phi);
    basis.grad_dot(s, delta * inv_dt, gdot);
    basis.hess_contract(s, (delta * delta.transpose()) * inv_dt, hc);
    row = beta * phi - gdot - 0.5 * hc;
    system.add(phi, row, pairs.rewards(i));
  }
}

void accumulate_lstd(EmpiricalSystem& system, const Trajectory& traj,
                     const Eigen::VectorXd& rewards, double beta, const BasisSet& basis) {
  check_rewards(traj, rewards, "accumulate_lstd");
  const Eigen::Index num_states = traj.states.rows();
  if (num_states < 2) throw std::invalid_argument("accumulate_lstd: trajectory shorter than 2");
  if (basis.d != traj.states.cols())
    throw std::invalid_argument("accumulate_lstd: basis dimension mismatch");

  const int p = basis.p;
  const double gamma = std::exp(-beta * traj.dt);
  Eigen::VectorXd phi(p), phi_next(p), row(p);
  basis.value(traj.states.row(0).transpose(), phi);
  for (Eigen::Index j = 0; j + 1 < num_states; ++j) {
    basis.value(traj.states.row(j + 1).transpose(), phi_next);
    row = phi - gamma * phi_next;
    system.add(phi, row, rewards(j) * traj.dt);
    phi.swap(phi_next);
  }
}

void accumulate_lstd(EmpiricalSystem& system, const Trajectory& traj, const RewardFn& reward,
                     double beta, const BasisSet& basis) {
  accumulate_lstd(system, traj, eval_rewards(traj, reward), beta, basis);
}

void accumulate_lstd_pairs(EmpiricalSystem& system, const TransitionPairs& pairs, double beta,
                           const BasisSet& basis) {
  const Eigen::Index n = pairs.starts.rows();
  if (n == 0) throw std::invalid_argument("accumulate_lstd_pairs: no pairs");
  if (basis.d != pairs.starts.cols())
    throw std::invalid_argument("accumulate_lstd_pairs: basis dimension mismatch");

  const int p = basis.p;
  const double gamma = std::exp(-beta * pairs.dt);
  Eigen::VectorXd phi(p), phi_next(p), row(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis.value(pairs.starts.row(i).transpose(), phi);
    basis.value(pairs.ends.row(i).transpose(), phi_next);
    row = phi - gamma * phi_next;
    system.add(phi, row, pairs.rewards(i) * pairs.dt);
  }
}

ValueApprox solve_empirical(const EmpiricalSystem& system, const BasisSet& basis) {
  if (system.count < system.p)
    std::cerr << "solve_empirical: warning: only " << system.count << " windows for " << system.p
              << " basis functions\n";
  try {
    return solve(system.normalized(), basis);
  } catch (const std::runtime_error& e) {
    std::ostringstream os;
    os << e.what() << " [empirical system, count=" << system.count << "]";
    throw std::runtime_error(os.str());
  }
}

}  // namespace phibe
