#pragma once

#include <Eigen/Dense>

#include "phibe/basis.hpp"
#include "phibe/dynamics.hpp"
#include "phibe/fdcoeff.hpp"
#include "phibe/galerkin.hpp"

namespace phibe {

// Accumulator for the empirical Galerkin systems. Uses compensated summation
// so that millions of rank-1 updates keep ~full double precision; partial
// accumulators over disjoint data merge by addition.
struct EmpiricalSystem {
  Eigen::MatrixXd A_bar, A_comp;
  Eigen::VectorXd b_bar, b_comp;
  long long count = 0;
  int p = 0;

  explicit EmpiricalSystem(int p_dim);

  void add(const Eigen::VectorXd& phi, const Eigen::VectorXd& row, double reward_term);
  void merge(const EmpiricalSystem& other);
  // A_bar/count, b_bar/count with the compensation folded in.
  LinearSystem normalized() const;
};

// Algorithms 1-2: one rank-1 update per window j = 0..m-order. The Hessian
// (Sigma_bar) term enters only when stochastic is set. rewards must hold one
// sample per trajectory state (anchors use rewards[j]).
void accumulate_phibe(EmpiricalSystem& system, const Trajectory& traj,
                      const Eigen::VectorXd& rewards, double beta, const FdCoefficients& coeffs,
                      const BasisSet& basis, bool stochastic);
void accumulate_phibe(EmpiricalSystem& system, const Trajectory& traj, const RewardFn& reward,
                      double beta, const FdCoefficients& coeffs, const BasisSet& basis,
                      bool stochastic);

// First-order estimator from independent transition pairs:
// mu_bar = (s'-s)/dt, Sigma_bar = (s'-s)(s'-s)^T/dt.
void accumulate_pairs_first_order(EmpiricalSystem& system, const TransitionPairs& pairs,
                                  double beta, const BasisSet& basis);

// LSTD: A += Phi(s_j)[Phi(s_j) - e^{-beta dt} Phi(s_{j+1})]^T, b += r_j dt Phi(s_j).
void accumulate_lstd(EmpiricalSystem& system, const Trajectory& traj,
                     const Eigen::VectorXd& rewards, double beta, const BasisSet& basis);
void accumulate_lstd(EmpiricalSystem& system, const Trajectory& traj, const RewardFn& reward,
                     double beta, const BasisSet& basis);
// Same update with each pair treated as a 2-state trajectory.
void accumulate_lstd_pairs(EmpiricalSystem& system, const TransitionPairs& pairs, double beta,
                           const BasisSet& basis);

// Solves the normalized system; warns when count < p.
ValueApprox solve_empirical(const EmpiricalSystem& system, const BasisSet& basis);

}  // namespace phibe
