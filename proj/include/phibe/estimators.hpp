#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "phibe/dynamics.hpp"
#include "phibe/fdcoeff.hpp"

namespace phibe {

// Drift/diffusion surrogates anchored at a state s.
struct LocalDynamicsEstimate {
  Eigen::VectorXd mu_bar;     // state/time
  Eigen::MatrixXd sigma_bar;  // state^2/time, symmetric
  Eigen::VectorXd anchor;
};

// Exact conditional transition moments of a model, as functions of elapsed
// time t and start state s:
//   first(t, s)  = E[s_t - s_0 | s_0 = s]
//   second(t, s) = E[(s_t - s_0)(s_t - s_0)^T | s_0 = s]
struct TransitionMomentProvider {
  std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& s)> first;
  std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& s)> second;

  static TransitionMomentProvider ou(double lambda, double sigma);
  static TransitionMomentProvider linear1d(double lambda);
  static TransitionMomentProvider linear_nd(Eigen::MatrixXd A, Eigen::MatrixXd Sigma);
  // Deterministic flow integrated with explicit Euler steps of size <= max_step.
  static TransitionMomentProvider deterministic_flow(DynamicsModel model, double max_step);
  // Monte Carlo moments from Euler-Maruyama sampling; reproducible in (t, s).
  static TransitionMomentProvider monte_carlo(DynamicsModel model, double max_step, int samples,
                                              std::uint64_t seed);
};

// mu_bar: (1/dt) sum_{k=1..i} a_k (window[k] - window[0]).
// window holds i+1 consecutive states as rows.
Eigen::VectorXd mu_bar(const Eigen::MatrixXd& window, double dt, const FdCoefficients& coeffs);

// sigma_bar: (1/dt) sum_{k=1..i} a_k (window[k] - window[0])(window[k] - window[0])^T.
Eigen::MatrixXd sigma_bar(const Eigen::MatrixXd& window, double dt, const FdCoefficients& coeffs);

LocalDynamicsEstimate model_mu_sigma_hat(const TransitionMomentProvider& provider,
                                         const Eigen::VectorXd& s, double dt,
                                         const FdCoefficients& coeffs);

struct OrderCheck {
  std::vector<double> dts;
  std::vector<double> errors;  // sup-norm drift estimation error per dt
  double slope;                // log-log fit; NaN when errors vanish
};

// Sup-norm error of the order-i drift surrogate against the true linear drift,
// evaluated from the exact flow (no sampling).
OrderCheck estimator_order_check(const DynamicsModel& model, const FdCoefficients& coeffs,
                                 const std::vector<double>& dt_grid);

}  // namespace phibe
