#pragma once

#include <Eigen/Dense>
#include <functional>

#include "phibe/basis.hpp"
#include "phibe/dynamics.hpp"
#include "phibe/estimators.hpp"
#include "phibe/metrics.hpp"
#include "phibe/quadrature.hpp"

namespace phibe {

struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double conditioning = 0.0;  // filled by solve()
};

struct ValueApprox {
  Eigen::VectorXd theta;
  BasisSet basis;
  double residual = 0.0;
  double condition = 0.0;

  double value(const Eigen::VectorXd& s) const;
  ValueFn evaluator() const;
};

using StepMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Conditional expectation of every basis function one transition ahead:
// expect_phi(basis, s) = E[Phi(s') | s].
struct TransitionKernel {
  std::function<Eigen::VectorXd(const BasisSet&, const Eigen::VectorXd&)> expect_phi;

  static TransitionKernel deterministic_map(StepMap step);
  // Gaussian OU transition integrated with Gauss-Hermite quadrature.
  static TransitionKernel ou_gauss(double lambda, double sigma, double dt, int gh_nodes = 64);
  // Closed-form Gaussian moments for the PolynomialUpTo2 basis.
  static TransitionKernel linear_nd_poly2(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                                          double dt);
};

// A[k][l] = <beta phi_l - mu_hat_i . grad phi_l - [stochastic] 1/2 Sigma_hat_i : hess phi_l, phi_k>_rho
// b[k]    = <r, phi_k>_rho
LinearSystem assemble_phibe(const BasisSet& basis, const TransitionMomentProvider& provider,
                            const RewardFn& reward, double beta, double dt, int order,
                            const Quadrature& quad, const WeightFn& weight, bool stochastic);

// Same bilinear form with the exact generator (mu, Sigma given directly);
// pass an empty Sigma callback for deterministic dynamics.
LinearSystem assemble_generator(const BasisSet& basis,
                                const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& mu,
                                const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& Sigma,
                                const RewardFn& reward, double beta, const Quadrature& quad,
                                const WeightFn& weight);

// A[k][l] = <phi_l - e^{-beta dt} E[phi_l(s')|s], phi_k>_rho, b[k] = <r dt, phi_k>_rho
LinearSystem assemble_be_projection(const BasisSet& basis, const TransitionKernel& kernel,
                                    const RewardFn& reward, double beta, double dt,
                                    const Quadrature& quad, const WeightFn& weight);

// V~(s) = sum_{i=0}^{I} e^{-beta dt i} r(step^i(s)) dt
ValueFn be_rollout_deterministic(const RewardFn& reward, StepMap step, double beta, double dt,
                                 int horizon_steps);

// Truncation bound of the rollout: sum_{i>I} e^{-beta dt i} |r| dt <= this.
double rollout_tail_bound(double beta, double dt, int horizon_steps, double r_max);

// theta = A^{-1} b via column-pivoted QR; refuses condition > 1e12 and
// enforces the residual contract |A theta - b| <= 1e-8 (|A||theta| + |b|).
ValueApprox solve(const LinearSystem& system, const BasisSet& basis);

// ---- analytic LQ references ----

struct LqTrue {
  double R = 0, lambda = 0, a1 = 0, a2 = 0;  // V(s) = a1 s^2 + a2
};
struct LqBe {
  double a1R = 0, a0R = 0, gamma = 0, sigma_hat_sq = 0;
};
struct LqPhibe {
  double a1P = 0, a0P = 0, lambda_hat = 0, eta = 0, sigma_hat_sq = 0;
};
struct LyapunovValue {
  Eigen::MatrixXd P;
  double c = 0;  // V(s) = s^T P s + c, c = tr(Sigma P)/beta
  double residual = 0;
};

LqTrue lq_true_value(double q, double r_ctrl, double K, double alpha, double b_ctrl, double sigma,
                     double beta);
LqBe lq_be_value(double R, double lambda, double sigma, double beta, double dt);
LqPhibe lq_phibe_value(double R, double lambda, double sigma, double beta, double dt);
// P solves A^T P + P A - beta P = -Q.
LyapunovValue lq_true_value_nd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                               const Eigen::MatrixXd& Q, double beta);

// ---- designed oscillatory benchmark ----

// V(s) = cos^3(k s)
ValueFn cos3_value(double k);
// r = beta V - mu . V' - 1/2 sigma^2 V'' for the target V above.
RewardFn designed_reward_cos3(const DynamicsModel& model, double beta, double k);

}  // namespace phibe
