#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

namespace phibe {

using RewardFn = std::function<double(const Eigen::VectorXd&)>;

// Parametric dynamics families:
//   Linear1D(lambda):        ds/dt = lambda s
//   NonlinearSin1D(lambda):  ds/dt = lambda sin^2(s)
//   OU1D(lambda, sigma):     ds = lambda s dt + sigma dW
//   CubicStabilization1D:    ds = (-kappa s^3 + (alpha - b K) s) dt + sigma dW
//                            (closed loop under the policy u(s) = -K s)
//   LinearND(A, Sigma_diag): ds = A s dt + sigma dW with sigma sigma^T = diag(Sigma_diag)
struct DynamicsModel {
  enum class Kind { Linear1D, NonlinearSin1D, OU1D, CubicStabilization1D, LinearND };
  Kind kind = Kind::Linear1D;
  int d = 1;
  double lambda = 0, sigma = 0, kappa = 0, alpha = 0, b = 0, K = 0;
  Eigen::MatrixXd A;           // LinearND drift matrix
  Eigen::VectorXd Sigma_diag;  // LinearND diffusion covariance diagonal

  static DynamicsModel linear1d(double lambda);
  static DynamicsModel nonlinear_sin1d(double lambda);
  static DynamicsModel ou1d(double lambda, double sigma);
  static DynamicsModel cubic_stabilization1d(double kappa, double alpha, double b, double K,
                                             double sigma);
  static DynamicsModel linear_nd(Eigen::MatrixXd A, Eigen::VectorXd Sigma_diag);

  bool is_stochastic() const;
  bool has_exact_transition() const;
  std::string id() const;
};

Eigen::VectorXd drift(const DynamicsModel& model, const Eigen::VectorXd& s);

// Diffusion covariance Sigma = sigma sigma^T (zero for deterministic kinds).
Eigen::MatrixXd diffusion_cov(const DynamicsModel& model);

struct Trajectory {
  Eigen::MatrixXd states;  // (m+1) x d, uniformly dt-spaced
  double dt = 0;
  std::uint64_t seed = 0;
  std::string model_id;

  int num_states() const { return static_cast<int>(states.rows()); }
};

// Euler (deterministic kinds) or Euler-Maruyama (stochastic kinds) with
// internal step dt/substeps; returns m+1 states including s0. Throws on
// non-finite states, naming the step.
Trajectory simulate_trajectory(const DynamicsModel& model, const Eigen::VectorXd& s0, double dt,
                               int m, int substeps, std::uint64_t seed);

// Exact transition sampling for Linear1D / OU1D / LinearND.
Trajectory sample_trajectory_exact(const DynamicsModel& model, const Eigen::VectorXd& s0,
                                   double dt, int m, std::uint64_t seed);

double exact_linear_step(double lambda, double s, double dt);
Eigen::VectorXd exact_linear_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& s, double dt);

struct OuMoments {
  double mean = 0;
  double variance = 0;
};

// mean = s e^{lambda t}; variance = sigma^2 (e^{2 lambda t} - 1) / (2 lambda),
// with the Brownian limit sigma^2 t taken when |lambda| t < 1e-8.
OuMoments ou_transition_moments(double lambda, double sigma, double s, double t);

// One-step law of the linear SDE: s' = E s + xi, xi ~ N(0, Cov), where
// E = e^{A dt} and Cov = int_0^dt e^{Au} Sigma e^{A^T u} du (Van Loan block
// matrix exponential).
struct LinearNdTransition {
  Eigen::MatrixXd E;
  Eigen::MatrixXd Cov;
  Eigen::MatrixXd chol;  // lower Cholesky factor of Cov
};
LinearNdTransition linear_nd_transition(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                                        double dt);

struct InitialSampler {
  enum class Kind { UniformBox, UniformMesh, FixedList };
  Kind kind = Kind::UniformBox;
  Eigen::VectorXd lo, hi;   // UniformBox
  double a = 0, b = 0;      // UniformMesh interval
  Eigen::MatrixXd states;   // FixedList rows

  static InitialSampler uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static InitialSampler uniform_mesh(double a, double b);
  static InitialSampler fixed_list(Eigen::MatrixXd states);
};

struct TransitionPairs {
  Eigen::MatrixXd starts;  // n x d
  Eigen::MatrixXd ends;    // n x d
  double dt = 0;
  Eigen::VectorXd rewards;  // reward at starts
};

// n one-step transitions. Starts drawn from the sampler (mesh starts are the
// n-point uniform mesh); ends sampled exactly when the model supports it and
// exact=true, otherwise via Euler-Maruyama with the given substeps.
TransitionPairs sample_transition_pairs(const DynamicsModel& model, const InitialSampler& sampler,
                                        double dt, int n, int substeps, std::uint64_t seed,
                                        const RewardFn& reward, bool exact = true);

}  // namespace phibe
