#include "phibe/galerkin.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "phibe/fdcoeff.hpp"

namespace phibe {

namespace {

constexpr double kMaxCondition = 1e12;

double node_weight(const Quadrature& quad, const WeightFn& weight, const Eigen::VectorXd& x,
                   Eigen::Index i) {
  double w = quad.weights(i);
  if (weight) w *= weight(x);
  return w;
}

void check_finite(const LinearSystem& sys, const char* who) {
  if (!sys.A.allFinite() || !sys.b.allFinite())
    throw std::runtime_error(std::string(who) + ": non-finite integrand");
}

}  // namespace

double ValueApprox::value(const Eigen::VectorXd& s) const {
  Eigen::VectorXd phi(basis.p);
  basis.value(s, phi);
  return phi.dot(theta);
}

ValueFn ValueApprox::evaluator() const {
  ValueApprox copy = *this;
  return [copy](const Eigen::VectorXd& s) { return copy.value(s); };
}

TransitionKernel TransitionKernel::deterministic_map(StepMap step) {
  TransitionKernel k;
  k.expect_phi = [step](const BasisSet& basis, const Eigen::VectorXd& s) {
    Eigen::VectorXd out(basis.p);
    basis.value(step(s), out);
    return out;
  };
  return k;
}

TransitionKernel TransitionKernel::ou_gauss(double lambda, double sigma, double dt,
                                            int gh_nodes) {
  auto gh = std::make_shared<std::pair<Eigen::VectorXd, Eigen::VectorXd>>(gauss_hermite(gh_nodes));
  const double e = std::exp(lambda * dt);
  const double sd = std::sqrt(ou_transition_moments(lambda, sigma, 0.0, dt).variance);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  TransitionKernel k;
  k.expect_phi = [gh, e, sd, inv_sqrt_pi](const BasisSet& basis, const Eigen::VectorXd& s) {
    const double mean = e * s(0);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(basis.p);
    Eigen::VectorXd phi(basis.p), x(1);
    for (Eigen::Index i = 0; i < gh->first.size(); ++i) {
      x(0) = mean + std::sqrt(2.0) * sd * gh->first(i);
      basis.value(x, phi);
      acc += gh->second(i) * phi;
    }
    return Eigen::VectorXd(inv_sqrt_pi * acc);
  };
  return k;
}

TransitionKernel TransitionKernel::linear_nd_poly2(const Eigen::MatrixXd& A,
                                                   const Eigen::MatrixXd& Sigma, double dt) {
  auto tr = std::make_shared<LinearNdTransition>(linear_nd_transition(A, Sigma, dt));
  TransitionKernel k;
  k.expect_phi = [tr](const BasisSet& basis, const Eigen::VectorXd& s) {
    if (basis.kind != BasisSet::Kind::PolynomialUpTo2)
      throw std::invalid_argument("linear_nd_poly2 kernel requires the PolynomialUpTo2 basis");
    const int d = basis.d;
    Eigen::VectorXd m = tr->E * s;
    Eigen::VectorXd out(basis.p);
    out(0) = 1.0;
    out.segment(1, d) = m;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        out(basis.pair_index(i, j)) = m(i) * m(j) + tr->Cov(i, j);
    return out;
  };
  return k;
}

LinearSystem assemble_phibe(const BasisSet& basis, const TransitionMomentProvider& provider,
                            const RewardFn& reward, double beta, double dt, int order,
                            const Quadrature& quad, const WeightFn& weight, bool stochastic) {
  if (!(beta > 0)) throw std::invalid_argument("assemble_phibe: beta must be > 0");
  const FdCoefficients coeffs = fd_coefficients(order);
  const int p = basis.p;

  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Zero(p, p);
  sys.b = Eigen::VectorXd::Zero(p);

  Eigen::VectorXd phi(p), row(p), gdot(p), hc(p);
  for (Eigen::Index i = 0; i < quad.size(); ++i) {
    Eigen::VectorXd x = quad.nodes.row(i).transpose();
    const double w = node_weight(quad, weight, x, i);
    if (w == 0.0) continue;
    const LocalDynamicsEstimate est = model_mu_sigma_hat(provider, x, dt, coeffs);
    basis.value(x, phi);
    basis.grad_dot(x, est.mu_bar, gdot);
    row = beta * phi - gdot;
    if (stochastic) {
      basis.hess_contract(x, est.sigma_bar, hc);
      row -= 0.5 * hc;
    }
    sys.A.noalias() += w * phi * row.transpose();
    sys.b.noalias() += (w * reward(x)) * phi;
  }
  check_finite(sys, "assemble_phibe");
  return sys;
}

LinearSystem assemble_generator(const BasisSet& basis,
                                const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& mu,
                                const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& Sigma,
                                const RewardFn& reward, double beta, const Quadrature& quad,
                                const WeightFn& weight) {
  if (!(beta > 0)) throw std::invalid_argument("assemble_generator: beta must be > 0");
  const int p = basis.p;

  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Zero(p, p);
  sys.b = Eigen::VectorXd::Zero(p);

  Eigen::VectorXd phi(p), row(p), gdot(p), hc(p);
  for (Eigen::Index i = 0; i < quad.size(); ++i) {
    Eigen::VectorXd x = quad.nodes.row(i).transpose();
    const double w = node_weight(quad, weight, x, i);
    if (w == 0.0) continue;
    basis.value(x, phi);
    basis.grad_dot(x, mu(x), gdot);
    row = beta * phi - gdot;
    if (Sigma) {
      basis.hess_contract(x, Sigma(x), hc);
      row -= 0.5 * hc;
    }
    sys.A.noalias() += w * phi * row.transpose();
    sys.b.noalias() += (w * reward(x)) * phi;
  }
  check_finite(sys, "assemble_generator");
  return sys;
}

LinearSystem assemble_be_projection(const BasisSet& basis, const TransitionKernel& kernel,
                                    const RewardFn& reward, double beta, double dt,
                                    const Quadrature& quad, const WeightFn& weight) {
  if (!(beta > 0)) throw std::invalid_argument("assemble_be_projection: beta must be > 0");
  if (!(dt > 0)) throw std::invalid_argument("assemble_be_projection: dt must be > 0");
  if (!kernel.expect_phi)
    throw std::invalid_argument("assemble_be_projection: unsupported transition law");
  const int p = basis.p;
  const double gamma = std::exp(-beta * dt);

  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Zero(p, p);
  sys.b = Eigen::VectorXd::Zero(p);

  Eigen::VectorXd phi(p), row(p);
  for (Eigen::Index i = 0; i < quad.size(); ++i) {
    Eigen::VectorXd x = quad.nodes.row(i).transpose();
    const double w = node_weight(quad, weight, x, i);
    if (w == 0.0) continue;
    basis.value(x, phi);
    row = phi - gamma * kernel.expect_phi(basis, x);
    sys.A.noalias() += w * phi * row.transpose();
    sys.b.noalias() += (w * reward(x) * dt) * phi;
  }
  check_finite(sys, "assemble_be_projection");
  return sys;
}

ValueFn be_rollout_deterministic(const RewardFn& reward, StepMap step, double beta, double dt,
                                 int horizon_steps) {
  if (horizon_steps < 1)
    throw std::invalid_argument("be_rollout_deterministic: horizon_steps must be >= 1");
  if (!(dt > 0)) throw std::invalid_argument("be_rollout_deterministic: dt must be > 0");
  const double decay = std::exp(-beta * dt);
  return [reward, step, decay, dt, horizon_steps](const Eigen::VectorXd& s0) {
    Eigen::VectorXd s = s0;
    double acc = 0.0, disc = 1.0;
    for (int i = 0;; ++i) {
      acc += disc * reward(s) * dt;
      if (i == horizon_steps) break;
      disc *= decay;
      s = step(s);
    }
    return acc;
  };
}

double rollout_tail_bound(double beta, double dt, int horizon_steps, double r_max) {
  const double decay = std::exp(-beta * dt);
  return std::pow(decay, horizon_steps + 1) * dt * std::abs(r_max) / (1.0 - decay);
}

ValueApprox solve(const LinearSystem& system, const BasisSet& basis) {
  const Eigen::Index p = system.A.rows();
  if (system.A.cols() != p || system.b.size() != p)
    throw std::invalid_argument("solve: system shape mismatch");
  if (p != basis.p) throw std::invalid_argument("solve: basis size does not match system");
  if (!system.A.allFinite() || !system.b.allFinite())
    throw std::invalid_argument("solve: non-finite system");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.A);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(p - 1);
  const double cond = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxCondition)) {
    std::ostringstream os;
    os << "solve: system is singular or ill-conditioned (condition estimate " << cond << " > "
       << kMaxCondition << ")";
    throw std::runtime_error(os.str());
  }

  ValueApprox va;
  va.basis = basis;
  va.condition = cond;
  va.theta = system.A.colPivHouseholderQr().solve(system.b);
  va.residual = (system.A * va.theta - system.b).norm();
  const double scale = system.A.norm() * va.theta.norm() + system.b.norm();
  if (va.residual > 1e-8 * scale) {
    std::ostringstream os;
    os << "solve: residual " << va.residual << " violates the contract bound " << 1e-8 * scale;
    throw std::runtime_error(os.str());
  }
  return va;
}

LqTrue lq_true_value(double q, double r_ctrl, double K, double alpha, double b_ctrl, double sigma,
                     double beta) {
  LqTrue v;
  v.R = q + r_ctrl * K * K;
  v.lambda = alpha - b_ctrl * K;
  if (!(beta > 2.0 * v.lambda))
    throw std::domain_error("lq_true_value: value diverges (beta <= 2 lambda)");
  v.a1 = v.R / (beta - 2.0 * v.lambda);
  v.a2 = sigma * sigma * v.a1 / beta;
  return v;
}

LqBe lq_be_value(double R, double lambda, double sigma, double beta, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("lq_be_value: dt must be > 0");
  LqBe v;
  v.gamma = std::exp(-beta * dt);
  const double growth = std::exp(2.0 * lambda * dt);
  if (!(v.gamma * growth < 1.0))
    throw std::domain_error("lq_be_value: divergent geometric series (gamma e^{2 lambda dt} >= 1)");
  v.sigma_hat_sq = ou_transition_moments(lambda, sigma, 0.0, dt).variance / dt;
  v.a1R = R * dt / (1.0 - v.gamma * growth);
  v.a0R = v.gamma * dt * v.sigma_hat_sq * v.a1R / (1.0 - v.gamma);
  return v;
}

LqPhibe lq_phibe_value(double R, double lambda, double sigma, double beta, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("lq_phibe_value: dt must be > 0");
  LqPhibe v;
  const double em1 = std::expm1(lambda * dt);
  v.lambda_hat = em1 / dt;
  v.eta = em1 * em1 / dt;
  const double denom = beta - 2.0 * v.lambda_hat - v.eta;
  if (!(denom > 0)) throw std::domain_error("lq_phibe_value: nonpositive denominator");
  v.sigma_hat_sq = ou_transition_moments(lambda, sigma, 0.0, dt).variance / dt;
  v.a1P = R / denom;
  v.a0P = v.sigma_hat_sq * v.a1P / beta;
  return v;
}

LyapunovValue lq_true_value_nd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                               const Eigen::MatrixXd& Q, double beta) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d || Sigma.rows() != d || Sigma.cols() != d || Q.rows() != d || Q.cols() != d)
    throw std::invalid_argument("lq_true_value_nd: dimension mismatch");

  // vec(A^T P) = (I kron A^T) vec(P), vec(P A) = (A^T kron I) vec(P)
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d * d, d * d);
  const Eigen::MatrixXd At = A.transpose();
  for (int j = 0; j < d; ++j) {
    M.block(j * d, j * d, d, d) += At;
    for (int l = 0; l < d; ++l) M.block(j * d, l * d, d, d).diagonal().array() += At(j, l);
  }
  M.diagonal().array() -= beta;

  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), d * d);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < d * d)
    throw std::runtime_error("lq_true_value_nd: singular Lyapunov operator");
  Eigen::VectorXd x = qr.solve(-q);

  LyapunovValue v;
  v.P = Eigen::Map<Eigen::MatrixXd>(x.data(), d, d);
  v.P = 0.5 * (v.P + v.P.transpose()).eval();
  v.residual = (At * v.P + v.P * A - beta * v.P + Q).norm();
  const double scale = std::max(1.0, Q.norm());
  if (v.residual > 1e-10 * scale)
    throw std::runtime_error("lq_true_value_nd: Lyapunov residual exceeds tolerance");
  v.c = (Sigma * v.P).trace() / beta;
  return v;
}

ValueFn cos3_value(double k) {
  return [k](const Eigen::VectorXd& s) {
    const double c = std::cos(k * s(0));
    return c * c * c;
  };
}

RewardFn designed_reward_cos3(const DynamicsModel& model, double beta, double k) {
  const double sigma_sq = diffusion_cov(model)(0, 0);
  return [model, beta, k, sigma_sq](const Eigen::VectorXd& s) {
    const double c = std::cos(k * s(0));
    const double sn = std::sin(k * s(0));
    const double V = c * c * c;
    const double Vp = -3.0 * k * c * c * sn;
    const double Vpp = 6.0 * k * k * c * sn * sn - 3.0 * k * k * c * c * c;
    const double mu = drift(model, s)(0);
    return beta * V - mu * Vp - 0.5 * sigma_sq * Vpp;
  };
}

}  // namespace phibe
