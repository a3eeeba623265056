#include "phibe/estimators.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "phibe/metrics.hpp"
#include "phibe/rng.hpp"

namespace phibe {

namespace {

void check_window(const Eigen::MatrixXd& window, double dt, const FdCoefficients& coeffs,
                  const char* who) {
  if (window.rows() != coeffs.order + 1)
    throw std::invalid_argument(std::string(who) + ": window length must be order + 1");
  if (!(dt > 0)) throw std::invalid_argument(std::string(who) + ": dt must be > 0");
}

int euler_steps(double t, double max_step) {
  return std::max(1, static_cast<int>(std::ceil(t / max_step - 1e-12)));
}

Eigen::VectorXd euler_flow(const DynamicsModel& model, Eigen::VectorXd s, double t,
                           double max_step) {
  const int n = euler_steps(t, max_step);
  const double h = t / n;
  for (int k = 0; k < n; ++k) s += h * drift(model, s);
  return s;
}

}  // namespace

Eigen::VectorXd mu_bar(const Eigen::MatrixXd& window, double dt, const FdCoefficients& coeffs) {
  check_window(window, dt, coeffs, "mu_bar");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(window.cols());
  for (int k = 1; k <= coeffs.order; ++k)
    out += coeffs.weights[k] * (window.row(k) - window.row(0)).transpose();
  return out / dt;
}

Eigen::MatrixXd sigma_bar(const Eigen::MatrixXd& window, double dt, const FdCoefficients& coeffs) {
  check_window(window, dt, coeffs, "sigma_bar");
  const Eigen::Index d = window.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int k = 1; k <= coeffs.order; ++k) {
    Eigen::VectorXd delta = (window.row(k) - window.row(0)).transpose();
    out += coeffs.weights[k] * (delta * delta.transpose());
  }
  return out / dt;
}

TransitionMomentProvider TransitionMomentProvider::ou(double lambda, double sigma) {
  TransitionMomentProvider p;
  p.first = [lambda](double t, const Eigen::VectorXd& s) {
    Eigen::VectorXd out(1);
    out(0) = s(0) * (std::exp(lambda * t) - 1.0);
    return out;
  };
  p.second = [lambda, sigma](double t, const Eigen::VectorXd& s) {
    const auto m = ou_transition_moments(lambda, sigma, s(0), t);
    const double shift = m.mean - s(0);
    Eigen::MatrixXd out(1, 1);
    out(0, 0) = m.variance + shift * shift;
    return out;
  };
  return p;
}

TransitionMomentProvider TransitionMomentProvider::linear1d(double lambda) {
  return ou(lambda, 0.0);
}

TransitionMomentProvider TransitionMomentProvider::linear_nd(Eigen::MatrixXd A,
                                                             Eigen::MatrixXd Sigma) {
  if (A.rows() != A.cols() || Sigma.rows() != A.rows() || Sigma.cols() != A.cols())
    throw std::invalid_argument("linear_nd provider: dimension mismatch");
  auto cache = std::make_shared<std::map<double, LinearNdTransition>>();
  auto lookup = [cache, A, Sigma](double t) -> const LinearNdTransition& {
    auto it = cache->find(t);
    if (it == cache->end()) it = cache->emplace(t, linear_nd_transition(A, Sigma, t)).first;
    return it->second;
  };
  TransitionMomentProvider p;
  p.first = [lookup](double t, const Eigen::VectorXd& s) -> Eigen::VectorXd {
    return lookup(t).E * s - s;
  };
  p.second = [lookup](double t, const Eigen::VectorXd& s) -> Eigen::MatrixXd {
    const auto& tr = lookup(t);
    Eigen::VectorXd shift = tr.E * s - s;
    return tr.Cov + shift * shift.transpose();
  };
  return p;
}

TransitionMomentProvider TransitionMomentProvider::deterministic_flow(DynamicsModel model,
                                                                      double max_step) {
  if (!(max_step > 0))
    throw std::invalid_argument("deterministic_flow provider: max_step must be > 0");
  TransitionMomentProvider p;
  p.first = [model, max_step](double t, const Eigen::VectorXd& s) -> Eigen::VectorXd {
    return euler_flow(model, s, t, max_step) - s;
  };
  p.second = [model, max_step](double t, const Eigen::VectorXd& s) -> Eigen::MatrixXd {
    Eigen::VectorXd shift = euler_flow(model, s, t, max_step) - s;
    return shift * shift.transpose();
  };
  return p;
}

TransitionMomentProvider TransitionMomentProvider::monte_carlo(DynamicsModel model,
                                                               double max_step, int samples,
                                                               std::uint64_t seed) {
  if (!(max_step > 0)) throw std::invalid_argument("monte_carlo provider: max_step must be > 0");
  if (samples < 1) throw std::invalid_argument("monte_carlo provider: samples must be >= 1");

  // Seed derived from (t, s) bits so the provider is a pure function of its
  // arguments regardless of call order.
  auto call_seed = [seed](double t, const Eigen::VectorXd& s) {
    std::uint64_t h = mix64(seed ^ 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ std::bit_cast<std::uint64_t>(t));
    for (Eigen::Index i = 0; i < s.size(); ++i)
      h = mix64(h ^ std::bit_cast<std::uint64_t>(s(i)));
    return h;
  };

  auto moments = [model, max_step, samples, call_seed](double t, const Eigen::VectorXd& s) {
    const int nsub = euler_steps(t, max_step);
    const double h = t / nsub;
    const Eigen::VectorXd noise_scale =
        diffusion_cov(model).diagonal().array().sqrt() * std::sqrt(h);
    std::mt19937_64 rng(call_seed(t, s));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(model.d);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(model.d, model.d);
    for (int k = 0; k < samples; ++k) {
      Eigen::VectorXd x = s;
      for (int step = 0; step < nsub; ++step) {
        x += h * drift(model, x);
        for (int j = 0; j < model.d; ++j) x(j) += noise_scale(j) * gauss(rng);
      }
      Eigen::VectorXd delta = x - s;
      m1 += delta;
      m2 += delta * delta.transpose();
    }
    m1 /= samples;
    m2 /= samples;
    return std::make_pair(m1, m2);
  };

  TransitionMomentProvider p;
  p.first = [moments](double t, const Eigen::VectorXd& s) { return moments(t, s).first; };
  p.second = [moments](double t, const Eigen::VectorXd& s) { return moments(t, s).second; };
  return p;
}

LocalDynamicsEstimate model_mu_sigma_hat(const TransitionMomentProvider& provider,
                                         const Eigen::VectorXd& s, double dt,
                                         const FdCoefficients& coeffs) {
  if (!(dt > 0)) throw std::invalid_argument("model_mu_sigma_hat: dt must be > 0");
  const Eigen::Index d = s.size();
  LocalDynamicsEstimate est;
  est.anchor = s;
  est.mu_bar = Eigen::VectorXd::Zero(d);
  est.sigma_bar = Eigen::MatrixXd::Zero(d, d);
  for (int j = 1; j <= coeffs.order; ++j) {
    const double t = j * dt;
    est.mu_bar += coeffs.weights[j] * provider.first(t, s);
    est.sigma_bar += coeffs.weights[j] * provider.second(t, s);
  }
  est.mu_bar /= dt;
  est.sigma_bar /= dt;
  est.sigma_bar = 0.5 * (est.sigma_bar + est.sigma_bar.transpose()).eval();
  if (!est.mu_bar.allFinite() || !est.sigma_bar.allFinite())
    throw std::runtime_error("model_mu_sigma_hat: non-finite moments");
  return est;
}

OrderCheck estimator_order_check(const DynamicsModel& model, const FdCoefficients& coeffs,
                                 const std::vector<double>& dt_grid) {
  if (dt_grid.size() < 3)
    throw std::invalid_argument("estimator_order_check: need at least 3 dt values");

  Eigen::MatrixXd A;
  switch (model.kind) {
    case DynamicsModel::Kind::Linear1D:
    case DynamicsModel::Kind::OU1D:
      A = Eigen::MatrixXd::Constant(1, 1, model.lambda);
      break;
    case DynamicsModel::Kind::LinearND:
      A = model.A;
      break;
    default:
      throw std::invalid_argument("estimator_order_check: model has no exact linear flow");
  }
  const int d = static_cast<int>(A.rows());

  OrderCheck check;
  check.dts = dt_grid;
  check.errors.reserve(dt_grid.size());
  for (double dt : dt_grid) {
    if (!(dt > 0)) throw std::invalid_argument("estimator_order_check: dt must be > 0");
    Eigen::MatrixXd Ahat = Eigen::MatrixXd::Zero(d, d);
    for (int j = 1; j <= coeffs.order; ++j)
      Ahat += coeffs.weights[j] * ((A * (j * dt)).exp() - Eigen::MatrixXd::Identity(d, d));
    Ahat /= dt;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ahat - A);
    check.errors.push_back(svd.singularValues()(0));
  }

  bool all_positive = true;
  for (double e : check.errors) all_positive = all_positive && e > 0;
  if (all_positive) {
    check.slope = fit_order(check.dts, check.errors).slope;
  } else {
    check.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return check;
}

}  // namespace phibe
