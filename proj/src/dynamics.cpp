#include "phibe/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "phibe/rng.hpp"

namespace phibe {

DynamicsModel DynamicsModel::linear1d(double lambda) {
  DynamicsModel m;
  m.kind = Kind::Linear1D;
  m.d = 1;
  m.lambda = lambda;
  return m;
}

DynamicsModel DynamicsModel::nonlinear_sin1d(double lambda) {
  DynamicsModel m;
  m.kind = Kind::NonlinearSin1D;
  m.d = 1;
  m.lambda = lambda;
  return m;
}

DynamicsModel DynamicsModel::ou1d(double lambda, double sigma) {
  if (sigma < 0) throw std::invalid_argument("ou1d: sigma must be >= 0");
  DynamicsModel m;
  m.kind = Kind::OU1D;
  m.d = 1;
  m.lambda = lambda;
  m.sigma = sigma;
  return m;
}

DynamicsModel DynamicsModel::cubic_stabilization1d(double kappa, double alpha, double b, double K,
                                                   double sigma) {
  if (sigma < 0) throw std::invalid_argument("cubic_stabilization1d: sigma must be >= 0");
  DynamicsModel m;
  m.kind = Kind::CubicStabilization1D;
  m.d = 1;
  m.kappa = kappa;
  m.alpha = alpha;
  m.b = b;
  m.K = K;
  m.sigma = sigma;
  return m;
}

DynamicsModel DynamicsModel::linear_nd(Eigen::MatrixXd A, Eigen::VectorXd Sigma_diag) {
  if (A.rows() != A.cols()) throw std::invalid_argument("linear_nd: A must be square");
  if (Sigma_diag.size() != A.rows())
    throw std::invalid_argument("linear_nd: Sigma_diag dimension mismatch");
  if ((Sigma_diag.array() < 0).any())
    throw std::invalid_argument("linear_nd: Sigma_diag must be >= 0");
  DynamicsModel m;
  m.kind = Kind::LinearND;
  m.d = static_cast<int>(A.rows());
  m.A = std::move(A);
  m.Sigma_diag = std::move(Sigma_diag);
  return m;
}

bool DynamicsModel::is_stochastic() const {
  switch (kind) {
    case Kind::OU1D:
    case Kind::CubicStabilization1D:
      return sigma > 0;
    case Kind::LinearND:
      return Sigma_diag.size() > 0 && Sigma_diag.maxCoeff() > 0;
    default:
      return false;
  }
}

bool DynamicsModel::has_exact_transition() const {
  return kind == Kind::Linear1D || kind == Kind::OU1D || kind == Kind::LinearND;
}

std::string DynamicsModel::id() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Linear1D:
      os << "Linear1D(lambda=" << lambda << ")";
      break;
    case Kind::NonlinearSin1D:
      os << "NonlinearSin1D(lambda=" << lambda << ")";
      break;
    case Kind::OU1D:
      os << "OU1D(lambda=" << lambda << ",sigma=" << sigma << ")";
      break;
    case Kind::CubicStabilization1D:
      os << "CubicStabilization1D(kappa=" << kappa << ",alpha=" << alpha << ",b=" << b
         << ",K=" << K << ",sigma=" << sigma << ")";
      break;
    case Kind::LinearND:
      os << "LinearND(d=" << d << ")";
      break;
  }
  return os.str();
}

Eigen::VectorXd drift(const DynamicsModel& model, const Eigen::VectorXd& s) {
  if (s.size() != model.d) throw std::invalid_argument("drift: state dimension mismatch");
  Eigen::VectorXd out(model.d);
  switch (model.kind) {
    case DynamicsModel::Kind::Linear1D:
    case DynamicsModel::Kind::OU1D:
      out(0) = model.lambda * s(0);
      break;
    case DynamicsModel::Kind::NonlinearSin1D: {
      double sn = std::sin(s(0));
      out(0) = model.lambda * sn * sn;
      break;
    }
    case DynamicsModel::Kind::CubicStabilization1D:
      out(0) = -model.kappa * s(0) * s(0) * s(0) + (model.alpha - model.b * model.K) * s(0);
      break;
    case DynamicsModel::Kind::LinearND:
      out.noalias() = model.A * s;
      break;
  }
  return out;
}

Eigen::MatrixXd diffusion_cov(const DynamicsModel& model) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(model.d, model.d);
  switch (model.kind) {
    case DynamicsModel::Kind::OU1D:
    case DynamicsModel::Kind::CubicStabilization1D:
      cov(0, 0) = model.sigma * model.sigma;
      break;
    case DynamicsModel::Kind::LinearND:
      cov = model.Sigma_diag.asDiagonal();
      break;
    default:
      break;
  }
  return cov;
}

Trajectory simulate_trajectory(const DynamicsModel& model, const Eigen::VectorXd& s0, double dt,
                               int m, int substeps, std::uint64_t seed) {
  if (!(dt > 0)) throw std::invalid_argument("simulate_trajectory: dt must be > 0");
  if (m < 1) throw std::invalid_argument("simulate_trajectory: m must be >= 1");
  if (substeps < 1) throw std::invalid_argument("simulate_trajectory: substeps must be >= 1");
  if (s0.size() != model.d)
    throw std::invalid_argument("simulate_trajectory: state dimension mismatch");

  const double delta = dt / substeps;
  const bool stoch = model.is_stochastic();
  Eigen::VectorXd noise_scale(model.d);
  if (stoch) {
    Eigen::MatrixXd cov = diffusion_cov(model);
    noise_scale = cov.diagonal().array().sqrt() * std::sqrt(delta);
  }

  Trajectory traj;
  traj.states.resize(m + 1, model.d);
  traj.dt = dt;
  traj.seed = seed;
  traj.model_id = model.id();
  traj.states.row(0) = s0.transpose();

  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::VectorXd s = s0;
  for (int step = 1; step <= m; ++step) {
    for (int sub = 0; sub < substeps; ++sub) {
      Eigen::VectorXd mu = drift(model, s);
      s += delta * mu;
      if (stoch)
        for (int j = 0; j < model.d; ++j) s(j) += noise_scale(j) * gauss(rng);
    }
    if (!s.allFinite()) {
      std::ostringstream os;
      os << "simulate_trajectory: simulation diverged at step " << step << " of model "
         << model.id();
      throw std::runtime_error(os.str());
    }
    traj.states.row(step) = s.transpose();
  }
  return traj;
}

Trajectory sample_trajectory_exact(const DynamicsModel& model, const Eigen::VectorXd& s0,
                                   double dt, int m, std::uint64_t seed) {
  if (!model.has_exact_transition())
    throw std::invalid_argument("sample_trajectory_exact: model has no exact transition law");
  if (!(dt > 0)) throw std::invalid_argument("sample_trajectory_exact: dt must be > 0");
  if (m < 1) throw std::invalid_argument("sample_trajectory_exact: m must be >= 1");

  Trajectory traj;
  traj.states.resize(m + 1, model.d);
  traj.dt = dt;
  traj.seed = seed;
  traj.model_id = model.id();
  traj.states.row(0) = s0.transpose();

  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  switch (model.kind) {
    case DynamicsModel::Kind::Linear1D: {
      const double e = std::exp(model.lambda * dt);
      double s = s0(0);
      for (int step = 1; step <= m; ++step) {
        s *= e;
        traj.states(step, 0) = s;
      }
      break;
    }
    case DynamicsModel::Kind::OU1D: {
      const auto mom = ou_transition_moments(model.lambda, model.sigma, 0.0, dt);
      const double e = std::exp(model.lambda * dt);
      const double sd = std::sqrt(mom.variance);
      double s = s0(0);
      for (int step = 1; step <= m; ++step) {
        s = s * e + sd * gauss(rng);
        traj.states(step, 0) = s;
      }
      break;
    }
    case DynamicsModel::Kind::LinearND: {
      const auto tr = linear_nd_transition(model.A, diffusion_cov(model), dt);
      Eigen::VectorXd s = s0, xi(model.d);
      for (int step = 1; step <= m; ++step) {
        for (int j = 0; j < model.d; ++j) xi(j) = gauss(rng);
        s = tr.E * s + tr.chol * xi;
        traj.states.row(step) = s.transpose();
      }
      break;
    }
    default:
      break;
  }
  return traj;
}

double exact_linear_step(double lambda, double s, double dt) {
  return std::exp(lambda * dt) * s;
}

Eigen::VectorXd exact_linear_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& s, double dt) {
  if (A.rows() != A.cols() || A.rows() != s.size())
    throw std::invalid_argument("exact_linear_step: dimension mismatch");
  Eigen::MatrixXd E = (A * dt).exp();
  return E * s;
}

OuMoments ou_transition_moments(double lambda, double sigma, double s, double t) {
  if (t < 0) throw std::invalid_argument("ou_transition_moments: t must be >= 0");
  OuMoments m;
  m.mean = s * std::exp(lambda * t);
  if (std::abs(lambda) * t < 1e-8) {
    m.variance = sigma * sigma * t;
  } else {
    m.variance = sigma * sigma / (2.0 * lambda) * (std::exp(2.0 * lambda * t) - 1.0);
  }
  return m;
}

LinearNdTransition linear_nd_transition(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                                        double dt) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d || Sigma.rows() != d || Sigma.cols() != d)
    throw std::invalid_argument("linear_nd_transition: dimension mismatch");

  // Van Loan block method: exp([[-A, Sigma],[0, A^T]] dt) has upper-right
  // block F12 with int_0^dt e^{Au} Sigma e^{A^T u} du = F22^T F12 and
  // e^{A dt} = F22^T.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  B.topLeftCorner(d, d) = -A;
  B.topRightCorner(d, d) = Sigma;
  B.bottomRightCorner(d, d) = A.transpose();
  Eigen::MatrixXd F = (B * dt).exp();

  LinearNdTransition tr;
  tr.E = F.bottomRightCorner(d, d).transpose();
  tr.Cov = tr.E * F.topRightCorner(d, d);
  tr.Cov = 0.5 * (tr.Cov + tr.Cov.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(tr.Cov);
  if (llt.info() == Eigen::Success) {
    tr.chol = llt.matrixL();
  } else {
    // semidefinite fallback (e.g. Sigma = 0): use eigenvalue square root
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tr.Cov);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    tr.chol = es.eigenvectors() * ev.asDiagonal();
  }
  return tr;
}

InitialSampler InitialSampler::uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("uniform_box: dims differ");
  InitialSampler s;
  s.kind = Kind::UniformBox;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

InitialSampler InitialSampler::uniform_mesh(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("uniform_mesh: need b > a");
  InitialSampler s;
  s.kind = Kind::UniformMesh;
  s.a = a;
  s.b = b;
  return s;
}

InitialSampler InitialSampler::fixed_list(Eigen::MatrixXd states) {
  if (states.rows() == 0) throw std::invalid_argument("fixed_list: empty list");
  InitialSampler s;
  s.kind = Kind::FixedList;
  s.states = std::move(states);
  return s;
}

TransitionPairs sample_transition_pairs(const DynamicsModel& model, const InitialSampler& sampler,
                                        double dt, int n, int substeps, std::uint64_t seed,
                                        const RewardFn& reward, bool exact) {
  if (n < 1) throw std::invalid_argument("sample_transition_pairs: n must be >= 1");
  if (!(dt > 0)) throw std::invalid_argument("sample_transition_pairs: dt must be > 0");

  const int d = model.d;
  TransitionPairs pairs;
  pairs.starts.resize(n, d);
  pairs.ends.resize(n, d);
  pairs.rewards.resize(n);
  pairs.dt = dt;

  auto rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  switch (sampler.kind) {
    case InitialSampler::Kind::UniformBox: {
      if (sampler.lo.size() != d)
        throw std::invalid_argument("sample_transition_pairs: sampler dimension mismatch");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
          pairs.starts(i, j) = sampler.lo(j) + (sampler.hi(j) - sampler.lo(j)) * unif(rng);
      break;
    }
    case InitialSampler::Kind::UniformMesh: {
      if (d != 1)
        throw std::invalid_argument("sample_transition_pairs: uniform mesh requires d = 1");
      if (n == 1) {
        pairs.starts(0, 0) = 0.5 * (sampler.a + sampler.b);
      } else {
        const double h = (sampler.b - sampler.a) / (n - 1);
        for (int i = 0; i < n; ++i) pairs.starts(i, 0) = sampler.a + h * i;
      }
      break;
    }
    case InitialSampler::Kind::FixedList: {
      if (sampler.states.cols() != d || sampler.states.rows() < n)
        throw std::invalid_argument("sample_transition_pairs: fixed list too small");
      pairs.starts = sampler.states.topRows(n);
      break;
    }
  }

  const bool use_exact = exact && model.has_exact_transition();
  if (use_exact) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    switch (model.kind) {
      case DynamicsModel::Kind::Linear1D: {
        const double e = std::exp(model.lambda * dt);
        pairs.ends = pairs.starts * e;
        break;
      }
      case DynamicsModel::Kind::OU1D: {
        const double e = std::exp(model.lambda * dt);
        const double sd =
            std::sqrt(ou_transition_moments(model.lambda, model.sigma, 0.0, dt).variance);
        for (int i = 0; i < n; ++i) pairs.ends(i, 0) = pairs.starts(i, 0) * e + sd * gauss(rng);
        break;
      }
      case DynamicsModel::Kind::LinearND: {
        const auto tr = linear_nd_transition(model.A, diffusion_cov(model), dt);
        Eigen::VectorXd xi(d);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < d; ++j) xi(j) = gauss(rng);
          pairs.ends.row(i) =
              (tr.E * pairs.starts.row(i).transpose() + tr.chol * xi).transpose();
        }
        break;
      }
      default:
        break;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      Trajectory t = simulate_trajectory(model, pairs.starts.row(i).transpose(), dt, 1, substeps,
                                         derive_stream_seed(seed, static_cast<std::uint64_t>(i)));
      pairs.ends.row(i) = t.states.row(1);
    }
  }

  if (reward) {
    for (int i = 0; i < n; ++i) pairs.rewards(i) = reward(pairs.starts.row(i).transpose());
  } else {
    pairs.rewards.setZero();
  }
  return pairs;
}

}  // namespace phibe
