#include "phibe/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace phibe {

namespace {
constexpr double kInvSqrtPi = 0.5641895835477563;  // 1/sqrt(pi)

double wrap_periodic(double s) {
  // map into [-pi, pi); evaluation is periodic so this only guards range
  double t = std::remainder(s, 2.0 * M_PI);
  if (t >= M_PI) t -= 2.0 * M_PI;
  return t;
}

// P, dP, ddP must each hold deg+1 entries (dP/ddP may be null).
void legendre_all(int deg, double x, double* P, double* dP, double* ddP) {
  P[0] = 1.0;
  if (dP) dP[0] = 0.0;
  if (ddP) ddP[0] = 0.0;
  if (deg == 0) return;
  P[1] = x;
  if (dP) dP[1] = 1.0;
  if (ddP) ddP[1] = 0.0;
  for (int k = 1; k < deg; ++k) {
    P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1);
    if (dP) dP[k + 1] = (2 * k + 1) * P[k] + dP[k - 1];
    if (ddP) ddP[k + 1] = (2 * k + 1) * dP[k] + ddP[k - 1];
  }
}
}  // namespace

BasisSet BasisSet::fourier(int M) {
  if (M < 0) throw std::invalid_argument("BasisSet::fourier: M must be >= 0");
  BasisSet b;
  b.kind = Kind::FourierPeriodic;
  b.d = 1;
  b.M = M;
  b.p = 2 * M + 1;
  return b;
}

BasisSet BasisSet::polynomial2(int d) {
  if (d < 1) throw std::invalid_argument("BasisSet::polynomial2: d must be >= 1");
  BasisSet b;
  b.kind = Kind::PolynomialUpTo2;
  b.d = d;
  b.p = 1 + d + d * (d + 1) / 2;
  return b;
}

BasisSet BasisSet::monomial1d(int degree) {
  if (degree < 0) throw std::invalid_argument("BasisSet::monomial1d: degree must be >= 0");
  BasisSet b;
  b.kind = Kind::Monomial1D;
  b.d = 1;
  b.M = degree;
  b.p = degree + 1;
  return b;
}

BasisSet BasisSet::legendre1d(int degree) {
  if (degree < 0) throw std::invalid_argument("BasisSet::legendre1d: degree must be >= 0");
  BasisSet b;
  b.kind = Kind::Legendre1D;
  b.d = 1;
  b.M = degree;
  b.p = degree + 1;
  return b;
}

std::string BasisSet::name() const {
  switch (kind) {
    case Kind::FourierPeriodic:
      return "FourierPeriodic(M=" + std::to_string(M) + ")";
    case Kind::PolynomialUpTo2:
      return "PolynomialUpTo2(d=" + std::to_string(d) + ")";
    case Kind::Monomial1D:
      return "Monomial1D(degree=" + std::to_string(M) + ")";
    case Kind::Legendre1D:
      return "Legendre1D(degree=" + std::to_string(M) + ")";
  }
  return "unknown";
}

int BasisSet::pair_index(int i, int j) const {
  // upper-triangular row-major: (0,0),(0,1),...,(0,d-1),(1,1),...
  if (i > j) std::swap(i, j);
  return 1 + d + i * d - i * (i - 1) / 2 + (j - i);
}

void BasisSet::value(const Eigen::VectorXd& s, Eigen::VectorXd& out) const {
  out.resize(p);
  switch (kind) {
    case Kind::FourierPeriodic: {
      const double x = wrap_periodic(s(0));
      out(0) = kInvSqrtPi / std::sqrt(2.0);
      for (int m = 1; m <= M; ++m) {
        out(2 * m - 1) = std::cos(m * x) * kInvSqrtPi;
        out(2 * m) = std::sin(m * x) * kInvSqrtPi;
      }
      break;
    }
    case Kind::PolynomialUpTo2: {
      out(0) = 1.0;
      out.segment(1, d) = s;
      int idx = 1 + d;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) out(idx++) = s(i) * s(j);
      break;
    }
    case Kind::Monomial1D: {
      double pw = 1.0;
      for (int k = 0; k <= M; ++k) {
        out(k) = pw;
        pw *= s(0);
      }
      break;
    }
    case Kind::Legendre1D:
      legendre_all(M, s(0), out.data(), nullptr, nullptr);
      break;
  }
}

void BasisSet::gradient(const Eigen::VectorXd& s, Eigen::MatrixXd& out) const {
  out.setZero(p, d);
  switch (kind) {
    case Kind::FourierPeriodic: {
      const double x = wrap_periodic(s(0));
      for (int m = 1; m <= M; ++m) {
        out(2 * m - 1, 0) = -m * std::sin(m * x) * kInvSqrtPi;
        out(2 * m, 0) = m * std::cos(m * x) * kInvSqrtPi;
      }
      break;
    }
    case Kind::PolynomialUpTo2: {
      for (int i = 0; i < d; ++i) out(1 + i, i) = 1.0;
      int idx = 1 + d;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          out(idx, i) += s(j);
          out(idx, j) += s(i);
          ++idx;
        }
      break;
    }
    case Kind::Monomial1D: {
      double pw = 1.0;
      for (int k = 1; k <= M; ++k) {
        out(k, 0) = k * pw;
        pw *= s(0);
      }
      break;
    }
    case Kind::Legendre1D: {
      std::vector<double> P(M + 1), dP(M + 1);
      legendre_all(M, s(0), P.data(), dP.data(), nullptr);
      for (int k = 0; k <= M; ++k) out(k, 0) = dP[k];
      break;
    }
  }
}

void BasisSet::hessian(const Eigen::VectorXd& s, std::vector<Eigen::MatrixXd>& out) const {
  out.assign(p, Eigen::MatrixXd::Zero(d, d));
  switch (kind) {
    case Kind::FourierPeriodic: {
      const double x = wrap_periodic(s(0));
      for (int m = 1; m <= M; ++m) {
        out[2 * m - 1](0, 0) = -m * m * std::cos(m * x) * kInvSqrtPi;
        out[2 * m](0, 0) = -m * m * std::sin(m * x) * kInvSqrtPi;
      }
      break;
    }
    case Kind::PolynomialUpTo2: {
      int idx = 1 + d;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          out[idx](i, j) += 1.0;
          out[idx](j, i) += 1.0;
          ++idx;
        }
      break;
    }
    case Kind::Monomial1D: {
      double pw = 1.0;
      for (int k = 2; k <= M; ++k) {
        out[k](0, 0) = k * (k - 1) * pw;
        pw *= s(0);
      }
      break;
    }
    case Kind::Legendre1D: {
      std::vector<double> P(M + 1), dP(M + 1), ddP(M + 1);
      legendre_all(M, s(0), P.data(), dP.data(), ddP.data());
      for (int k = 0; k <= M; ++k) out[k](0, 0) = ddP[k];
      break;
    }
  }
}

void BasisSet::grad_dot(const Eigen::VectorXd& s, const Eigen::VectorXd& v,
                        Eigen::VectorXd& out) const {
  out.resize(p);
  switch (kind) {
    case Kind::FourierPeriodic: {
      const double x = wrap_periodic(s(0));
      out(0) = 0.0;
      const double v0 = v(0);
      for (int m = 1; m <= M; ++m) {
        out(2 * m - 1) = -m * std::sin(m * x) * kInvSqrtPi * v0;
        out(2 * m) = m * std::cos(m * x) * kInvSqrtPi * v0;
      }
      break;
    }
    case Kind::PolynomialUpTo2: {
      out(0) = 0.0;
      out.segment(1, d) = v;
      int idx = 1 + d;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) out(idx++) = s(j) * v(i) + s(i) * v(j);
      break;
    }
    case Kind::Monomial1D: {
      out(0) = 0.0;
      double pw = 1.0;
      for (int k = 1; k <= M; ++k) {
        out(k) = k * pw * v(0);
        pw *= s(0);
      }
      break;
    }
    case Kind::Legendre1D: {
      std::vector<double> P(M + 1), dP(M + 1);
      legendre_all(M, s(0), P.data(), dP.data(), nullptr);
      for (int k = 0; k <= M; ++k) out(k) = dP[k] * v(0);
      break;
    }
  }
}

void BasisSet::hess_contract(const Eigen::VectorXd& s, const Eigen::MatrixXd& S,
                             Eigen::VectorXd& out) const {
  out.resize(p);
  switch (kind) {
    case Kind::FourierPeriodic: {
      const double x = wrap_periodic(s(0));
      out(0) = 0.0;
      const double s00 = S(0, 0);
      for (int m = 1; m <= M; ++m) {
        out(2 * m - 1) = -m * m * std::cos(m * x) * kInvSqrtPi * s00;
        out(2 * m) = -m * m * std::sin(m * x) * kInvSqrtPi * s00;
      }
      break;
    }
    case Kind::PolynomialUpTo2: {
      out.head(1 + d).setZero();
      int idx = 1 + d;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) out(idx++) = S(i, j) + S(j, i);
      break;
    }
    case Kind::Monomial1D: {
      out(0) = 0.0;
      if (M >= 1) out(1) = 0.0;
      double pw = 1.0;
      const double s00 = S(0, 0);
      for (int k = 2; k <= M; ++k) {
        out(k) = k * (k - 1) * pw * s00;
        pw *= s(0);
      }
      break;
    }
    case Kind::Legendre1D: {
      std::vector<double> P(M + 1), dP(M + 1), ddP(M + 1);
      legendre_all(M, s(0), P.data(), dP.data(), ddP.data());
      for (int k = 0; k <= M; ++k) out(k) = ddP[k] * S(0, 0);
      break;
    }
  }
}

Eigen::MatrixXd gram_matrix(const BasisSet& basis, const Quadrature& quad,
                            const WeightFn& weight) {
  if (quad.dim() != basis.d)
    throw std::invalid_argument("gram_matrix: quadrature dimension mismatch");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis.p, basis.p);
  Eigen::VectorXd phi;
  for (int i = 0; i < quad.size(); ++i) {
    Eigen::VectorXd s = quad.nodes.row(i).transpose();
    basis.value(s, phi);
    double w = quad.weights(i);
    if (weight) w *= weight(s);
    g.selfadjointView<Eigen::Lower>().rankUpdate(phi, w);
  }
  g = g.selfadjointView<Eigen::Lower>();
  if (!g.allFinite()) throw std::runtime_error("gram_matrix: non-finite entries");
  return g;
}

}  // namespace phibe
