#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "phibe/quadrature.hpp"

namespace phibe {

using WeightFn = std::function<double(const Eigen::VectorXd&)>;  // empty = Lebesgue

// Basis families with value/gradient/Hessian evaluation.
//   FourierPeriodic(M):  p = 2M+1 functions (1/sqrt(pi)) {1/sqrt(2), cos(ms), sin(ms)}
//                        on [-pi, pi], d = 1.
//   PolynomialUpTo2(d):  p = 1 + d + d(d+1)/2 functions {1, s_i, s_i s_j (i<=j)}.
//   Monomial1D(degree):  p = degree+1 functions {1, s, ..., s^degree}.
//   Legendre1D(degree):  p = degree+1 Legendre polynomials P_0..P_degree; spans
//                        the same space as Monomial1D but stays well
//                        conditioned at high degree (reference solves).
struct BasisSet {
  enum class Kind { FourierPeriodic, PolynomialUpTo2, Monomial1D, Legendre1D };
  Kind kind = Kind::FourierPeriodic;
  int d = 1;
  int M = 0;       // Fourier frequency count, or polynomial degree
  int p = 1;

  static BasisSet fourier(int M);
  static BasisSet polynomial2(int d);
  static BasisSet monomial1d(int degree);
  static BasisSet legendre1d(int degree);

  std::string name() const;

  void value(const Eigen::VectorXd& s, Eigen::VectorXd& out) const;       // p
  void gradient(const Eigen::VectorXd& s, Eigen::MatrixXd& out) const;    // p x d
  void hessian(const Eigen::VectorXd& s, std::vector<Eigen::MatrixXd>& out) const;

  // Fused rows used by the Galerkin assemblers: (grad phi_k) . v and
  // (hess phi_k) : S for all k at once.
  void grad_dot(const Eigen::VectorXd& s, const Eigen::VectorXd& v,
                Eigen::VectorXd& out) const;
  void hess_contract(const Eigen::VectorXd& s, const Eigen::MatrixXd& S,
                     Eigen::VectorXd& out) const;

  // Index of the pair block entry for i <= j (PolynomialUpTo2 layout).
  int pair_index(int i, int j) const;
};

Eigen::MatrixXd gram_matrix(const BasisSet& basis, const Quadrature& quad,
                            const WeightFn& weight = {});

}  // namespace phibe
