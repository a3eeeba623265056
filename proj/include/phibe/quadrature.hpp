#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

namespace phibe {

// Nodes and weights realizing integrals over a state domain. Deterministic
// rules carry Lebesgue weights (they sum to the measure of the domain); the
// Monte Carlo rule uses volume/N weights so the same convention holds in
// expectation.
struct Quadrature {
  enum class Kind { UniformTrapezoid, GaussLegendre, MonteCarlo };
  Kind kind = Kind::GaussLegendre;
  Eigen::MatrixXd nodes;    // N x d
  Eigen::VectorXd weights;  // N

  int size() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(nodes.cols()); }
  double measure() const { return weights.sum(); }
};

Quadrature gauss_legendre(double a, double b, int n);
Quadrature uniform_trapezoid(double a, double b, int n);
Quadrature monte_carlo_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int n,
                           std::uint64_t seed);

// Physicists' Gauss-Hermite rule: sum_i w_i f(x_i) ~ int e^{-x^2} f(x) dx.
// For Z ~ N(mu, sigma^2), E[f(Z)] = (1/sqrt(pi)) sum_i w_i f(mu + sqrt(2) sigma x_i).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n);

}  // namespace phibe
