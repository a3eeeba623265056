#include "phibe/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "phibe/rng.hpp"

namespace phibe {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix, weights are mu_0 times the squared first eigenvector components.
void golub_welsch(const Eigen::VectorXd& offdiag, double mu0, Eigen::VectorXd& nodes,
                  Eigen::VectorXd& weights) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    jac(i, i + 1) = offdiag(i);
    jac(i + 1, i) = offdiag(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("quadrature: Jacobi eigensolve failed");
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double v0 = es.eigenvectors()(0, i);
    weights(i) = mu0 * v0 * v0;
  }
}

}  // namespace

Quadrature gauss_legendre(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  if (!(b > a)) throw std::invalid_argument("gauss_legendre: need b > a");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::VectorXd x, w;
  golub_welsch(off, 2.0, x, w);

  Quadrature q;
  q.kind = Quadrature::Kind::GaussLegendre;
  q.nodes.resize(n, 1);
  q.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    q.nodes(i, 0) = mid + half * x(i);
    q.weights(i) = half * w(i);
  }
  return q;
}

Quadrature uniform_trapezoid(double a, double b, int n) {
  if (n < 2) throw std::invalid_argument("uniform_trapezoid: n must be >= 2");
  if (!(b > a)) throw std::invalid_argument("uniform_trapezoid: need b > a");
  Quadrature q;
  q.kind = Quadrature::Kind::UniformTrapezoid;
  q.nodes.resize(n, 1);
  q.weights.resize(n);
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) {
    q.nodes(i, 0) = a + h * i;
    q.weights(i) = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
  return q;
}

Quadrature monte_carlo_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int n,
                           std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("monte_carlo_box: n must be >= 1");
  if (lo.size() != hi.size()) throw std::invalid_argument("monte_carlo_box: box dims differ");
  const int d = static_cast<int>(lo.size());
  double vol = 1.0;
  for (int j = 0; j < d; ++j) {
    if (!(hi(j) > lo(j))) throw std::invalid_argument("monte_carlo_box: need hi > lo");
    vol *= hi(j) - lo(j);
  }
  Quadrature q;
  q.kind = Quadrature::Kind::MonteCarlo;
  q.nodes.resize(n, d);
  q.weights = Eigen::VectorXd::Constant(n, vol / n);
  auto rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) q.nodes(i, j) = lo(j) + (hi(j) - lo(j)) * unif(rng);
  return q;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * k);
  Eigen::VectorXd x, w;
  golub_welsch(off, std::sqrt(M_PI), x, w);
  return {x, w};
}

}  // namespace phibe
