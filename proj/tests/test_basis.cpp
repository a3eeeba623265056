#include <cmath>
#include <random>

#include "doctest.h"
#include "phibe/basis.hpp"
#include "phibe/quadrature.hpp"
#include "phibe/rng.hpp"

using namespace phibe;

namespace {

Eigen::VectorXd fd_gradient_entry(const BasisSet& basis, Eigen::VectorXd s, int dim, double h) {
  Eigen::VectorXd plus, minus;
  s(dim) += h;
  basis.value(s, plus);
  s(dim) -= 2 * h;
  basis.value(s, minus);
  return (plus - minus) / (2 * h);
}

}  // namespace

TEST_CASE("fourier basis: values at s = 0 and sizes") {
  const BasisSet b = BasisSet::fourier(1);
  REQUIRE(b.p == 3);
  Eigen::VectorXd phi;
  b.value(Eigen::VectorXd::Constant(1, 0.0), phi);
  CHECK(phi(0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  CHECK(phi(1) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(phi(2) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK(BasisSet::fourier(4).p == 9);
  CHECK(BasisSet::fourier(30).p == 61);
}

TEST_CASE("fourier basis: second-derivative identity and periodicity") {
  const BasisSet b = BasisSet::fourier(3);
  Eigen::VectorXd s(1);
  s(0) = 0.73;
  std::vector<Eigen::MatrixXd> hess;
  b.hessian(s, hess);
  for (int m = 1; m <= 3; ++m) {
    const double expected = -m * m * std::cos(m * s(0)) / std::sqrt(M_PI);
    CHECK(hess[2 * m - 1](0, 0) == doctest::Approx(expected).epsilon(1e-12));
  }

  Eigen::VectorXd phi1, phi2;
  b.value(s, phi1);
  s(0) += 2.0 * M_PI;
  b.value(s, phi2);
  CHECK((phi1 - phi2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("polynomial2 basis: d = 1 monomial block") {
  const BasisSet b = BasisSet::polynomial2(1);
  REQUIRE(b.p == 3);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 2.0);
  Eigen::VectorXd phi;
  Eigen::MatrixXd grad;
  std::vector<Eigen::MatrixXd> hess;
  b.value(s, phi);
  b.gradient(s, grad);
  b.hessian(s, hess);
  CHECK(phi(0) == 1.0);
  CHECK(phi(1) == 2.0);
  CHECK(phi(2) == 4.0);
  CHECK(grad(0, 0) == 0.0);
  CHECK(grad(1, 0) == 1.0);
  CHECK(grad(2, 0) == 4.0);
  CHECK(hess[0](0, 0) == 0.0);
  CHECK(hess[1](0, 0) == 0.0);
  CHECK(hess[2](0, 0) == 2.0);
}

TEST_CASE("polynomial2 basis: pair_index covers the cross terms") {
  const BasisSet b = BasisSet::polynomial2(3);
  REQUIRE(b.p == 1 + 3 + 6);
  Eigen::VectorXd s(3);
  s << 0.5, -1.5, 2.0;
  Eigen::VectorXd phi;
  b.value(s, phi);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) CHECK(phi(b.pair_index(i, j)) == s(i) * s(j));
  CHECK(b.pair_index(2, 0) == b.pair_index(0, 2));
}

TEST_CASE("all bases: gradient and hessian match finite differences") {
  const std::vector<BasisSet> bases = {BasisSet::fourier(4), BasisSet::polynomial2(3),
                                       BasisSet::monomial1d(4), BasisSet::legendre1d(6)};
  auto rng = make_stream(123, 0);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  const double h = 1e-5;
  for (const BasisSet& b : bases) {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd s(b.d);
      for (int k = 0; k < b.d; ++k) s(k) = unif(rng);
      Eigen::MatrixXd grad;
      b.gradient(s, grad);
      for (int dim = 0; dim < b.d; ++dim) {
        const Eigen::VectorXd fd = fd_gradient_entry(b, s, dim, h);
        CHECK((grad.col(dim) - fd).cwiseAbs().maxCoeff() <= 1e-5);
      }
      std::vector<Eigen::MatrixXd> hess;
      b.hessian(s, hess);
      for (int dim = 0; dim < b.d; ++dim) {
        Eigen::VectorXd sp = s, sm = s;
        sp(dim) += h;
        sm(dim) -= h;
        Eigen::MatrixXd gp, gm;
        b.gradient(sp, gp);
        b.gradient(sm, gm);
        const Eigen::MatrixXd fd = (gp - gm) / (2 * h);
        for (int k = 0; k < b.p; ++k)
          CHECK((hess[k].col(dim) - fd.row(k).transpose()).cwiseAbs().maxCoeff() <= 1e-4);
      }
    }
  }
}

TEST_CASE("grad_dot and hess_contract agree with the dense evaluators") {
  const BasisSet b = BasisSet::polynomial2(3);
  Eigen::VectorXd s(3), v(3);
  s << 0.3, -0.7, 1.1;
  v << 2.0, -1.0, 0.5;
  Eigen::MatrixXd S(3, 3);
  S << 1.0, 0.2, 0.0, 0.2, 2.0, -0.3, 0.0, -0.3, 0.5;

  Eigen::MatrixXd grad;
  std::vector<Eigen::MatrixXd> hess;
  b.gradient(s, grad);
  b.hessian(s, hess);

  Eigen::VectorXd gd, hc;
  b.grad_dot(s, v, gd);
  b.hess_contract(s, S, hc);
  for (int k = 0; k < b.p; ++k) {
    CHECK(gd(k) == doctest::Approx(grad.row(k).dot(v)).epsilon(1e-14));
    CHECK(hc(k) == doctest::Approx((hess[k].array() * S.array()).sum()).epsilon(1e-14));
  }
}

TEST_CASE("gram_matrix: fourier orthonormality and polynomial entries") {
  const Quadrature q = gauss_legendre(-M_PI, M_PI, 200);
  const BasisSet fb = BasisSet::fourier(4);
  const Eigen::MatrixXd G = gram_matrix(fb, q);
  CHECK((G - Eigen::MatrixXd::Identity(fb.p, fb.p)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  const BasisSet cb = BasisSet::monomial1d(0);
  const Eigen::MatrixXd Gc = gram_matrix(cb, q);
  CHECK(Gc(0, 0) == doctest::Approx(2.0 * M_PI).epsilon(1e-12));

  const Quadrature q1 = gauss_legendre(-1.0, 1.0, 50);
  const BasisSet pb = BasisSet::polynomial2(1);
  const Eigen::MatrixXd Gp = gram_matrix(pb, q1);
  CHECK(Gp(0, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gram_matrix: positive definite for the configured bases") {
  {
    const Quadrature q = gauss_legendre(-M_PI, M_PI, 400);
    const Eigen::MatrixXd G = gram_matrix(BasisSet::fourier(8), q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -1.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 1.0);
    const Quadrature q = monte_carlo_box(lo, hi, 20000, 5);
    const Eigen::MatrixXd G = gram_matrix(BasisSet::polynomial2(3), q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("legendre basis: classical values and orthogonality") {
  const BasisSet b = BasisSet::legendre1d(4);
  Eigen::VectorXd s(1), phi;
  s(0) = 0.6;
  b.value(s, phi);
  const double x = 0.6;
  CHECK(phi(0) == 1.0);
  CHECK(phi(1) == doctest::Approx(x).epsilon(1e-14));
  CHECK(phi(2) == doctest::Approx(0.5 * (3 * x * x - 1)).epsilon(1e-14));
  CHECK(phi(3) == doctest::Approx(0.5 * (5 * x * x * x - 3 * x)).epsilon(1e-14));
  CHECK(phi(4) ==
        doctest::Approx((35 * x * x * x * x - 30 * x * x + 3) / 8.0).epsilon(1e-14));

  const Quadrature q = gauss_legendre(-1.0, 1.0, 60);
  const Eigen::MatrixXd G = gram_matrix(b, q);
  for (int k = 0; k <= 4; ++k)
    for (int l = 0; l <= 4; ++l) {
      const double expected = k == l ? 2.0 / (2 * k + 1) : 0.0;
      CHECK(G(k, l) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("basis weight argument: gram under a density") {
  // weight rho(s) = s^2 on [-1,1]: <1,1>_rho = 2/3
  const Quadrature q = gauss_legendre(-1.0, 1.0, 50);
  const BasisSet b = BasisSet::monomial1d(0);
  const Eigen::MatrixXd G =
      gram_matrix(b, q, [](const Eigen::VectorXd& s) { return s(0) * s(0); });
  CHECK(G(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}
