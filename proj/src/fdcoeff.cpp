#include "phibe/fdcoeff.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace phibe {

namespace {

// Rational arithmetic over __int128 keeps the Vandermonde elimination exact.
// For order <= 8 every intermediate fits comfortably (the 9x9 Vandermonde
// determinant is ~1.2e21).
struct Frac {
  __int128 num = 0;
  __int128 den = 1;
};

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Frac reduce(Frac f) {
  if (f.den < 0) {
    f.num = -f.num;
    f.den = -f.den;
  }
  __int128 g = gcd128(f.num, f.den);
  if (g > 1) {
    f.num /= g;
    f.den /= g;
  }
  return f;
}

Frac sub(const Frac& a, const Frac& b) {
  return reduce({a.num * b.den - b.num * a.den, a.den * b.den});
}

Frac mul(const Frac& a, const Frac& b) {
  return reduce({a.num * b.num, a.den * b.den});
}

Frac div(const Frac& a, const Frac& b) {
  if (b.num == 0) throw std::runtime_error("fd_coefficients: division by zero in elimination");
  return reduce({a.num * b.den, a.den * b.num});
}

long long ll_checked(__int128 v) {
  if (v > __int128(9223372036854775807LL) || v < -__int128(9223372036854775807LL))
    throw std::runtime_error("fd_coefficients: rational overflow");
  return static_cast<long long>(v);
}

}  // namespace

std::vector<Rational> fd_coefficients_exact(int order) {
  if (order < 1 || order > 8)
    throw std::invalid_argument("fd_coefficients: order must be in [1, 8]");

  const int n = order + 1;
  // Row k, column j holds j^k with 0^0 = 1.
  std::vector<std::vector<Frac>> m(n, std::vector<Frac>(n));
  std::vector<Frac> rhs(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      __int128 pw = 1;
      for (int t = 0; t < k; ++t) pw *= j;
      m[k][j] = {pw, 1};
    }
    rhs[k] = {k == 1 ? 1 : 0, 1};
  }

  // Gaussian elimination with first-nonzero pivoting; exact arithmetic makes
  // pivot magnitude irrelevant.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r) {
      if (m[r][col].num != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) throw std::runtime_error("fd_coefficients: singular Vandermonde system");
    std::swap(m[col], m[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < n; ++r) {
      if (m[r][col].num == 0) continue;
      Frac f = div(m[r][col], m[col][col]);
      for (int c = col; c < n; ++c) m[r][c] = sub(m[r][c], mul(f, m[col][c]));
      rhs[r] = sub(rhs[r], mul(f, rhs[col]));
    }
  }
  std::vector<Frac> x(n);
  for (int r = n - 1; r >= 0; --r) {
    Frac acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc = sub(acc, mul(m[r][c], x[c]));
    x[r] = div(acc, m[r][r]);
  }

  std::vector<Rational> out(n);
  for (int j = 0; j < n; ++j) out[j] = {ll_checked(x[j].num), ll_checked(x[j].den)};
  return out;
}

FdCoefficients fd_coefficients(int order) {
  const auto exact = fd_coefficients_exact(order);
  FdCoefficients c;
  c.order = order;
  c.weights.resize(exact.size());
  for (std::size_t j = 0; j < exact.size(); ++j)
    c.weights[j] = static_cast<double>(exact[j].num) / static_cast<double>(exact[j].den);
  return c;
}

std::vector<double> moment_residuals(const FdCoefficients& coeffs) {
  const int n = coeffs.order + 1;
  std::vector<double> res(n, 0.0);
  for (int k = 0; k < n; ++k) {
    // The raw moments reach ~1e7 at order 8, so the 1e-12 contract is on the
    // residual scaled by the term magnitude, not on the raw cancellation.
    double acc = 0.0, scale = 0.0;
    for (int j = 0; j < n; ++j) {
      double pw = (k == 0) ? 1.0 : std::pow(static_cast<double>(j), k);
      acc += coeffs.weights[j] * pw;
      scale += std::abs(coeffs.weights[j]) * pw;
    }
    res[k] = (acc - (k == 1 ? 1.0 : 0.0)) / std::max(1.0, scale);
  }
  return res;
}

double order_constant(const FdCoefficients& coeffs) {
  const int i = coeffs.order;
  double fact = 1.0;
  for (int t = 2; t <= i + 1; ++t) fact *= t;
  double acc = 0.0;
  for (int j = 1; j <= i; ++j)
    acc += std::abs(coeffs.weights[j]) * std::pow(static_cast<double>(j), i + 1);
  return acc / fact;
}

}  // namespace phibe
