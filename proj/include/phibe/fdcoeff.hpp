#pragma once

#include <vector>

namespace phibe {

// Backward-looking multi-step difference weights a^(i) = (a_0, ..., a_i).
// They satisfy the moment conditions
//   sum_j a_j j^k = delta_{k1},   k = 0..i,
// so that (1/dt) sum_j a_j s(j dt) approximates s'(0) to order i.
struct FdCoefficients {
  int order = 0;
  std::vector<double> weights;  // size order+1, a_0 first
};

struct Rational {
  long long num = 0;
  long long den = 1;
};

// Exact rational solve of the Vandermonde system A_i a = e_1 with
// (A_i)_{kj} = j^k and the 0^0 = 1 convention (the k=0 row is all ones).
// Orders outside [1, 8] are rejected.
std::vector<Rational> fd_coefficients_exact(int order);

FdCoefficients fd_coefficients(int order);

// residual[k] = (sum_j a_j j^k - delta_{k1}) / max(1, sum_j |a_j| j^k),
// for k = 0..order.
std::vector<double> moment_residuals(const FdCoefficients& coeffs);

// Error constant of the order-i stencil: C_i = sum_j |a_j| j^{i+1} / (i+1)!.
double order_constant(const FdCoefficients& coeffs);

}  // namespace phibe
