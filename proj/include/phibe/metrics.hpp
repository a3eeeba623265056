#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phibe/quadrature.hpp"

namespace phibe {

using ValueFn = std::function<double(const Eigen::VectorXd&)>;

struct ErrorReport {
  double l2 = 0.0;
  double linf = 0.0;
  double domain_measure = 0.0;
  // meta labels for the error-table CSV
  std::string method;
  int order = 0;
  double dt = 0.0;
  long long n = 0;
  std::uint64_t seed = 0;
};

// sqrt( sum_i w_i (V1(x_i) - V2(x_i))^2 ) over the quadrature nodes.
double l2_error(const ValueFn& V1, const ValueFn& V2, const Quadrature& quad);

// max_i |V1(x_i) - V2(x_i)| over the quadrature nodes.
double linf_error(const ValueFn& V1, const ValueFn& V2, const Quadrature& quad);

// Both norms in one pass, with meta labels attached by the caller afterwards.
ErrorReport error_report(const ValueFn& V1, const ValueFn& V2, const Quadrature& quad);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // in log space
  double r2 = 0.0;
};

// Ordinary least squares of log(err) against log(x).
FitResult fit_order(const std::vector<double>& x, const std::vector<double>& errors);

struct SeedSummary {
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_mean = 0.0;
  int count = 0;
};

SeedSummary seed_summary(const std::vector<double>& values);

}  // namespace phibe
