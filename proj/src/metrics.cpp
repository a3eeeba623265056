#include "phibe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phibe {

ErrorReport error_report(const ValueFn& V1, const ValueFn& V2, const Quadrature& quad) {
  ErrorReport rep;
  rep.domain_measure = quad.measure();
  double acc = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < quad.size(); ++i) {
    Eigen::VectorXd x = quad.nodes.row(i).transpose();
    double diff = V1(x) - V2(x);
    if (!std::isfinite(diff)) throw std::runtime_error("error_report: non-finite evaluation");
    rep.linf = std::max(rep.linf, std::abs(diff));
    double term = quad.weights(i) * diff * diff - comp;
    double next = acc + term;
    comp = (next - acc) - term;
    acc = next;
  }
  rep.l2 = std::sqrt(std::max(acc, 0.0));
  return rep;
}

double l2_error(const ValueFn& V1, const ValueFn& V2, const Quadrature& quad) {
  return error_report(V1, V2, quad).l2;
}

double linf_error(const ValueFn& V1, const ValueFn& V2, const Quadrature& quad) {
  return error_report(V1, V2, quad).linf;
}

FitResult fit_order(const std::vector<double>& x, const std::vector<double>& errors) {
  if (x.size() != errors.size()) throw std::invalid_argument("fit_order: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit_order: need at least 3 points");
  const int n = static_cast<int>(x.size());
  std::vector<double> lx(n), le(n);
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(errors[i] > 0))
      throw std::invalid_argument("fit_order: inputs must be positive");
    lx[i] = std::log(x[i]);
    le[i] = std::log(errors[i]);
  }
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += le[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (le[i] - my);
    syy += (le[i] - my) * (le[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_order: degenerate abscissae");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

SeedSummary seed_summary(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("seed_summary: need at least 2 values");
  SeedSummary s;
  s.count = static_cast<int>(values.size());
  const double n = static_cast<double>(s.count);
  for (double v : values) s.mean += v;
  s.mean /= n;
  for (double v : values) s.variance += (v - s.mean) * (v - s.mean);
  s.variance /= (n - 1.0);
  s.stderr_mean = std::sqrt(s.variance / n);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  s.median = (sorted.size() % 2 == 1) ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  return s;
}

}  // namespace phibe
