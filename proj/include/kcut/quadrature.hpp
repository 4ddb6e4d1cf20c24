#pragma once

#include <functional>
#include <vector>

namespace kcut::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [a,b]: the panel with the largest
// local error is bisected until the total estimate is below max(abs_tol, rel_tol*|value|).
// Throws NumericError carrying the achieved bound when max_intervals is reached.
Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_intervals = 4000);

// Gauss-Legendre rule with n points mapped to [0,1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule gauss_legendre(int n);

}  // namespace kcut::quadrature
