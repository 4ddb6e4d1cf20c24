#include "kcut/quadrature.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <limits>
#include <queue>
#include <utility>

#include "kcut/errors.hpp"

namespace kcut::quadrature {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at kXgk[1], kXgk[3], kXgk[5] and the centre.
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a, b, value, error, abs;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv1[7], fv2[7];
  const double fc = f(c);
  double k = kWgk[7] * fc;
  double g = kWg[3] * fc;
  double abs_k = std::fabs(k);
  for (int i = 0; i < 7; ++i) {
    fv1[i] = f(c - h * kXgk[i]);
    fv2[i] = f(c + h * kXgk[i]);
    k += kWgk[i] * (fv1[i] + fv2[i]);
    abs_k += kWgk[i] * (std::fabs(fv1[i]) + std::fabs(fv2[i]));
    if (i % 2 == 1) g += kWg[i / 2] * (fv1[i] + fv2[i]);
  }
  // QUADPACK's scaled estimate: |K - G| alone can vanish by accident.
  const double mean = 0.5 * k;
  double asc = kWgk[7] * std::fabs(fc - mean);
  for (int i = 0; i < 7; ++i) asc += kWgk[i] * (std::fabs(fv1[i] - mean) + std::fabs(fv2[i] - mean));
  asc *= std::fabs(h);
  abs_k *= std::fabs(h);
  double error = std::fabs((k - g) * h);
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  if (abs_k > std::numeric_limits<double>::min() / (50 * kEps)) {
    error = std::max(50 * kEps * abs_k, error);
  }
  return {a, b, k * h, std::isfinite(error) ? error : HUGE_VAL, abs_k};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_intervals) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  Panel first = kronrod(f, a, b);
  double value = first.value;
  double error = first.error;
  double abs_total = first.abs;
  heap.push(first);
  int intervals = 1;
  // Requests below the rounding floor of the rule are met at that floor.
  while (error > std::max({abs_tol, rel_tol * std::fabs(value), 50 * kEps * abs_total})) {
    if (intervals >= max_intervals) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "adaptive quadrature on [%.6g, %.6g] stopped at error %.3g after %d panels",
                    a, b, error, intervals);
      throw NumericError(buf);
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = kronrod(f, worst.a, mid);
    const Panel right = kronrod(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    abs_total += left.abs + right.abs - worst.abs;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (heap.size() % 64 == 0) {
      // Re-sum to stop drift from the running updates.
      auto copy = heap;
      value = 0.0;
      error = 0.0;
      abs_total = 0.0;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        abs_total += copy.top().abs;
        copy.pop();
      }
    }
  }
  return {value, error, intervals};
}

Rule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  // Returns P_n(x) and P_n'(x).
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  Rule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, dp] = legendre(x);
      const double dx = pn / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

}  // namespace kcut::quadrature
