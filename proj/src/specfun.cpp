#include "kcut/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "kcut/errors.hpp"

namespace kcut::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 100000;
constexpr int kMaxNewton = 100;

void check_shape(double a, const char* fn) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(std::string(fn) + ": shape must be a positive finite real, got " +
                      std::to_string(a));
  }
}

void check_arg(double x, const char* fn) {
  if (!(x >= 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be >= 0, got " + std::to_string(x));
  }
}

bool series_regime(double a, double x) { return x < a + 1.0; }

// S with P(a,x) = x^a e^{-x} S / Γ(a); S = Σ_n x^n / (a (a+1) ... (a+n)).
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * kEps) return sum;
  }
  throw NumericError("incomplete gamma series did not converge");
}

// h with Q(a,x) = x^a e^{-x} h / Γ(a), modified Lentz evaluation.
double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete gamma continued fraction did not converge");
}

// log(x^a e^{-x} / Γ(a))
double log_prefactor(double a, double x) { return a * std::log(x) - x - log_gamma(a); }

}  // namespace

double gamma(double a) {
  check_shape(a, "gamma");
  return std::tgamma(a);
}

double log_gamma(double a) {
  check_shape(a, "log_gamma");
  int sign = 0;
  return ::lgamma_r(a, &sign);
}

double p(double a, double x) {
  check_shape(a, "p");
  check_arg(x, "p");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (series_regime(a, x)) return std::exp(log_prefactor(a, x)) * lower_series(a, x);
  return -std::expm1(log_prefactor(a, x) + std::log(upper_fraction(a, x)));
}

double q(double a, double x) {
  check_shape(a, "q");
  check_arg(x, "q");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (series_regime(a, x)) return -std::expm1(log_prefactor(a, x) + std::log(lower_series(a, x)));
  return std::exp(log_prefactor(a, x)) * upper_fraction(a, x);
}

double log_q(double a, double x) {
  check_shape(a, "log_q");
  check_arg(x, "log_q");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  if (series_regime(a, x)) return std::log1p(-std::exp(log_prefactor(a, x)) * lower_series(a, x));
  return log_prefactor(a, x) + std::log(upper_fraction(a, x));
}

double log_p(double a, double x) {
  check_shape(a, "log_p");
  check_arg(x, "log_p");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  if (series_regime(a, x)) return log_prefactor(a, x) + std::log(lower_series(a, x));
  return std::log1p(-std::exp(log_prefactor(a, x)) * upper_fraction(a, x));
}

double upper_gamma(double a, double x) {
  check_shape(a, "upper_gamma");
  check_arg(x, "upper_gamma");
  if (x == 0.0) return std::tgamma(a);
  if (std::isinf(x)) return 0.0;
  if (series_regime(a, x)) return std::tgamma(a) * q(a, x);
  return std::exp(a * std::log(x) - x) * upper_fraction(a, x);
}

double lower_gamma(double a, double x) {
  check_shape(a, "lower_gamma");
  check_arg(x, "lower_gamma");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return std::tgamma(a);
  if (series_regime(a, x)) return std::exp(a * std::log(x) - x) * lower_series(a, x);
  return std::tgamma(a) * p(a, x);
}

double band_gamma(double a, double x0, double x1) {
  check_shape(a, "band_gamma");
  check_arg(x0, "band_gamma");
  check_arg(x1, "band_gamma");
  if (series_regime(a, x0) && series_regime(a, x1)) return lower_gamma(a, x1) - lower_gamma(a, x0);
  return upper_gamma(a, x0) - upper_gamma(a, x1);
}

double q_inv(double a, double y) {
  check_shape(a, "q_inv");
  if (!(y > 0.0)) throw DomainError("q_inv: y must be > 0, got " + std::to_string(y));
  if (y >= 1.0) return 0.0;

  // Solve in t = log x.  For y <= 1/2 match log Q, otherwise log P against log(1-y),
  // so the residual never loses digits to cancellation.
  const bool upper = y <= 0.5;
  const double target = upper ? std::log(y) : std::log1p(-y);
  const double lg = log_gamma(a);

  // g is increasing in t; dg/dt = x^a e^{-x} / (Γ(a) · Q or P).
  auto g = [&](double t) {
    const double x = std::exp(t);
    return upper ? target - log_q(a, x) : log_p(a, x) - target;
  };
  auto slope = [&](double t, double gt) {
    const double level = upper ? target - gt : gt + target;
    return std::exp(a * t - std::exp(t) - lg - level);
  };

  double t = upper ? std::log(std::max(-std::log(y), 1e-300))
                   : (std::lgamma(a + 1.0) + std::log1p(-y)) / a;
  double gt = g(t);
  if (gt == 0.0) return std::exp(t);

  // Expand a bracket [lo, hi] with g(lo) < 0 < g(hi).
  double lo = t, hi = t;
  double glo = gt, ghi = gt;
  double step = 1.0;
  for (int i = 0; i < 200 && !(glo < 0.0 && ghi > 0.0); ++i) {
    if (gt > 0.0) {
      lo = t - step;
      glo = g(lo);
      if (glo > 0.0) {
        hi = lo;
        ghi = glo;
      }
    } else {
      hi = t + step;
      ghi = g(hi);
      if (ghi < 0.0) {
        lo = hi;
        glo = ghi;
      }
    }
    step *= 2.0;
    if (glo == 0.0) return std::exp(lo);
    if (ghi == 0.0) return std::exp(hi);
  }
  if (!(glo < 0.0 && ghi > 0.0)) {
    throw NumericError("q_inv: failed to bracket root for a=" + std::to_string(a) +
                       ", y=" + std::to_string(y));
  }
  if (!(t > lo && t < hi)) {
    t = 0.5 * (lo + hi);
    gt = g(t);
  }

  for (int it = 0; it < kMaxNewton; ++it) {
    if (gt == 0.0) return std::exp(t);
    if (gt < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double scale = std::max(1.0, std::fabs(t));
    if (hi - lo <= 4.0 * kEps * scale) return std::exp(t);

    const double d = slope(t, gt);
    double next = (d > 0.0 && std::isfinite(d)) ? t - gt / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double delta = std::fabs(next - t);
    t = next;
    gt = g(t);
    if (delta <= 2.0 * kEps * scale) return std::exp(t);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "q_inv: no convergence for a=%.17g, y=%.17g; bracket [%.17g, %.17g]",
                a, y, std::exp(lo), std::exp(hi));
  throw NumericError(buf);
}

}  // namespace kcut::specfun
