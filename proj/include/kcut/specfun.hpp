#pragma once

namespace kcut::specfun {

double gamma(double a);
double log_gamma(double a);

// Upper incomplete gamma Γ(a,x) = ∫_x^∞ t^{a-1} e^{-t} dt.
double upper_gamma(double a, double x);
// Lower incomplete gamma γ(a,x) = Γ(a) - Γ(a,x).
double lower_gamma(double a, double x);
// Band Γ(a,x0,x1) = Γ(a,x0) - Γ(a,x1).
double band_gamma(double a, double x0, double x1);

// Regularized forms P = γ/Γ and Q = Γ(a,x)/Γ(a).
double p(double a, double x);
double q(double a, double x);

// log Q and log P without cancellation in the tails; log_q is what
// callers should use to form Q(a,x)^d for large d.
double log_q(double a, double x);
double log_p(double a, double x);

// Inverse of x -> Q(a,x) on (0,1]; returns 0 for y >= 1.
double q_inv(double a, double y);

}  // namespace kcut::specfun
