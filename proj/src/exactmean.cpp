#include "kcut/exactmean.hpp"

#include <cmath>
#include <cstdio>

#include "kcut/errors.hpp"
#include "kcut/quadrature.hpp"
#include "kcut/specfun.hpp"

namespace kcut::exactmean {

namespace {

// Integrand tail beyond X is at most Q(k,X)^d Q(r,X); cut where that drops below this.
constexpr double kTailLog = -39.1439465808987766;  // log(1e-17)
constexpr double kAbsTol = 1e-11;

void check_orders(int r, int k) {
  if (k < 1 || r < 1 || r > k) {
    throw DomainError("need 1 <= r <= k, got r=" + std::to_string(r) + ", k=" + std::to_string(k));
  }
}

double integration_limit(int r, int k, double d) {
  auto tail = [&](double x) { return d * specfun::log_q(k, x) + specfun::log_q(r, x); };
  double lo = 0.0;
  double hi = 1.0;
  while (tail(hi) > kTailLog) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 60 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > kTailLog ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

double record_prob(int r, int k, std::uint64_t ancestors, double y) {
  check_orders(r, k);
  if (!(y > 0.0)) throw DomainError("record_prob: y must be > 0");
  if (ancestors == 0) return std::isinf(y) ? 1.0 : specfun::p(r, y);

  const double d = static_cast<double>(ancestors);
  const double upper = std::min(y, integration_limit(r, k, d));
  const double log_norm = -specfun::log_gamma(r);
  auto integrand = [&](double x) {
    if (x <= 0.0) return r == 1 ? 1.0 : 0.0;
    return std::exp((r - 1) * std::log(x) - x + log_norm + d * specfun::log_q(k, x));
  };
  const auto result = quadrature::integrate(integrand, 0.0, upper, 1e-13, 1e-12);
  if (!(result.error <= kAbsTol)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "record_prob(r=%d, k=%d, ancestors=%llu): quadrature error %.3g exceeds %.1g", r,
                  k, static_cast<unsigned long long>(ancestors), result.error, kAbsTol);
    throw NumericError(buf);
  }
  return result.value;
}

double expected_records(const MeanQuery& q) {
  check_orders(q.r, q.k);
  if (q.n < 1) throw DomainError("expected_records: n must be >= 1");
  if (!(q.y > 0.0)) throw DomainError("expected_records: y must be > 0");
  const bool conditional = !std::isinf(q.y);
  if (q.variant == cutsim::Variant::edge && conditional) {
    throw DomainError("expected_records: the edge variant has no root clock to condition on");
  }
  const CompleteTree tree(q.n);
  double sum = 0.0;
  if (q.variant == cutsim::Variant::node && !conditional) {
    for (int h = 0; h <= tree.height(); ++h) {
      sum += static_cast<double>(tree.level_count(h)) * record_prob(q.r, q.k, h);
    }
    return sum;
  }
  // Root excluded: a node at height h must beat its h-1 non-root ancestors.
  for (int h = 1; h <= tree.height(); ++h) {
    sum += static_cast<double>(tree.level_count(h)) * record_prob(q.r, q.k, h - 1, q.y);
  }
  return sum;
}

double expected_records_full(int height, int k, int r) {
  check_orders(r, k);
  if (height < 0 || height > 1000) {
    throw DomainError("expected_records_full: height must lie in [0,1000]");
  }
  double sum = 0.0;
  for (int h = 0; h <= height; ++h) sum += std::ldexp(record_prob(r, k, h), h);
  return sum;
}

double asymptotic_mean(std::uint64_t n, const series::ConstantTable& table) {
  if (n < 4) throw DomainError("asymptotic_mean: n must be >= 4");
  const double nd = static_cast<double>(n);
  const double lg = std::log2(nd);
  const int m = CompleteTree::depth(n);
  const double scale = table.scale * std::pow(lg, -static_cast<double>(table.r) / table.k - 1.0);
  return scale * nd * (series::mu(table, nd) - std::log2(lg)) + scale * std::ldexp(2.0, m);
}

}  // namespace kcut::exactmean
