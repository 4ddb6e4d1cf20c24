#include "kcut/limitdist.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <tuple>

#include "kcut/errors.hpp"
#include "kcut/parallel.hpp"
#include "kcut/quadrature.hpp"
#include "kcut/rng.hpp"
#include "kcut/specfun.hpp"
#include "kcut/tree.hpp"

namespace kcut::limitdist {

namespace {

using cplx = std::complex<double>;

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;
constexpr double kSeriesRel = 1e-16;
// Panels are resolved on a grid while t x_j stays below this; beyond it the
// oscillatory remainder is integrated by parts.
constexpr double kResolvedPhase = 4400.0;
// Below this value of t x_j the panels are replaced by a moment expansion.
constexpr double kSmallPhase = 1e-3;
constexpr int kNodesPerSub = 16;
constexpr int kLevels = 9;  // 8, 16, ..., 2048 sub-intervals per panel
constexpr int kGrading = 20;

double frac(double x) { return x - std::floor(x); }

// Chebyshev interpolant on [lo, hi].
template <class T>
class Chebyshev {
 public:
  Chebyshev() = default;
  Chebyshev(double lo, double hi, int n, const std::function<T(double)>& f) : lo_(lo), hi_(hi) {
    std::vector<T> values(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const double x = std::cos(kPi * (j + 0.5) / n);
      values[static_cast<std::size_t>(j)] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
    }
    c_.assign(static_cast<std::size_t>(n), T{});
    for (int m = 0; m < n; ++m) {
      T acc{};
      for (int j = 0; j < n; ++j) {
        acc += values[static_cast<std::size_t>(j)] * std::cos(kPi * m * (j + 0.5) / n);
      }
      c_[static_cast<std::size_t>(m)] = acc * (2.0 / n);
    }
    c_[0] *= 0.5;
  }

  T operator()(double x) const {
    const double u = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
    T b1{}, b2{};
    for (std::size_t i = c_.size(); i-- > 1;) {
      const T b0 = c_[i] + 2.0 * u * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return c_[0] + u * b1 - b2;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<T> c_;
};

// e^{iθ} - 1 without cancellation in the real part.
cplx expm1i(double theta) {
  const double s = std::sin(0.5 * theta);
  return {-2.0 * s * s, std::sin(theta)};
}

void check_x(double x, const char* fn) {
  if (!(x > 0.0)) throw DomainError(std::string(fn) + ": x must be > 0");
}

}  // namespace

void validate(const LimitParams& p) {
  if (p.k < 1 || p.r < 1 || p.r > p.k) {
    throw DomainError("limit law needs 1 <= r <= k, got r=" + std::to_string(p.r) +
                      ", k=" + std::to_string(p.k));
  }
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) {
    throw DomainError("limit law needs gamma in [0,1], got " + std::to_string(p.gamma));
  }
  if (p.s_max < 0) throw DomainError("s_max must be >= 0");
  if (!(p.quad_tol > 0.0)) throw DomainError("quad_tol must be > 0");
  if (!(p.t_max >= 0.0)) throw DomainError("t_max must be >= 0");
}

ScaleParams ScaleParams::from_n(std::uint64_t n, int k) {
  if (n < 16) throw DomainError("ScaleParams: n must be >= 16");
  if (k < 1) throw DomainError("ScaleParams: k must be >= 1");
  ScaleParams s;
  s.n = n;
  s.k = k;
  s.m = CompleteTree::depth(n);
  const double lg = std::log2(static_cast<double>(n));
  const double lglg = std::log2(lg);
  s.ell = static_cast<int>(std::floor(lglg));
  s.L = static_cast<int>(std::floor((2.0 - 1.0 / (2.0 * k)) * lglg));
  s.alpha = std::max(0.0, lg - s.m);
  s.beta = lglg - s.ell;
  return s;
}

double ScaleParams::gamma() const { return frac(alpha - beta); }

struct LimitLaw::Grid {
  struct Node {
    double u;      // 2^φ
    double omega;  // quadrature weight times Γ(a)^2 ln2 D(φ) / 2^φ
  };
  struct Level {
    std::vector<Node> nodes;
    double s1 = 0.0;  // Σ ω u, this level's value of ∫_{panel} x dν
  };
  Chebyshev<double> d_tail;  // Σ_{s>=2} of the shape series on [0,1]
  double d0 = 0.0;
  double d1 = 0.0;  // left limit at φ = 1
  double t0 = 0.0;  // Σ_s 2^{-s} Q^{-1}(a, 2^{-s})
  long j1 = 0;
  double below_one = 0.0;  // ∫_{x_{j1}}^1 x dν
  std::array<double, 6> moments{};  // moments[p] = Σ ω u^p on the finest level
  std::vector<Level> levels;
};

struct LimitLaw::Inversion {
  std::vector<Chebyshev<cplx>> pieces;  // exponent on [1,2]
  double unit = 0.0;
  double decay = 0.0;  // min over s in [1,2] of -Re I(s)/s
  double t_max = 0.0;
  double error = 0.0;
  std::vector<double> z, cdf, pdf;
  double z_hi = 0.0;
  double tail_hi = 0.0;
};

LimitLaw::LimitLaw(const LimitParams& p) : p_(p) {
  validate(p);
  a_ = static_cast<double>(p.r) / p.k;
  g_ = specfun::gamma(a_);
}

LimitLaw::~LimitLaw() = default;

double LimitLaw::phase(double x) const { return frac(p_.gamma + std::log2(x / g_)); }

double LimitLaw::breakpoint(long j) const {
  return g_ * std::exp2(static_cast<double>(j) - p_.gamma);
}

namespace {

// 4^{φ-s} e^{q} q^{1-a} with q = Q^{-1}(a, 2^{φ-s}).
double shape_term(double a, double phi, int s) {
  const double y = std::exp2(phi - s);
  const double q = specfun::q_inv(a, y);
  return y * y * std::exp(q) * std::pow(q, 1.0 - a);
}

// Sum of shape terms from s = first.  Each term is at most 2^{φ-s}/Γ(a)
// (Γ(a,q) <= q^{a-1} e^{-q} for a <= 1), which bounds the omitted tail.
double shape_sum(double a, double g, double phi, int first, int s_max) {
  double sum = 0.0;
  for (int s = first;; ++s) {
    if (s_max > 0 && s > s_max) break;
    sum += shape_term(a, phi, s);
    if (s_max == 0 && std::exp2(phi - s) / g <= kSeriesRel * sum) break;
    if (s > 1100) break;
  }
  return sum;
}

}  // namespace

double LimitLaw::shape(double phi) const { return shape_sum(a_, g_, phi, 1, p_.s_max); }

double LimitLaw::shape_fast(const Grid& g, double phi) const {
  return shape_term(a_, phi, 1) + g.d_tail(phi);
}

double LimitLaw::density(double x) const {
  check_x(x, "levy_density");
  return g_ * g_ / (x * x) * shape(phase(x));
}

double LimitLaw::tail(double x) const {
  check_x(x, "levy_tail");
  const double phi = phase(x);
  // Q^{-1}(a,y) <= log(1/y) bounds the omitted part by 2^{φ-s} (s - φ + 2) ln 2.
  double sum = 0.0;
  for (int s = 1;; ++s) {
    if (p_.s_max > 0 && s > p_.s_max) break;
    const double y = std::exp2(phi - s);
    sum += y * specfun::q_inv(a_, y);
    if (p_.s_max == 0 && y * (s - phi + 2.0) * kLn2 <= kSeriesRel * sum) break;
    if (s > 1100) break;
  }
  return g_ / x * sum;
}

double LimitLaw::drift() const {
  const double lg_g = std::log2(g_);
  const double c = frac(p_.gamma - lg_g);
  // Both parts of each term are at most Γ(a) y (log(1/y) + 1).
  double sum = 0.0;
  for (int t = 1;; ++t) {
    if (p_.s_max > 0 && t > p_.s_max) break;
    const double y = std::exp2(c - t);
    const double q = specfun::q_inv(a_, y);
    sum += std::exp(-q) * std::pow(q, a_) - y * g_ * q;
    const double bound = 2.0 * g_ * y * ((t - c + 2.0) * kLn2 + 1.0);
    if (p_.s_max == 0 && bound <= 1e-16) break;
    if (t > 1100) break;
  }
  return sum + specfun::gamma(1.0 + a_) * (std::exp2(c) - c - lg_g - 1.0);
}

double LimitLaw::unit_moment() const {
  const auto res = quadrature::integrate([this](double phi) { return shape(phi); }, 0.0, 1.0,
                                         1e-14, 1e-13);
  return g_ * g_ * kLn2 * res.value;
}

const LimitLaw::Grid& LimitLaw::grid() const {
  std::call_once(grid_once_, [this] {
    auto g = std::make_unique<Grid>();
    g->d_tail = Chebyshev<double>(0.0, 1.0, 40, [this](double phi) {
      return shape_sum(a_, g_, phi, 2, p_.s_max);
    });
    g->d0 = shape(0.0);
    g->d1 = g->d0 + (a_ == 1.0 ? 1.0 : 0.0);
    for (int s = 1; s < 1100; ++s) {
      const double y = std::exp2(-s);
      g->t0 += y * specfun::q_inv(a_, y);
      if (y * (s + 2.0) * kLn2 <= kSeriesRel * g->t0) break;
    }
    const double c = frac(p_.gamma - std::log2(g_));
    g->j1 = static_cast<long>(std::floor(p_.gamma - std::log2(g_)));
    Grid& gr = *g;

    const double scale = g_ * g_ * kLn2;
    if (c > 0.0) {
      gr.below_one = scale * quadrature::integrate(
                                 [&](double phi) { return shape_fast(gr, phi); }, 0.0, c,
                                 1e-15, 1e-13)
                                 .value;
    }

    const auto rule = quadrature::gauss_legendre(kNodesPerSub);
    for (int level = 0; level < kLevels; ++level) {
      const int nsub = 8 << level;
      const double h = 1.0 / nsub;
      std::vector<std::pair<double, double>> subs;
      for (int i = 0; i + 1 < nsub; ++i) subs.emplace_back(i * h, (i + 1) * h);
      // Geometric grading toward φ = 1, where Q^{-1}(a, y)^{1-a} is not smooth.
      double lo = 1.0 - h;
      double width = h;
      for (int i = 0; i < kGrading; ++i) {
        width *= 0.5;
        subs.emplace_back(lo, lo + width);
        lo += width;
      }
      subs.emplace_back(lo, 1.0);

      Grid::Level lv;
      for (const auto& [lo_i, hi_i] : subs) {
        for (int q = 0; q < kNodesPerSub; ++q) {
          const double phi = lo_i + (hi_i - lo_i) * rule.nodes[static_cast<std::size_t>(q)];
          const double w = (hi_i - lo_i) * rule.weights[static_cast<std::size_t>(q)];
          const double u = std::exp2(phi);
          const double omega = w * scale * shape_fast(gr, phi) / u;
          lv.nodes.push_back({u, omega});
          lv.s1 += omega * u;
        }
      }
      gr.levels.push_back(std::move(lv));
    }
    for (const auto& node : gr.levels.back().nodes) {
      double up = 1.0;
      for (int pw = 0; pw < 6; ++pw) {
        gr.moments[static_cast<std::size_t>(pw)] += node.omega * up;
        up *= node.u;
      }
    }
    grid_ = std::move(g);
  });
  return *grid_;
}

cplx LimitLaw::exponent(double t) const {
  if (!std::isfinite(t)) throw DomainError("char_fn: t must be finite");
  if (t == 0.0) return {0.0, 0.0};
  if (t < 0.0) return std::conj(exponent(-t));
  const Grid& g = grid();
  const cplx it(0.0, t);

  const long j_small =
      static_cast<long>(std::floor(std::log2(kSmallPhase / (t * g_)) + p_.gamma));
  const long j_lo = std::min(g.j1, j_small);

  // Panels below j_lo: Σ_{p>=2} (it)^p/p! ∫ x^p dν with ∫_{panel j} x^p dν = x_j^{p-1} S_p.
  cplx total{0.0, 0.0};
  {
    const double x_lo = breakpoint(j_lo);
    cplx itp = it;
    double fact = 1.0;
    for (int pw = 2; pw <= 5; ++pw) {
      itp *= it;
      fact *= pw;
      total += itp / fact * g.moments[static_cast<std::size_t>(pw)] *
               std::pow(x_lo, pw - 1) / (std::exp2(pw - 1) - 1.0);
    }
  }

  long j = j_lo;
  double compensated = g.below_one;  // Σ ∫ x dν over compensated panels resolved below
  for (;; ++j) {
    const double xj = breakpoint(j);
    const double tx = t * xj;
    if (tx > kResolvedPhase) break;
    int level = 0;
    while (level + 1 < kLevels && (8 << level) < 0.462 * tx) ++level;
    const auto& lv = g.levels[static_cast<std::size_t>(level)];
    cplx panel{0.0, 0.0};
    for (const auto& node : lv.nodes) panel += expm1i(tx * node.u) * node.omega;
    total += panel / xj;
    if (j < g.j1) compensated += lv.s1;
  }
  // Compensated panels beyond the resolved range each carry exactly ∫ x dν = S_1.
  if (j < g.j1) compensated += static_cast<double>(g.j1 - j) * g.moments[1];
  total -= it * compensated;

  // Oscillatory remainder from X = x_j: -F(X) + ∫_X^∞ e^{itx} dν, the latter by
  // one integration by parts on each panel.
  const double x_hi = breakpoint(j);
  total -= g_ * g.t0 / x_hi;
  cplx osc{0.0, 0.0};
  const double g2 = g_ * g_;
  for (long i = 0; i < 80; ++i) {
    const double x0 = x_hi * std::exp2(static_cast<double>(i));
    const double x1 = 2.0 * x0;
    osc += std::polar(g2 * g.d1 / (x1 * x1), t * x1) - std::polar(g2 * g.d0 / (x0 * x0), t * x0);
    if (g2 * g.d0 / (x0 * x0) < 1e-30 * std::abs(osc)) break;
  }
  total += osc / it;
  return total;
}

cplx LimitLaw::char_fn(double t) const {
  const cplx e = exponent(t);
  return std::exp(cplx(0.0, drift() * t) + e);
}

cplx LimitLaw::exponent_interp(const Inversion& inv, double t) const {
  if (t == 0.0) return {0.0, 0.0};
  if (t < 0.0) return std::conj(exponent_interp(inv, -t));
  const int j = static_cast<int>(std::floor(std::log2(t)));
  const double s = std::ldexp(t, -j);
  const auto piece = std::min<std::size_t>(
      inv.pieces.size() - 1, static_cast<std::size_t>((s - 1.0) * inv.pieces.size()));
  // I(2t) = 2 I(t) - 2it ∫_1^2 x dν
  return std::ldexp(1.0, j) * inv.pieces[piece](s) - cplx(0.0, t * j * inv.unit);
}

namespace {

struct InversionNodes {
  std::vector<double> t;
  std::vector<cplx> phi_w;  // φ_W(t) times the quadrature weight
};

InversionNodes inversion_nodes(const std::function<cplx(double)>& cf, double t_max,
                               double resolution, double drift, double unit) {
  InversionNodes out;
  const auto rule = quadrature::gauss_legendre(kNodesPerSub);
  for (int e = -60; std::ldexp(1.0, e) < t_max; ++e) {
    const double lo = std::ldexp(1.0, e);
    const double hi = std::min(2.0 * lo, t_max);
    const double rate = resolution + std::abs(drift) + std::abs(unit) * (std::abs(e) + 3.0) + 1.0;
    const int nsub = std::max(1, static_cast<int>(std::ceil((hi - lo) * rate / 3.0)));
    const double h = (hi - lo) / nsub;
    for (int i = 0; i < nsub; ++i) {
      for (int q = 0; q < kNodesPerSub; ++q) {
        const double t = lo + h * (i + rule.nodes[static_cast<std::size_t>(q)]);
        out.t.push_back(t);
        out.phi_w.push_back(cf(t) * (h * rule.weights[static_cast<std::size_t>(q)]));
      }
    }
  }
  return out;
}

// Gil-Pelaez: F(z) = 1/2 - (1/π) ∫_0^∞ Im(e^{-itz} φ(t))/t dt, p(z) = (1/π) ∫_0^∞ Re(e^{-itz} φ(t)) dt.
std::pair<double, double> gil_pelaez(const InversionNodes& nodes, double z) {
  double f = 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i < nodes.t.size(); ++i) {
    const cplx v = std::polar(1.0, -nodes.t[i] * z) * nodes.phi_w[i];
    f += v.imag() / nodes.t[i];
    p += v.real();
  }
  return {0.5 - f / kPi, p / kPi};
}

}  // namespace

const LimitLaw::Inversion& LimitLaw::inversion() const {
  std::call_once(inversion_once_, [this] {
    auto inv = std::make_unique<Inversion>();
    inv->unit = unit_moment();
    constexpr int kPieces = 4;
    for (int i = 0; i < kPieces; ++i) {
      const double lo = 1.0 + static_cast<double>(i) / kPieces;
      inv->pieces.emplace_back(lo, lo + 1.0 / kPieces, 20,
                               [this](double s) { return exponent(s); });
    }
    Inversion& v = *inv;

    v.decay = HUGE_VAL;
    for (int i = 0; i <= 256; ++i) {
      const double s = 1.0 + i / 256.0;
      v.decay = std::min(v.decay, -exponent_interp(v, s).real() / s);
    }
    if (!(v.decay > 0.0)) {
      throw NumericError("limit law: characteristic function does not decay; cannot invert");
    }
    const double f = drift();
    auto cf = [&](double t) { return std::exp(cplx(0.0, f * t) + exponent_interp(v, t)); };
    auto truncation = [&v](double T) { return std::exp(-v.decay * T) / (kPi * v.decay * T); };

    // t_max by doubling until a check grid of CDF values settles.
    std::vector<double> check;
    for (int i = 0; i <= 40; ++i) check.push_back(-3.0 + 0.5 * i);
    double T = p_.t_max > 0.0 ? p_.t_max : 4.0;
    std::vector<double> prev;
    double change = 0.0;
    for (;;) {
      const auto nodes = inversion_nodes(cf, T, 16.0, f, v.unit);
      std::vector<double> cur;
      for (double z : check) cur.push_back(gil_pelaez(nodes, z).first);
      if (p_.t_max > 0.0) {
        change = 0.0;
        break;
      }
      if (!prev.empty()) {
        change = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
          change = std::max(change, std::abs(cur[i] - prev[i]));
        }
        if (change <= 1e-5 && truncation(T) <= 1e-6) break;
      }
      if (T >= 1024.0) break;
      prev = std::move(cur);
      T *= 2.0;
    }
    v.t_max = T;
    v.error = truncation(T) + change;
    if (v.error > 1e-4) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "limit CDF inversion error %.3g exceeds 1e-4 (t_max=%g)",
                    v.error, T);
      throw NumericError(buf);
    }

    const auto coarse = inversion_nodes(cf, T, 16.0, f, v.unit);
    const auto fine = inversion_nodes(cf, T, 256.0, f, v.unit);
    double z_lo = -1.0;
    while (z_lo > -64.0 && gil_pelaez(coarse, z_lo).first > 1e-13) z_lo -= 1.0;
    v.z_hi = 256.0;
    for (double z = z_lo; z < 16.0; z += 0.02) v.z.push_back(z);
    for (double z = 16.0; z < v.z_hi; z *= 1.01) v.z.push_back(z);
    v.z.push_back(v.z_hi);
    double running = 0.0;
    for (double z : v.z) {
      const auto [cdf, pdf] = gil_pelaez(std::abs(z) <= 16.0 ? coarse : fine, z);
      running = std::clamp(std::max(running, cdf), 0.0, 1.0);
      v.cdf.push_back(running);
      v.pdf.push_back(std::max(pdf, 0.0));
    }
    v.tail_hi = tail(v.z_hi);
    inversion_ = std::move(inv);
  });
  return *inversion_;
}

double LimitLaw::inversion_error() const { return inversion().error; }

double LimitLaw::inversion_t_max() const { return inversion().t_max; }

double LimitLaw::cdf_w(double z) const {
  const Inversion& v = inversion();
  if (std::isnan(z)) throw DomainError("cdf: argument is NaN");
  if (z <= v.z.front()) return 0.0;
  if (z >= v.z_hi) return 1.0 - (1.0 - v.cdf.back()) * tail(z) / v.tail_hi;
  const auto it = std::upper_bound(v.z.begin(), v.z.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - v.z.begin()) - 1;
  const double h = v.z[i + 1] - v.z[i];
  const double f0 = v.cdf[i], f1 = v.cdf[i + 1];
  const double delta = (f1 - f0) / h;
  double d0 = v.pdf[i], d1 = v.pdf[i + 1];
  if (delta <= 0.0) {
    d0 = d1 = 0.0;
  } else {
    const double al = d0 / delta, be = d1 / delta;
    const double norm = al * al + be * be;
    if (norm > 9.0) {
      const double tau = 3.0 / std::sqrt(norm);
      d0 *= tau;
      d1 *= tau;
    }
  }
  const double s = (z - v.z[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double value = (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 +
                       (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * h * d1;
  return std::clamp(value, f0, f1);
}

double LimitLaw::density_w(double z) const {
  const Inversion& v = inversion();
  if (z <= v.z.front()) return 0.0;
  if (z >= v.z_hi) return (1.0 - v.cdf.back()) * density(z) / v.tail_hi;
  const auto it = std::upper_bound(v.z.begin(), v.z.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - v.z.begin()) - 1;
  const double s = (z - v.z[i]) / (v.z[i + 1] - v.z[i]);
  return (1.0 - s) * v.pdf[i] + s * v.pdf[i + 1];
}

double LimitLaw::limit_cdf(double w, double c3) const {
  if (!(c3 > 0.0)) throw DomainError("limit_cdf: C3 must be > 0");
  if (w == HUGE_VAL) return 1.0;
  if (w == -HUGE_VAL) return 0.0;
  return 1.0 - cdf_w((1.0 - w) / c3);
}

std::shared_ptr<const LimitLaw> law_for(const LimitParams& p) {
  validate(p);
  using Key = std::tuple<int, int, double, int, double, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const LimitLaw>> cache;
  const Key key{p.r, p.k, p.gamma, p.s_max, p.quad_tol, p.t_max};
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const LimitLaw>(p);
  return slot;
}

double levy_density(double x, const LimitParams& p) { return law_for(p)->density(x); }

double levy_tail(double x, const LimitParams& p) { return law_for(p)->tail(x); }

double f_constant(const LimitParams& p) { return law_for(p)->drift(); }

std::complex<double> char_fn(double t, const LimitParams& p) { return law_for(p)->char_fn(t); }

double limit_cdf(double w, const LimitParams& p, const series::ConstantTable& table) {
  if (table.k != p.k || table.r != p.r) {
    throw DomainError("limit_cdf: constant table does not match (r, k)");
  }
  return law_for(p)->limit_cdf(w, table.C3);
}

XiSampler::XiSampler(const ScaleParams& scale, const LimitParams& p,
                     const series::ConstantTable& table)
    : k_(p.k), a_(static_cast<double>(p.r) / p.k), m_(scale.m), kfact_(std::tgamma(p.k + 1.0)),
      c3_(table.C3) {
  validate(p);
  if (table.k != p.k || table.r != p.r) {
    throw DomainError("xi_sampler: constant table does not match (r, k)");
  }
  if (scale.k != p.k) throw DomainError("xi_sampler: scale parameters built for another k");
  if (scale.n < 16) throw DomainError("xi_sampler: n must be >= 16");
  const CompleteTree tree(scale.n);
  const std::uint64_t last = std::min<std::uint64_t>(
      scale.n, (std::uint64_t{1} << (std::min(scale.L, 62) + 1)) - 1);
  const double nd = static_cast<double>(scale.n);
  weights_.reserve(last);
  for (std::uint64_t v = 1; v <= last; ++v) {
    weights_.push_back(m_ * static_cast<double>(tree.subtree_size(v)) / nd);
  }
  shift_ = std::exp2(1.0 - scale.alpha) + scale.alpha - scale.beta - scale.ell + scale.L + 1.0;
}

double XiSampler::sample(std::uint64_t seed, std::uint64_t stream) const {
  rng::Stream rng(seed, stream);
  double sum = 0.0;
  for (double w : weights_) {
    double t = 0.0;
    for (int i = 0; i < k_; ++i) t += rng.exponential();
    const double z = m_ * std::pow(t, k_) / kfact_;
    double upper;
    if (a_ == 1.0) {
      upper = std::exp(-z);
    } else if (a_ == 0.5) {
      upper = std::sqrt(kPi) * std::erfc(std::sqrt(z));
    } else {
      upper = specfun::upper_gamma(a_, z);
    }
    sum += w * upper;
  }
  return shift_ - c3_ * sum;
}

std::vector<double> XiSampler::batch(std::uint64_t count, std::uint64_t seed,
                                     unsigned threads) const {
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::uint64_t i) { out[i] = sample(seed, i); });
  return out;
}

double xi_sampler(const ScaleParams& scale, const LimitParams& p,
                  const series::ConstantTable& table, std::uint64_t seed, std::uint64_t stream) {
  return XiSampler(scale, p, table).sample(seed, stream);
}

}  // namespace kcut::limitdist
