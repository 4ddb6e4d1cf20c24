#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "kcut/series.hpp"

namespace kcut::limitdist {

struct LimitParams {
  int r = 1;
  int k = 1;
  double gamma = 0.0;  // subsequence parameter in [0,1]
  // Terms kept in the s-series; 0 selects the depth from the analytic tail bound.
  int s_max = 0;
  double quad_tol = 1e-10;
  // Upper limit of the inversion integral; 0 selects it by repeated doubling.
  double t_max = 0.0;
};

void validate(const LimitParams& p);

// Size-dependent quantities of a complete tree with n nodes.
struct ScaleParams {
  std::uint64_t n = 0;
  int k = 1;
  int m = 0;      // floor(lg n)
  int ell = 0;    // floor(lg lg n)
  int L = 0;      // floor((2 - 1/(2k)) lg lg n)
  double alpha = 0.0;  // frac(lg n)
  double beta = 0.0;   // frac(lg lg n)

  static ScaleParams from_n(std::uint64_t n, int k);
  // frac(alpha - beta), the γ that n sits at.
  double gamma() const;
};

// Cached evaluator for one (r, k, γ).  The s-series and special-function
// work behind the characteristic function and CDF is done once, lazily.
class LimitLaw {
 public:
  explicit LimitLaw(const LimitParams& p);
  ~LimitLaw();
  LimitLaw(const LimitLaw&) = delete;
  LimitLaw& operator=(const LimitLaw&) = delete;

  const LimitParams& params() const { return p_; }
  double shape_a() const { return a_; }      // r/k
  double gamma_a() const { return g_; }      // Γ(r/k)

  // φ(x) = frac(γ + lg(x/Γ(r/k))); the density is Γ(r/k)^2 D(φ(x)) / x^2.
  double phase(double x) const;
  double shape(double phi) const;
  // Breakpoint x_j = Γ(r/k) 2^{j-γ} where φ restarts at 0.
  double breakpoint(long j) const;

  double density(double x) const;
  double tail(double x) const;
  double drift() const;
  // ∫_1^2 x dν, which equals the same integral over any [u, 2u].
  double unit_moment() const;

  // ∫ (e^{itx} - 1 - itx 1[x<1]) dν
  std::complex<double> exponent(double t) const;
  std::complex<double> char_fn(double t) const;

  // Law of W itself.
  double cdf_w(double z) const;
  double density_w(double z) const;
  // Error bound attached to the inversion (truncation plus grid stability).
  double inversion_error() const;
  double inversion_t_max() const;

  // CDF of 1 - c3 W.
  double limit_cdf(double w, double c3) const;

 private:
  struct Grid;
  struct Inversion;
  const Grid& grid() const;
  const Inversion& inversion() const;
  double shape_fast(const Grid& g, double phi) const;
  std::complex<double> exponent_interp(const Inversion& inv, double t) const;

  LimitParams p_;
  double a_;
  double g_;
  mutable std::once_flag grid_once_;
  mutable std::once_flag inversion_once_;
  mutable std::unique_ptr<Grid> grid_;
  mutable std::unique_ptr<Inversion> inversion_;
};

// Shared, cached law for p (keyed on every field of p).
std::shared_ptr<const LimitLaw> law_for(const LimitParams& p);

double levy_density(double x, const LimitParams& p);
double levy_tail(double x, const LimitParams& p);
double f_constant(const LimitParams& p);
std::complex<double> char_fn(double t, const LimitParams& p);
// CDF of 1 - C3(r) W_{r,k,γ}.
double limit_cdf(double w, const LimitParams& p, const series::ConstantTable& table);

// Triangular-array approximation to the rescaled record count at size n.
class XiSampler {
 public:
  XiSampler(const ScaleParams& scale, const LimitParams& p, const series::ConstantTable& table);

  double sample(std::uint64_t seed, std::uint64_t stream) const;
  std::vector<double> batch(std::uint64_t count, std::uint64_t seed, unsigned threads = 0) const;

  // Deterministic part 2^{1-α} + α - β - ℓ + L + 1.
  double shift() const { return shift_; }
  std::size_t nodes() const { return weights_.size(); }

 private:
  int k_;
  double a_;
  double m_;
  double kfact_;
  double c3_;
  double shift_;
  std::vector<double> weights_;  // m n_v / n for every node of height <= L
};

double xi_sampler(const ScaleParams& scale, const LimitParams& p,
                  const series::ConstantTable& table, std::uint64_t seed,
                  std::uint64_t stream = 0);

}  // namespace kcut::limitdist
