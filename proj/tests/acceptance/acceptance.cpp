#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kcut/cutsim.hpp"
#include "kcut/exactmean.hpp"
#include "kcut/harness.hpp"
#include "kcut/limitdist.hpp"
#include "kcut/rng.hpp"
#include "kcut/series.hpp"
#include "kcut/specfun.hpp"
#include "kcut/tree.hpp"
#include "oracles.hpp"

namespace {

using namespace kcut;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void note(Outcome& o, const std::string& s) {
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome special_functions() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0.0;
  for (double a : {1.0 / 3, 0.5, 2.0 / 3, 1.0, 1.5}) {
    for (int i = 0; i < 20; ++i) {
      const double y = std::pow(10.0, -6.0 + i * (std::log10(0.999) + 6.0) / 19.0);
      worst = std::max(worst, std::abs(specfun::q(a, specfun::q_inv(a, y)) - y));
    }
  }
  double worst_exp = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double x = 0.1 * i;
    worst_exp = std::max(worst_exp, std::abs(specfun::q(1.0, x) - std::exp(-x)));
  }
  const double t = seconds_since(t0);
  o.pass = worst <= 1e-10 && worst_exp <= 1e-12 && t < 1.0;
  note(o, "max |Q(a,Qinv(a,y))-y| = " + fmt("%.2e", worst));
  note(o, "max |Q(1,x)-e^-x| = " + fmt("%.2e", worst_exp));
  note(o, fmt("%.3f s", t));
  return o;
}

Outcome series_constants() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const auto core2 = series::expand_core(2);
  const bool known = core2.coeff(1, 3) == series::Rational(1, 3) &&
                         core2.coeff(1, 4) == series::Rational(-1, 4) &&
                         core2.coeff(2, 6) == series::Rational(1, 18);
  if (!known) {
    o.pass = false;
    note(o, "k=2 coefficients differ: " + series::to_string(core2.coeff(1, 3)) + ", " +
                series::to_string(core2.coeff(1, 4)) + ", " +
                series::to_string(core2.coeff(2, 6)));
  }
  int mismatches = 0;
  for (int k = 1; k <= 4; ++k) {
    const auto core = series::expand_core(k);
    const auto h0 = series::expand_h0(k);
    const auto ref_core = oracle::core_expansion(k);
    const auto ref_h0 = oracle::h0_expansion(k);
    for (int j = 0; j <= k; ++j) {
      for (int b = 0; b <= k * k + 2 * k; ++b) {
        if (core.coeff(j, b) != ref_core[j][b]) ++mismatches;
        if (h0.coeff(j, b) != ref_h0[j][b]) ++mismatches;
      }
    }
  }
  const double t = seconds_since(t0);
  o.pass = o.pass && mismatches == 0 && t < 5.0;
  note(o, "oracle mismatches " + std::to_string(mismatches));
  note(o, fmt("%.3f s", t));
  return o;
}

Outcome closed_form_prefactors() {
  Outcome o;
  const auto t = series::constants(2, 1);
  const double e2 = std::abs(1.0 / t.C2 - std::sqrt(8.0 / M_PI));
  const double e3 = std::abs(t.C3 - 2.0 / std::sqrt(M_PI));
  o.pass = e2 <= 1e-12 && e3 <= 1e-12;
  note(o, "|1/C2 - sqrt(8/pi)| = " + fmt("%.2e", e2));
  note(o, "|C3 - 2/sqrt(pi)| = " + fmt("%.2e", e3));
  return o;
}

std::vector<double> totals(const std::vector<cutsim::SimSample>& batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& s : batch) out.push_back(static_cast<double>(s.total));
  return out;
}

Outcome simulator_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const CompleteTree tree(127);
  const std::uint64_t N = 100000;
  const auto proc = cutsim::simulate_batch(tree, 2, cutsim::Variant::node,
                                           cutsim::Method::process, N, 11);
  const auto rec = cutsim::simulate_batch(tree, 2, cutsim::Variant::node,
                                          cutsim::Method::records, N, 12);
  const double d = harness::ks_two_sample(totals(proc), totals(rec));
  const double crit = harness::ks_two_sample_critical(N, N);
  const double t = seconds_since(t0);
  o.pass = d < crit && t < 60.0;
  note(o, "KS " + fmt("%.4f", d) + " vs critical " + fmt("%.4f", crit));
  note(o, fmt("%.1f s", t));
  return o;
}

Outcome oracle_pmf() {
  Outcome o;
  const std::uint64_t N = 1000000;
  const std::vector<std::pair<int, int>> cases{{2, 1}, {3, 1}, {3, 2}, {4, 2}};
  double worst_z = 0.0;
  for (auto [n, k] : cases) {
    const auto pmf = cutsim::brute_force_distribution(n, k);
    if (n == 3 && k == 1) {
      const bool uniform = pmf.size() == 3 && pmf.at(1) == series::Rational(1, 3) &&
                           pmf.at(2) == series::Rational(1, 3) &&
                           pmf.at(3) == series::Rational(1, 3);
      if (!uniform) {
        o.pass = false;
        note(o, "n=3,k=1 oracle pmf is not uniform on {1,2,3}");
      }
    }
    const CompleteTree tree(static_cast<std::uint64_t>(n));
    for (auto method : {cutsim::Method::process, cutsim::Method::records}) {
      const auto batch = cutsim::simulate_batch(tree, k, cutsim::Variant::node, method, N,
                                                static_cast<std::uint64_t>(100 * n + k));
      std::map<std::uint64_t, std::uint64_t> counts;
      for (const auto& s : batch) ++counts[s.total];
      for (const auto& [value, c] : counts) {
        if (!pmf.count(value)) {
          o.pass = false;
          note(o, "value " + std::to_string(value) + " outside oracle support");
        }
      }
      for (const auto& [value, p] : pmf) {
        const double pd = static_cast<double>(p);
        const double hat = static_cast<double>(counts[value]) / static_cast<double>(N);
        const double z = std::abs(hat - pd) / std::sqrt(pd * (1.0 - pd) / static_cast<double>(N));
        if (pd < 1.0) worst_z = std::max(worst_z, z);
      }
    }
  }
  o.pass = o.pass && worst_z <= 4.0;
  note(o, "worst atom deviation " + fmt("%.2f", worst_z) + " sigma");
  return o;
}

Outcome exact_means() {
  Outcome o;
  const std::uint64_t N = 200000;
  double worst_z = 0.0;
  for (auto [n, k, r] : std::vector<std::tuple<std::uint64_t, int, int>>{
           {15, 1, 1}, {31, 2, 1}, {31, 2, 2}}) {
    exactmean::MeanQuery q;
    q.n = n;
    q.k = k;
    q.r = r;
    const double exact = exactmean::expected_records(q);
    const auto batch = cutsim::simulate_batch(CompleteTree(n), k, cutsim::Variant::node,
                                              cutsim::Method::records, N, 1000 + n + k + r);
    double s = 0.0, s2 = 0.0;
    for (const auto& x : batch) {
      const double v = static_cast<double>(x.per_r[static_cast<std::size_t>(r - 1)]);
      s += v;
      s2 += v * v;
    }
    const double mean = s / N;
    const double var = (s2 - N * mean * mean) / (N - 1);
    const double z = std::abs(mean - exact) / std::sqrt(var / N);
    worst_z = std::max(worst_z, z);
  }
  exactmean::MeanQuery q7;
  q7.n = 7;
  const double e7 = std::abs(exactmean::expected_records(q7) - 10.0 / 3.0);
  o.pass = worst_z <= 4.0 && e7 <= 1e-10;
  note(o, "worst z " + fmt("%.2f", worst_z));
  note(o, "|E X(7,1,1) - 10/3| = " + fmt("%.2e", e7));
  return o;
}

Outcome asymptotic_trend() {
  Outcome o;
  for (int k : {1, 2}) {
    const auto table = series::constants(k, 1);
    double prev = HUGE_VAL;
    std::string gaps;
    for (int e : {10, 14, 18}) {
      exactmean::MeanQuery q;
      q.n = std::uint64_t{1} << e;
      q.k = k;
      const double exact = exactmean::expected_records(q);
      const double gap = std::abs(exactmean::asymptotic_mean(q.n, table) - exact) / exact;
      if (!(gap < prev)) o.pass = false;
      prev = gap;
      gaps += (gaps.empty() ? "" : " ") + fmt("%.4f", gap);
    }
    note(o, "k=" + std::to_string(k) + " gaps " + gaps);
  }
  return o;
}

Outcome levy_identities() {
  Outcome o;
  double worst_unit = 0.0;
  for (double g : {0.0, 0.3, 0.7}) {
    limitdist::LimitParams p;
    p.gamma = g;
    worst_unit = std::max(worst_unit, std::abs(limitdist::law_for(p)->unit_moment() - 1.0));
  }
  rng::Stream rng(2024, 0);
  double worst_periodic = 0.0;
  for (auto [r, k] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}, {1, 3}}) {
    for (double g : {0.0, 0.37, 0.99}) {
      limitdist::LimitParams p;
      p.r = r;
      p.k = k;
      p.gamma = g;
      for (int i = 0; i < 20; ++i) {
        const double u = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
        const double d = limitdist::levy_density(u, p);
        const double d2 = limitdist::levy_density(u / 2, p);
        worst_periodic = std::max(worst_periodic, std::abs(d - 0.25 * d2) / d);
      }
    }
  }
  double worst_closed = 0.0;
  for (double g : {0.0, 0.25, 0.6}) {
    limitdist::LimitParams p;
    p.gamma = g;
    for (int i = 0; i < 50; ++i) {
      const double x = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
      const double v = std::log2(x) + g;
      const double closed = std::exp2(v - std::floor(v)) / (x * x);
      worst_closed = std::max(worst_closed, std::abs(limitdist::levy_density(x, p) - closed) / closed);
    }
  }
  o.pass = worst_unit <= 1e-6 && worst_periodic <= 1e-9 && worst_closed <= 1e-12;
  note(o, "|int_1^2 x dnu - 1| = " + fmt("%.2e", worst_unit));
  note(o, "periodicity " + fmt("%.2e", worst_periodic));
  note(o, "k=1 closed form " + fmt("%.2e", worst_closed));
  return o;
}

Outcome drift_reduction() {
  Outcome o;
  double worst = 0.0;
  for (int k : {1, 2, 3}) {
    for (double g : {0.0, 0.25, 0.5, 0.75}) {
      limitdist::LimitParams p;
      p.r = k;
      p.k = k;
      p.gamma = g;
      worst = std::max(worst, std::abs(limitdist::f_constant(p) - (std::exp2(g) - g - 1.0)));
    }
  }
  o.pass = worst <= 1e-8;
  note(o, "max deviation " + fmt("%.2e", worst));
  return o;
}

Outcome two_copies() {
  Outcome o;
  double worst = 0.0;
  for (int k : {1, 2}) {
    limitdist::LimitParams p;
    p.k = k;
    p.gamma = 0.3;
    const auto law = limitdist::law_for(p);
    const double m = law->unit_moment();
    for (int i = 0; i <= 40; ++i) {
      const double t = -10.0 + 0.5 * i;
      const auto lhs = law->char_fn(t) * law->char_fn(t);
      const auto rhs = law->char_fn(2 * t) * std::exp(std::complex<double>(0.0, 2.0 * t * m));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  o.pass = worst <= 1e-6;
  note(o, "max residual " + fmt("%.2e", worst));
  return o;
}

double ks_against_limit(const std::vector<double>& samples, int r, int k, double gamma) {
  limitdist::LimitParams p;
  p.r = r;
  p.k = k;
  p.gamma = gamma;
  const auto law = limitdist::law_for(p);
  const double c3 = series::constants(k, r).C3;
  return harness::ks_statistic(samples, [&](double w) { return law->limit_cdf(w, c3); });
}

Outcome limit_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const std::uint64_t n40 = std::uint64_t{1} << 40;
  for (int k : {1, 2}) {
    const auto scale = limitdist::ScaleParams::from_n(n40, k);
    limitdist::LimitParams p;
    p.k = k;
    p.gamma = scale.gamma();
    const auto table = series::constants(k, 1);
    const limitdist::XiSampler sampler(scale, p, table);
    const auto xs = sampler.batch(100000, 40 + k);
    const double d = ks_against_limit(xs, 1, k, p.gamma);
    if (!(d <= 0.05)) o.pass = false;
    note(o, "xi k=" + std::to_string(k) + " KS " + fmt("%.4f", d));
  }

  const double gamma = harness::size_phase(65536.0);
  const auto table = series::constants(1, 1);
  std::vector<double> ks_values;
  std::string picks;
  for (int e : {12, 14, 16}) {
    const auto sizes = harness::subsequence_select(gamma, std::uint64_t{1} << (e - 1),
                                                   std::uint64_t{1} << (e + 1), 1);
    if (sizes.empty()) {
      o.pass = false;
      note(o, "no size near 2^" + std::to_string(e));
      continue;
    }
    const std::uint64_t n = sizes.front();
    const auto batch = cutsim::simulate_batch(CompleteTree(n), 1, cutsim::Variant::node,
                                              cutsim::Method::records, 2000,
                                              rng::derive_seed(77, n));
    std::vector<double> w;
    for (const auto& s : batch) w.push_back(cutsim::rescale_sample(s, 1, table, double(n)));
    const double d = ks_against_limit(w, 1, 1, harness::size_phase(double(n)));
    ks_values.push_back(d);
    picks += (picks.empty() ? "" : ", ") + std::to_string(n) + ":" + fmt("%.4f", d);
  }
  note(o, "full tree KS " + picks);
  if (ks_values.size() == 3) {
    if (!(ks_values.back() <= 0.2)) o.pass = false;
    if (!(ks_values[1] <= ks_values[0] && ks_values[2] <= ks_values[1])) {
      o.pass = false;
      note(o, "KS not nonincreasing");
    }
  }
  const double t = seconds_since(t0);
  if (t >= 600.0) o.pass = false;
  note(o, fmt("%.1f s", t));
  return o;
}

Outcome variance_scaling() {
  Outcome o;
  for (int k : {1, 2}) {
    double scaled[2];
    int idx = 0;
    for (int e : {10, 15}) {
      const std::uint64_t n = std::uint64_t{1} << e;
      const auto batch = cutsim::simulate_batch(CompleteTree(n), k, cutsim::Variant::node,
                                                cutsim::Method::records, 4000,
                                                rng::derive_seed(900 + k, n));
      double s = 0.0, s2 = 0.0;
      for (const auto& x : batch) {
        const double v = static_cast<double>(x.per_r[0]);
        s += v;
        s2 += v * v;
      }
      const double N = static_cast<double>(batch.size());
      const double var = (s2 - s * s / N) / (N - 1);
      const double nd = static_cast<double>(n);
      scaled[idx++] = var * std::pow(std::log2(nd), 3.0 / k) / (nd * nd);
    }
    const double ratio = scaled[1] / scaled[0];
    if (!(ratio <= 3.0)) o.pass = false;
    note(o, "k=" + std::to_string(k) + " ratio " + fmt("%.3f", ratio));
  }
  return o;
}

Outcome reproducibility() {
  Outcome o;
  harness::ExperimentConfig c;
  c.k = 2;
  c.r = 1;
  c.n_list = {1000, 5000};
  c.samples = 300;
  c.seed = 5;
  c.threads = 1;
  const auto one = harness::run_experiment(c);
  c.threads = 8;
  const auto eight = harness::run_experiment(c);
  const bool same = harness::summary_csv(one) == harness::summary_csv(eight) &&
                    harness::samples_csv(one) == harness::samples_csv(eight);
  o.pass = same;
  note(o, same ? "summary and sample CSV identical" : "CSV output differs");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"special functions", special_functions},
      {"series constants", series_constants},
      {"closed-form prefactors", closed_form_prefactors},
      {"simulator law equivalence", simulator_equivalence},
      {"oracle pmf agreement", oracle_pmf},
      {"exact means", exact_means},
      {"asymptotic mean trend", asymptotic_trend},
      {"Levy measure identities", levy_identities},
      {"drift reduction", drift_reduction},
      {"two-copies identity", two_copies},
      {"limit-law convergence", limit_convergence},
      {"variance scaling", variance_scaling},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
