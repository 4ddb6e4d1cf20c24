#include "kcut/series.hpp"

#include <cmath>

#include "kcut/errors.hpp"
#include "kcut/report.hpp"
#include "kcut/specfun.hpp"

namespace kcut::series {

namespace {

constexpr int kMaxK = 8;

using XSeries = std::vector<Rational>;

void check_k(int k) {
  if (k < 1 || k > kMaxK) {
    throw ConfigError("series expansion supports 1 <= k <= 8, got k=" + std::to_string(k));
  }
}

int x_cap_for(int k) { return k * k + 2 * k; }

Rational factorial(int n) {
  Rational f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

XSeries mul(const XSeries& a, const XSeries& b) {
  XSeries out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < out.size(); ++j) {
      if (b[j] != 0) out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

XSeries reciprocal(const XSeries& s) {
  XSeries inv(s.size());
  inv[0] = 1 / s[0];
  for (std::size_t n = 1; n < s.size(); ++n) {
    Rational acc = 0;
    for (std::size_t i = 1; i <= n; ++i) acc += s[i] * inv[n - i];
    inv[n] = -acc / s[0];
  }
  return inv;
}

// Q(k,x) = 1 - x^k/(k-1)! Σ_{j>=0} (-x)^j / (j! (k+j)).
XSeries q_series(int k, int cap) {
  XSeries q(cap + 1);
  q[0] = 1;
  const Rational lead = 1 / factorial(k - 1);
  Rational jfact = 1;
  for (int j = 0; k + j <= cap; ++j) {
    if (j > 0) jfact *= j;
    Rational term = lead / (jfact * (k + j));
    if (j % 2 == 1) term = -term;
    q[k + j] -= term;
  }
  return q;
}

// e^{x^k/k!}
XSeries exp_power_series(int k, int cap) {
  XSeries e(cap + 1);
  const Rational kfact = factorial(k);
  Rational term = 1;
  for (int i = 0; i * k <= cap; ++i) {
    if (i > 0) term /= kfact * i;
    e[i * k] = term;
  }
  return e;
}

XSeries exp_neg_series(int cap) {
  XSeries e(cap + 1);
  Rational term = 1;
  for (int i = 0; i <= cap; ++i) {
    if (i > 0) term /= -i;
    e[i] = term;
  }
  return e;
}

// Coefficients in m of the binomial polynomial m (m-1) ... (m-i+1) / i!.
std::vector<Rational> binomial_poly(int i) {
  std::vector<Rational> c{1};
  for (int t = 0; t < i; ++t) {
    std::vector<Rational> next(c.size() + 1);
    for (std::size_t d = 0; d < c.size(); ++d) {
      next[d + 1] += c[d];
      next[d] -= c[d] * t;
    }
    c = std::move(next);
  }
  for (auto& v : c) v /= factorial(i);
  return c;
}

IndexMap restrict_to_domain(const BiSeries& s, int k) {
  IndexMap out;
  for (const auto& [j, b] : index_domain(k)) out[{j, b}] = s.coeff(j, b);
  return out;
}

}  // namespace

std::string to_string(const Rational& v) {
  const auto num = boost::multiprecision::numerator(v);
  const auto den = boost::multiprecision::denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

BiSeries::BiSeries(int m_cap, int x_cap) : m_cap_(m_cap), x_cap_(x_cap) {
  if (m_cap < 0 || x_cap < 0) throw DomainError("BiSeries caps must be nonnegative");
  c_.resize(static_cast<std::size_t>(m_cap + 1) * static_cast<std::size_t>(x_cap + 1));
}

BiSeries BiSeries::constant(int m_cap, int x_cap, const Rational& value) {
  BiSeries s(m_cap, x_cap);
  s.set(0, 0, value);
  return s;
}

std::size_t BiSeries::index(int j, int b) const {
  if (j < 0 || j > m_cap_ || b < 0 || b > x_cap_) {
    throw DomainError("BiSeries index (" + std::to_string(j) + "," + std::to_string(b) +
                      ") outside caps");
  }
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(x_cap_ + 1) +
         static_cast<std::size_t>(b);
}

const Rational& BiSeries::coeff(int j, int b) const { return c_[index(j, b)]; }

void BiSeries::set(int j, int b, const Rational& value) { c_[index(j, b)] = value; }

void BiSeries::check_caps(const BiSeries& other) const {
  if (m_cap_ != other.m_cap_ || x_cap_ != other.x_cap_) {
    throw DomainError("BiSeries operands have different truncation caps");
  }
}

BiSeries BiSeries::operator+(const BiSeries& other) const {
  check_caps(other);
  BiSeries out(m_cap_, x_cap_);
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = c_[i] + other.c_[i];
  return out;
}

BiSeries BiSeries::operator*(const BiSeries& other) const {
  check_caps(other);
  BiSeries out(m_cap_, x_cap_);
  for (int j1 = 0; j1 <= m_cap_; ++j1) {
    for (int b1 = 0; b1 <= x_cap_; ++b1) {
      const Rational& u = coeff(j1, b1);
      if (u == 0) continue;
      for (int j2 = 0; j1 + j2 <= m_cap_; ++j2) {
        for (int b2 = 0; b1 + b2 <= x_cap_; ++b2) {
          const Rational& v = other.coeff(j2, b2);
          if (v != 0) out.c_[out.index(j1 + j2, b1 + b2)] += u * v;
        }
      }
    }
  }
  return out;
}

bool BiSeries::operator==(const BiSeries& other) const {
  return m_cap_ == other.m_cap_ && x_cap_ == other.x_cap_ && c_ == other.c_;
}

std::vector<std::pair<int, int>> index_domain(int k) {
  std::vector<std::pair<int, int>> keys;
  for (int j = 1; j <= k; ++j) {
    for (int b = j * k + j; b <= j * k + k; ++b) keys.emplace_back(j, b);
  }
  return keys;
}

BiSeries expand_core(int k) {
  check_k(k);
  const int cap = x_cap_for(k);
  XSeries p = mul(q_series(k, cap), exp_power_series(k, cap));
  p[0] -= 1;  // p = inner - 1 starts at x^{k+1}

  BiSeries out(k, cap);
  XSeries power(cap + 1);
  power[0] = 1;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) power = mul(power, p);
    const auto poly = binomial_poly(i);
    for (int j = 0; j < static_cast<int>(poly.size()); ++j) {
      if (poly[j] == 0) continue;
      for (int b = 0; b <= cap; ++b) {
        if (power[b] != 0) out.set(j, b, out.coeff(j, b) + poly[j] * power[b]);
      }
    }
  }
  return out;
}

BiSeries expand_h0(int k) {
  check_k(k);
  const int cap = x_cap_for(k);
  XSeries denom = q_series(k, cap);
  for (auto& c : denom) c *= 2;
  denom[0] -= 1;
  const XSeries h0 = mul(exp_neg_series(cap), reciprocal(denom));

  BiSeries factor(k, cap);
  for (int b = 0; b <= cap; ++b) factor.set(0, b, h0[b]);
  return factor * expand_core(k);
}

IndexMap c5_table(int k) { return restrict_to_domain(expand_core(k), k); }

IndexMap c6_table(int k) { return restrict_to_domain(expand_h0(k), k); }

ConstantTable constants(int k, int r) {
  check_k(k);
  if (r < 1 || r > k) {
    throw DomainError("constants: r must lie in [1,k], got r=" + std::to_string(r) +
                      ", k=" + std::to_string(k));
  }
  ConstantTable t;
  t.k = k;
  t.r = r;
  t.k0 = 0.5 * (1.0 / k + 1.0 / (k + 1));
  t.C5 = c5_table(k);
  t.C6 = c6_table(k);

  const double kd = k;
  const double rd = r;
  const double kfact = std::tgamma(kd + 1.0);
  const double g_rk = specfun::gamma(rd / kd);

  t.C2 = std::pow(kfact, rd / kd) * g_rk / (kd * kd * specfun::gamma(rd));
  t.scale = rd * t.C2;
  t.C3 = 1.0 / specfun::gamma(1.0 + rd / kd);

  for (int i = 1; i <= k; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    t.C7.push_back(sign * kd * std::pow(kfact, i / kd) * specfun::gamma((i + rd) / kd) /
                   (rd * std::tgamma(i + 1.0) * g_rk));
  }
  for (const auto& [key, c6] : t.C6) {
    const int b = key.second;
    t.C8[key] = kd * std::pow(kfact, b / kd) * c6.convert_to<double>() *
                specfun::gamma((b + rd) / kd) / (rd * g_rk);
  }
  for (int i = 1; i <= k; ++i) {
    double c1 = t.c7(i);
    for (int j = 1; j <= i; ++j) c1 += t.C8.at({j, j * k + i});
    t.C1.push_back(c1);
  }
  return t;
}

std::vector<ConstantTable> all_constants(int k) {
  std::vector<ConstantTable> tables;
  for (int r = 1; r <= k; ++r) tables.push_back(constants(k, r));
  return tables;
}

double mu(const ConstantTable& table, double n) {
  if (!(n >= 2.0)) throw DomainError("mu: n must be >= 2, got " + report::format_real(n));
  const double lg = std::log2(n);
  double v = static_cast<double>(table.k) / table.r * lg + std::log2(lg);
  for (int i = 1; i <= table.k; ++i) {
    v += table.c1(i) * std::pow(lg, 1.0 - static_cast<double>(i) / table.k);
  }
  return v;
}

double mu_total(const std::vector<ConstantTable>& tables, double n) {
  if (tables.empty()) throw DomainError("mu_total: no constant tables");
  const double lg = std::log2(n);
  const double k = tables.front().k;
  double v = 0.0;
  for (const auto& t : tables) {
    v += t.scale / tables.front().scale * std::pow(lg, -(t.r - 1) / k) * mu(t, n);
  }
  return v;
}

std::string table_json(const ConstantTable& t) {
  report::JsonWriter w;
  auto key_of = [](const std::pair<int, int>& key) {
    return std::to_string(key.first) + "," + std::to_string(key.second);
  };
  w.begin_object();
  w.key("k").value(t.k);
  w.key("r").value(t.r);
  w.key("k0").value(t.k0);
  w.key("C2").value(t.C2);
  w.key("scale").value(t.scale);
  w.key("C3").value(t.C3);
  w.key("C1").begin_array();
  for (double v : t.C1) w.value(v);
  w.end_array();
  w.key("C7").begin_array();
  for (double v : t.C7) w.value(v);
  w.end_array();
  w.key("C5").begin_object();
  for (const auto& [key, v] : t.C5) w.key(key_of(key)).value(to_string(v));
  w.end_object();
  w.key("C6").begin_object();
  for (const auto& [key, v] : t.C6) w.key(key_of(key)).value(to_string(v));
  w.end_object();
  w.key("C8").begin_object();
  for (const auto& [key, v] : t.C8) w.key(key_of(key)).value(v);
  w.end_object();
  w.end_object();
  return w.str();
}

}  // namespace kcut::series
