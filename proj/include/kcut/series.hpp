#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace kcut::series {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& v);  // "p/q" or "p"

// Truncated bivariate series Σ c(j,b) m^j x^b, j <= m_cap, b <= x_cap.
class BiSeries {
 public:
  BiSeries(int m_cap, int x_cap);

  static BiSeries constant(int m_cap, int x_cap, const Rational& value);

  int m_cap() const { return m_cap_; }
  int x_cap() const { return x_cap_; }

  const Rational& coeff(int j, int b) const;
  void set(int j, int b, const Rational& value);

  BiSeries operator+(const BiSeries& other) const;
  BiSeries operator*(const BiSeries& other) const;
  bool operator==(const BiSeries& other) const;

 private:
  void check_caps(const BiSeries& other) const;
  std::size_t index(int j, int b) const;

  int m_cap_;
  int x_cap_;
  std::vector<Rational> c_;
};

using IndexMap = std::map<std::pair<int, int>, Rational>;

// Keys (j,b) with 1 <= j <= k, jk+j <= b <= jk+k.
std::vector<std::pair<int, int>> index_domain(int k);

// (e^{x^k/k!} Q(k,x))^m with m symbolic, truncated at x^{k^2+2k} and m^k.
BiSeries expand_core(int k);
// h0(x) (e^{x^k/k!} Q(k,x))^m with h0(x) = e^{-x}/(2Q(k,x)-1).
BiSeries expand_h0(int k);

// Coefficients of the expansion restricted to index_domain(k).
IndexMap c5_table(int k);
IndexMap c6_table(int k);

struct ConstantTable {
  int k = 0;
  int r = 0;
  double k0 = 0.0;  // validity exponent: expansions hold for x < m^{-k0}
  IndexMap C5;
  IndexMap C6;
  std::vector<double> C1;  // index i-1 for i in [1,k]
  double C2 = 0.0;
  double scale = 0.0;  // r * C2: prefactor of the mean, n * scale * lg(n)^{-r/k-1} * μ
  double C3 = 0.0;
  std::vector<double> C7;  // index i-1 for i in [1,k]
  std::map<std::pair<int, int>, double> C8;

  double c1(int i) const { return C1.at(static_cast<std::size_t>(i - 1)); }
  double c7(int i) const { return C7.at(static_cast<std::size_t>(i - 1)); }
};

ConstantTable constants(int k, int r);

// Centering μ_{r,n} = (k/r) lg n + Σ_i C1(r,i) lg(n)^{1-i/k} + lg lg n.
double mu(const ConstantTable& table, double n);

// Constant Σ_r scale(r)/scale(1) lg(n)^{-(r-1)/k} μ_{r,n} used when all record orders are pooled.
double mu_total(const std::vector<ConstantTable>& tables, double n);

// Tables for r = 1..k.
std::vector<ConstantTable> all_constants(int k);

std::string table_json(const ConstantTable& table);

}  // namespace kcut::series
