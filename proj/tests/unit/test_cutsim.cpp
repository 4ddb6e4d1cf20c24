#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "doctest.h"
#include "kcut/cutsim.hpp"
#include "kcut/errors.hpp"
#include "kcut/exactmean.hpp"

using namespace kcut;
using series::Rational;

namespace {

// Exhaustive enumeration of the cutting process itself.  Each state records the
// cut count of every node (node variant) or edge (edge variant, edge v joins v
// to its parent); a removed item has count k.
cutsim::Pmf enumerate_process(int n, int k, cutsim::Variant variant) {
  std::map<std::vector<int>, cutsim::Pmf> memo;
  const bool edge = variant == cutsim::Variant::edge;
  std::function<cutsim::Pmf(const std::vector<int>&)> go = [&](const std::vector<int>& c) {
    if (auto it = memo.find(c); it != memo.end()) return it->second;
    // items still attached to the root
    std::vector<int> live;
    for (int v = edge ? 2 : 1; v <= n; ++v) {
      bool attached = c[v] < k;
      for (int u = v; attached && u > 1; u /= 2) {
        if (edge ? c[u] >= k : c[u / 2] >= k) attached = false;
      }
      if (attached) live.push_back(v);
    }
    cutsim::Pmf out;
    const bool done = edge ? live.empty() : c[1] >= k;
    if (done) {
      out[0] = 1;
    } else {
      for (int v : live) {
        auto next = c;
        ++next[v];
        for (const auto& [cuts, p] : go(next)) {
          out[cuts + 1] += p / static_cast<int>(live.size());
        }
      }
    }
    memo[c] = out;
    return out;
  };
  return go(std::vector<int>(n + 1, 0));
}

Rational pmf_mean(const cutsim::Pmf& pmf) {
  Rational m(0);
  for (const auto& [v, p] : pmf) m += p * static_cast<int>(v);
  return m;
}

}  // namespace

TEST_CASE("brute-force law matches direct enumeration of the process") {
  for (auto variant : {cutsim::Variant::node, cutsim::Variant::edge}) {
    for (int n = 1; n <= 4; ++n) {
      for (int k = 1; k <= 3; ++k) {
        if (variant == cutsim::Variant::edge && n == 1) continue;
        CAPTURE(n);
        CAPTURE(k);
        CHECK(cutsim::brute_force_distribution(n, k, variant) == enumerate_process(n, k, variant));
      }
    }
  }
}

TEST_CASE("small exact laws") {
  const auto u = cutsim::brute_force_distribution(3, 1);
  CHECK(u == cutsim::Pmf{{1, Rational(1, 3)}, {2, Rational(1, 3)}, {3, Rational(1, 3)}});
  CHECK(cutsim::brute_force_distribution(2, 1) ==
        cutsim::Pmf{{1, Rational(1, 2)}, {2, Rational(1, 2)}});
  CHECK(cutsim::brute_force_distribution(1, 3) == cutsim::Pmf{{3, Rational(1)}});
  CHECK(cutsim::brute_force_distribution(3, 1, cutsim::Variant::edge) == cutsim::Pmf{{2, Rational(1)}});
  CHECK_THROWS_AS(cutsim::brute_force_distribution(5, 1), ConfigError);
}

TEST_CASE("record counts are consistent per sample") {
  const CompleteTree tree(1000);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto x = cutsim::simulate_records(tree, 3, 7, s);
    REQUIRE(x.per_r.size() == 3);
    CHECK(x.total == x.per_r[0] + x.per_r[1] + x.per_r[2]);
    CHECK(x.per_r[0] >= 1);  // the root is always a record of every order
    CHECK(x.per_r[0] >= x.per_r[1]);
    CHECK(x.per_r[1] >= x.per_r[2]);
    CHECK(x.total <= 3 * tree.size());
  }
  const auto one = cutsim::simulate_records(CompleteTree(1), 2, 1, 0);
  CHECK(one.total == 2);
}

TEST_CASE("simulators reproduce the exact mean") {
  const std::uint64_t N = 100000;
  for (auto variant : {cutsim::Variant::node, cutsim::Variant::edge}) {
    for (auto method : {cutsim::Method::records, cutsim::Method::process}) {
      const auto batch = cutsim::simulate_batch(CompleteTree(4), 2, variant, method, N, 3);
      double s = 0.0, s2 = 0.0;
      for (const auto& x : batch) {
        s += static_cast<double>(x.total);
        s2 += static_cast<double>(x.total * x.total);
      }
      const double mean = s / N;
      const double var = s2 / N - mean * mean;
      const double exact = static_cast<double>(
          pmf_mean(cutsim::brute_force_distribution(4, 2, variant)));
      CHECK(std::abs(mean - exact) <= 4.0 * std::sqrt(var / N));
    }
  }
}

TEST_CASE("edge records match the edge law mean at larger n") {
  const std::uint64_t N = 50000;
  const CompleteTree tree(31);
  const auto rec = cutsim::simulate_batch(tree, 2, cutsim::Variant::edge, cutsim::Method::records, N, 4);
  const auto proc = cutsim::simulate_batch(tree, 2, cutsim::Variant::edge, cutsim::Method::process, N, 5);
  double a = 0.0, b = 0.0, a2 = 0.0, b2 = 0.0;
  for (std::uint64_t i = 0; i < N; ++i) {
    const double x = static_cast<double>(rec[i].total), y = static_cast<double>(proc[i].total);
    a += x;
    b += y;
    a2 += x * x;
    b2 += y * y;
  }
  const double va = a2 / N - (a / N) * (a / N), vb = b2 / N - (b / N) * (b / N);
  CHECK(std::abs(a / N - b / N) <= 4.0 * std::sqrt((va + vb) / N));
  double exact = 0.0;
  for (int r = 1; r <= 2; ++r) {
    exactmean::MeanQuery q;
    q.n = 31;
    q.k = 2;
    q.r = r;
    q.variant = cutsim::Variant::edge;
    exact += exactmean::expected_records(q);
  }
  CHECK(std::abs(a / N - exact) <= 4.0 * std::sqrt(va / N));
}

TEST_CASE("batches do not depend on the thread count") {
  const CompleteTree tree(500);
  for (auto method : {cutsim::Method::records, cutsim::Method::process}) {
    const auto a = cutsim::simulate_batch(tree, 2, cutsim::Variant::node, method, 64, 99, 1);
    const auto b = cutsim::simulate_batch(tree, 2, cutsim::Variant::node, method, 64, 99, 8);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].total == b[i].total);
      CHECK(a[i].per_r == b[i].per_r);
      CHECK(a[i].stream == i);
    }
  }
}

TEST_CASE("rescaling") {
  const auto t = series::constants(1, 1);
  cutsim::SimSample s;
  s.k = 1;
  s.per_r = {100};
  s.total = 100;
  const double n = 1024.0;
  // classical form X lg^2 n / n - lg n - lg lg n, shifted by the +1 of 1 - W
  CHECK(cutsim::rescale_sample(s, 1, t, n) ==
        doctest::Approx(100.0 * 100.0 / 1024.0 - 10.0 - std::log2(10.0) + 1.0).epsilon(1e-14));
  CHECK(cutsim::rescale_total(s, {t}, n) == doctest::Approx(cutsim::rescale_sample(s, 1, t, n)));
  CHECK_THROWS_AS(cutsim::rescale_sample(s, 1, series::constants(2, 1), n), DomainError);
  CHECK_THROWS_AS(cutsim::rescale_sample(s, 1, t, 2.0), DomainError);
  CHECK(cutsim::parse_variant("edge") == cutsim::Variant::edge);
  CHECK(cutsim::to_string(cutsim::Variant::node) == "node");
  CHECK_THROWS_AS(cutsim::parse_variant("vertex"), ConfigError);
  CHECK_THROWS_AS(cutsim::simulate_records(CompleteTree(3), 0, 1), DomainError);
}
