#include "kcut/cutsim.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "kcut/errors.hpp"
#include "kcut/parallel.hpp"
#include "kcut/rng.hpp"

namespace kcut::cutsim {

namespace {

constexpr std::uint64_t kAbsent = std::numeric_limits<std::uint64_t>::max();

void check_k(int k) {
  if (k < 1) throw DomainError("k must be >= 1, got " + std::to_string(k));
}

struct Frame {
  std::uint64_t v;
  double ancestor_min;
};

// Depth-first walk from `start` frames.  Only O(height) frames are live at once
// because the left child is always expanded before its right sibling.
void count_records(const CompleteTree& tree, int k, rng::Stream& rng, std::vector<Frame> stack,
                   SimSample& out) {
  const std::uint64_t n = tree.size();
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    double t = 0.0;
    double child_min = f.ancestor_min;
    for (int r = 0; r < k; ++r) {
      t += rng.exponential();
      if (!(t < f.ancestor_min)) break;  // later clocks are larger still
      ++out.per_r[static_cast<std::size_t>(r)];
      if (r == k - 1) child_min = t;
    }
    if (f.v <= n / 2) {
      const std::uint64_t left = 2 * f.v;
      if (left + 1 <= n) stack.push_back({left + 1, child_min});
      stack.push_back({left, child_min});
    }
  }
  out.total = 0;
  for (auto c : out.per_r) out.total += c;
}

SimSample make_sample(int k, Variant variant, std::uint64_t seed, std::uint64_t stream) {
  SimSample s;
  s.k = k;
  s.variant = variant;
  s.seed = seed;
  s.stream = stream;
  return s;
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "node") return Variant::node;
  if (name == "edge") return Variant::edge;
  throw ConfigError("unknown variant '" + std::string(name) + "' (expected node or edge)");
}

std::string_view to_string(Variant v) { return v == Variant::node ? "node" : "edge"; }

SimSample simulate_records(const CompleteTree& tree, int k, std::uint64_t seed,
                           std::uint64_t stream) {
  check_k(k);
  SimSample out = make_sample(k, Variant::node, seed, stream);
  out.per_r.assign(static_cast<std::size_t>(k), 0);
  rng::Stream rng(seed, stream);
  std::vector<Frame> stack;
  stack.reserve(static_cast<std::size_t>(2 * tree.height() + 4));
  stack.push_back({1, std::numeric_limits<double>::infinity()});
  count_records(tree, k, rng, std::move(stack), out);
  return out;
}

SimSample simulate_edge_records(const CompleteTree& tree, int k, std::uint64_t seed,
                                std::uint64_t stream) {
  check_k(k);
  SimSample out = make_sample(k, Variant::edge, seed, stream);
  out.per_r.assign(static_cast<std::size_t>(k), 0);
  rng::Stream rng(seed, stream);
  std::vector<Frame> stack;
  stack.reserve(static_cast<std::size_t>(2 * tree.height() + 4));
  const double inf = std::numeric_limits<double>::infinity();
  if (tree.size() >= 3) stack.push_back({3, inf});
  if (tree.size() >= 2) stack.push_back({2, inf});
  count_records(tree, k, rng, std::move(stack), out);
  return out;
}

SimSample simulate_process(const CompleteTree& tree, int k, std::uint64_t seed,
                           std::uint64_t stream, Variant variant) {
  check_k(k);
  SimSample out = make_sample(k, variant, seed, stream);
  rng::Stream rng(seed, stream);
  const std::uint64_t n = tree.size();
  const std::uint64_t first = variant == Variant::node ? 1 : 2;

  // Nodes connected to the root, with O(1) uniform choice and swap-removal.
  std::vector<std::uint64_t> live;
  std::vector<std::uint64_t> pos(n + 1, kAbsent);
  std::vector<std::uint32_t> cuts(n + 1, 0);
  live.reserve(n);
  for (std::uint64_t v = first; v <= n; ++v) {
    pos[v] = live.size();
    live.push_back(v);
  }

  auto detach = [&](std::uint64_t v) {
    const std::uint64_t i = pos[v];
    const std::uint64_t last = live.back();
    live[i] = last;
    pos[last] = i;
    live.pop_back();
    pos[v] = kAbsent;
  };

  std::vector<std::uint64_t> stack;
  while (!live.empty()) {
    const std::uint64_t v = live[rng.below(live.size())];
    ++out.total;
    if (++cuts[v] < static_cast<std::uint32_t>(k)) continue;
    if (v == 1) break;
    // A detached node's subtree is already detached, so the walk stops there.
    stack.assign(1, v);
    while (!stack.empty()) {
      const std::uint64_t w = stack.back();
      stack.pop_back();
      if (pos[w] == kAbsent) continue;
      detach(w);
      if (w <= n / 2) {
        if (2 * w + 1 <= n) stack.push_back(2 * w + 1);
        stack.push_back(2 * w);
      }
    }
  }
  return out;
}

std::vector<SimSample> simulate_batch(const CompleteTree& tree, int k, Variant variant,
                                      Method method, std::uint64_t samples,
                                      std::uint64_t seed, unsigned threads) {
  check_k(k);
  std::vector<SimSample> out(samples);
  parallel_for(samples, threads, [&](std::uint64_t i) {
    if (method == Method::process) {
      out[i] = simulate_process(tree, k, seed, i, variant);
    } else if (variant == Variant::node) {
      out[i] = simulate_records(tree, k, seed, i);
    } else {
      out[i] = simulate_edge_records(tree, k, seed, i);
    }
  });
  return out;
}

Pmf brute_force_distribution(int n, int k, Variant variant) {
  if (n < 1 || n > 4 || k < 1 || k > 3) {
    throw ConfigError("brute_force_distribution supports 1 <= n <= 4 and 1 <= k <= 3, got n=" +
                      std::to_string(n) + ", k=" + std::to_string(k));
  }
  const int first = variant == Variant::node ? 1 : 2;
  // State: base-(k+1) digits, digit v-1 = cuts received by node v.
  std::unordered_map<std::uint32_t, Pmf> memo;

  auto digit = [k](std::uint32_t s, int v) {
    for (int i = 1; i < v; ++i) s /= static_cast<std::uint32_t>(k + 1);
    return static_cast<int>(s % static_cast<std::uint32_t>(k + 1));
  };
  auto power = [k](int v) {
    std::uint32_t p = 1;
    for (int i = 1; i < v; ++i) p *= static_cast<std::uint32_t>(k + 1);
    return p;
  };
  auto connected = [&](std::uint32_t s, int v) {
    for (int u = v; u >= first; u /= 2) {
      if (digit(s, u) >= k) return false;
    }
    return true;
  };

  auto remaining = [&](auto&& self, std::uint32_t s) -> const Pmf& {
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    std::vector<int> choices;
    for (int v = first; v <= n; ++v) {
      if (connected(s, v)) choices.push_back(v);
    }
    Pmf result;
    if (choices.empty()) {
      result[0] = 1;
    } else {
      const series::Rational p(1, static_cast<long>(choices.size()));
      for (int v : choices) {
        const std::uint32_t next = s + power(v);
        if (v == 1 && digit(next, 1) == k) {
          result[1] += p;
          continue;
        }
        for (const auto& [count, q] : self(self, next)) result[count + 1] += p * q;
      }
    }
    return memo.emplace(s, std::move(result)).first->second;
  };
  return remaining(remaining, 0);
}

double rescale_sample(const SimSample& sample, int r, const series::ConstantTable& table,
                      double n) {
  if (sample.k != table.k || r != table.r) {
    throw DomainError("rescale_sample: sample k=" + std::to_string(sample.k) +
                      " does not match table (k=" + std::to_string(table.k) +
                      ", r=" + std::to_string(table.r) + ") for r=" + std::to_string(r));
  }
  if (sample.per_r.size() != static_cast<std::size_t>(sample.k)) {
    throw DomainError("rescale_sample: sample carries no per-order record counts");
  }
  if (!(n >= 4.0)) throw DomainError("rescale_sample: n must be >= 4");
  const double lg = std::log2(n);
  const double x = static_cast<double>(sample.per_r[static_cast<std::size_t>(r - 1)]);
  return x * std::pow(lg, static_cast<double>(r) / table.k + 1.0) / (n * table.scale) -
         series::mu(table, n);
}

double rescale_total(const SimSample& sample, const std::vector<series::ConstantTable>& tables,
                     double n) {
  if (tables.empty() || static_cast<int>(tables.size()) != sample.k ||
      tables.front().k != sample.k) {
    throw DomainError("rescale_total: constant tables do not match sample k=" +
                      std::to_string(sample.k));
  }
  if (!(n >= 4.0)) throw DomainError("rescale_total: n must be >= 4");
  const double lg = std::log2(n);
  const auto& t1 = tables.front();
  return static_cast<double>(sample.total) * std::pow(lg, 1.0 / t1.k + 1.0) / (n * t1.scale) -
         series::mu_total(tables, n);
}

}  // namespace kcut::cutsim
