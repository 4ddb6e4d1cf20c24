#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kcut/series.hpp"
#include "kcut/tree.hpp"

namespace kcut::cutsim {

enum class Variant { node, edge };

Variant parse_variant(std::string_view name);
std::string_view to_string(Variant v);

struct SimSample {
  int k = 0;
  // per_r[r-1] = X_{n,r}; left empty by simulate_process.
  std::vector<std::uint64_t> per_r;
  std::uint64_t total = 0;
  Variant variant = Variant::node;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Direct cutting: repeatedly pick a uniform node still connected to the root.
// The node variant stops when the root has been cut k times; the edge variant
// cuts edges (identified with their lower endpoint) until the root is isolated.
SimSample simulate_process(const CompleteTree& tree, int k, std::uint64_t seed,
                           std::uint64_t stream = 0, Variant variant = Variant::node);

// Record counting over exponential clocks.  A clock tie with an ancestor is
// resolved in favour of the ancestor (the node is not a record).
SimSample simulate_records(const CompleteTree& tree, int k, std::uint64_t seed,
                           std::uint64_t stream = 0);
SimSample simulate_edge_records(const CompleteTree& tree, int k, std::uint64_t seed,
                                std::uint64_t stream = 0);

enum class Method { records, process };

// samples[i] uses substream i of seed; output is independent of `threads`.
std::vector<SimSample> simulate_batch(const CompleteTree& tree, int k, Variant variant,
                                      Method method, std::uint64_t samples,
                                      std::uint64_t seed, unsigned threads = 0);

using Pmf = std::map<std::uint64_t, series::Rational>;

// Exact law of the total by enumeration over counter states (n <= 4, k <= 3).
Pmf brute_force_distribution(int n, int k, Variant variant = Variant::node);

// X_{n,r} lg(n)^{r/k+1} / (n C2(r)) - μ_{r,n}
double rescale_sample(const SimSample& sample, int r, const series::ConstantTable& table,
                      double n);
// Pooled form: K lg(n)^{1/k+1} / (n C2(1)) - Σ_r C2(r)/C2(1) lg(n)^{-(r-1)/k} μ_{r,n}.
double rescale_total(const SimSample& sample, const std::vector<series::ConstantTable>& tables,
                     double n);

}  // namespace kcut::cutsim
