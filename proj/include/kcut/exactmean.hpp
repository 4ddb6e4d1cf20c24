#pragma once

#include <cstdint>
#include <limits>

#include "kcut/cutsim.hpp"
#include "kcut/series.hpp"

namespace kcut::exactmean {

struct MeanQuery {
  std::uint64_t n = 1;
  int k = 1;
  int r = 1;
  // Root removal time T_{k,root}; infinity means unconditional.  A finite y
  // counts records strictly below the root, as does the edge variant.
  double y = std::numeric_limits<double>::infinity();
  cutsim::Variant variant = cutsim::Variant::node;
};

// P(T_r < y and T_r < every one of `ancestors` independent Gamma(k,1) times),
// T_r ~ Gamma(r,1):  ∫_0^y x^{r-1} e^{-x}/Γ(r) Q(k,x)^ancestors dx.
double record_prob(int r, int k, std::uint64_t ancestors,
                   double y = std::numeric_limits<double>::infinity());

// E X_{n,r} summed level by level over the complete tree.
double expected_records(const MeanQuery& query);

// E X_{n,r} for the full tree with levels 0..height (2^{height+1}-1 nodes),
// usable far beyond 64-bit node counts.
double expected_records_full(int height, int k, int r);

// Main terms C2 n lg^{-r/k-1} (μ_{r,n} - lg lg n) + C2 2^{m+1} lg^{-r/k-1}.
double asymptotic_mean(std::uint64_t n, const series::ConstantTable& table);

}  // namespace kcut::exactmean
