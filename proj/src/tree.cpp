#include "kcut/tree.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "kcut/errors.hpp"

namespace kcut {

CompleteTree::CompleteTree(std::uint64_t n) : n_(n), height_(0) {
  if (n < 1) throw DomainError("CompleteTree: need at least one node");
  height_ = depth(n);
}

int CompleteTree::depth(std::uint64_t v) {
  if (v == 0) throw DomainError("CompleteTree: node index 0 is not a node");
  return static_cast<int>(std::bit_width(v)) - 1;
}

std::uint64_t CompleteTree::subtree_size(std::uint64_t v) const {
  if (!contains(v)) return 0;
  using u128 = unsigned __int128;
  std::uint64_t count = 0;
  u128 lo = v;
  u128 width = 1;
  while (lo <= n_) {
    const u128 hi = std::min<u128>(lo + width - 1, n_);
    count += static_cast<std::uint64_t>(hi - lo + 1);
    lo <<= 1;
    width <<= 1;
  }
  return count;
}

std::uint64_t CompleteTree::level_count(int h) const {
  if (h < 0 || h > height_) return 0;
  if (h < height_) return std::uint64_t{1} << h;
  return n_ - ((std::uint64_t{1} << height_) - 1);
}

}  // namespace kcut
