#pragma once

#include <cstdint>

namespace kcut {

// Complete binary tree on nodes 1..n in heap order: children of i are 2i and
// 2i+1, the last level is filled from the left.  Nothing is stored per node.
class CompleteTree {
 public:
  explicit CompleteTree(std::uint64_t n);

  std::uint64_t size() const { return n_; }
  // m = floor(lg n), the height of the deepest level.
  int height() const { return height_; }
  bool contains(std::uint64_t v) const { return v >= 1 && v <= n_; }

  static int depth(std::uint64_t v);
  std::uint64_t subtree_size(std::uint64_t v) const;
  std::uint64_t level_count(int h) const;

 private:
  std::uint64_t n_;
  int height_;
};

}  // namespace kcut
