#include <vector>

#include "doctest.h"
#include "kcut/errors.hpp"
#include "kcut/tree.hpp"

using namespace kcut;

TEST_CASE("subtree sizes and level counts match explicit counting") {
  for (std::uint64_t n = 1; n <= 200; ++n) {
    const CompleteTree tree(n);
    std::vector<std::uint64_t> size(n + 1, 1);
    for (std::uint64_t v = n; v >= 2; --v) size[v / 2] += size[v];
    std::vector<std::uint64_t> level(16, 0);
    for (std::uint64_t v = 1; v <= n; ++v) {
      CHECK(tree.subtree_size(v) == size[v]);
      ++level[CompleteTree::depth(v)];
    }
    for (int h = 0; h < 16; ++h) CHECK(tree.level_count(h) == level[h]);
    CHECK(tree.subtree_size(n + 1) == 0);
  }
}

TEST_CASE("heights and huge trees") {
  CHECK(CompleteTree(1).height() == 0);
  CHECK(CompleteTree(7).height() == 2);
  CHECK(CompleteTree(8).height() == 3);
  const CompleteTree big(std::uint64_t{1} << 62);
  CHECK(big.height() == 62);
  CHECK(big.subtree_size(1) == std::uint64_t{1} << 62);
  CHECK(big.subtree_size(2) == (std::uint64_t{1} << 61));
  CHECK(big.subtree_size(3) == (std::uint64_t{1} << 61) - 1);
  CHECK_THROWS_AS(CompleteTree(0), DomainError);
  CHECK_THROWS_AS(CompleteTree::depth(0), DomainError);
}
