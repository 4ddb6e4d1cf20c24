#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace kcut::rng {

// Philox4x32-10 block function (Salmon et al., counter-based).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

// A reproducible stream of 64-bit words.  The key is the 64-bit seed; the
// counter holds the block number in words 0-1 and the stream id in words 2-3,
// so stream s of seed X is the same sequence no matter which thread draws it.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0,1) with 53 random bits.
  double uniform();
  // Unit-mean exponential.
  double exponential();
  // Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
};

// Mixes a tag into a seed (splitmix64 finalizer) to give unrelated seeds per tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace kcut::rng
