#pragma once

#include <cstdint>

namespace hebart {

// Seedable, stream-splittable RNG used everywhere randomness is needed.
//
// Generator: xoshiro256++ with state derived from (seed, stream) via a
// splitmix64 scramble. The implementation is pure 64-bit integer
// arithmetic, so a given (seed, stream) pair produces the same sequence
// on every platform. Distinct stream ids give independently initialized
// states; one stream has one owner (copy with a fresh id to share).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Uniform on the open interval (0, 1); safe as a Metropolis u.
  double uniform_open01();

  // A derived stream with the same seed; distinct keys give distinct
  // streams, also distinct from any stream handed out for another key.
  RngStream split(std::uint64_t key) const;

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
};

}  // namespace hebart
