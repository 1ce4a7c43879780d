#pragma once

#include <cstdint>
#include <vector>

namespace thinning {

// splitmix64 finalizer; used to expand seeds and derive child streams.
std::uint64_t mix64(std::uint64_t z);

// Seedable, splittable pseudo-random stream (xoshiro256++ over a splitmix64
// seed expansion). RngState is a value: copying forks the sequence, and the
// same (seed, stream) pair always reproduces the same draws bit for bit.
// Distinct stream ids give statistically independent streams; child streams
// are derived with split(), which hashes (stream, lane) through mix64.
class RngState {
 public:
  explicit RngState(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Independent stream for worker lane / replicate index `lane`.
  RngState split(std::uint64_t lane) const;

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1), 52-bit mantissa.
  double uniform01();
  double uniform(double lo, double hi);
  // Unbiased integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via the Marsaglia polar method.
  double normal();
  // Exponential with rate 1.
  double exponential();
  // Gamma with the given shape and rate 1 (Marsaglia-Tsang, with the
  // U^(1/a) boost for shape < 1).
  double gamma(double shape);
  // Beta(a, b) from a pair of gammas.
  double beta(double a, double b);

  void normal_fill(std::vector<double>& out, std::size_t n);

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace thinning
