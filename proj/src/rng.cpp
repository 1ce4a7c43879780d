#include "thinning/rng.hpp"

#include <cmath>

#include "thinning/errors.hpp"

namespace thinning {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

RngState::RngState(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // Expand (seed, stream) through a splitmix64 chain so that nearby seeds
  // produce unrelated states.
  std::uint64_t z = seed ^ mix64(stream);
  for (auto& w : s_) {
    z = mix64(z);
    w = z;
  }
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ull;
}

RngState RngState::split(std::uint64_t lane) const {
  return RngState(seed_, mix64(stream_ * 0xd1342543de82ef95ull ^ (lane + 1)));
}

std::uint64_t RngState::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngState::uniform01() {
  // (k + 0.5) / 2^52 with k in [0, 2^52): never exactly 0 or 1.
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngState::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t RngState::uniform_below(std::uint64_t n) {
  if (n == 0) fail(errc::domain_error, "uniform_below: n must be positive");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double RngState::normal() {
  for (;;) {
    const double u = 2.0 * uniform01() - 1.0;
    const double v = 2.0 * uniform01() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double RngState::exponential() { return -std::log(uniform01()); }

double RngState::gamma(double shape) {
  if (!(shape > 0.0)) fail(errc::domain_error, "gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost from shape + 1: G(a) = G(a + 1) * U^(1/a).
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngState::beta(double a, double b) {
  const double ga = gamma(a);
  const double gb = gamma(b);
  return ga / (ga + gb);
}

void RngState::normal_fill(std::vector<double>& out, std::size_t n) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = normal();
}

}  // namespace thinning
