#pragma once

#include <cmath>
#include <cstdint>

namespace turnhash {

namespace rng_detail {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rng_detail

// Counter-based deterministic random stream. A stream is identified by a seed
// plus up to three lane indices (e.g. table number, draw number); the i-th
// variate is a pure function of (seed, lanes, i), so any draw can be
// regenerated in isolation and streams never need to be stored. This is what
// makes hash-function draws repeatable across build, query and reload.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t lane0 = 0,
                     std::uint64_t lane1 = 0, std::uint64_t lane2 = 0) {
    using rng_detail::mix64;
    base_ = mix64(seed + rng_detail::kGamma);
    base_ = mix64(base_ ^ (lane0 + rng_detail::kGamma));
    base_ = mix64(base_ ^ (lane1 + rng_detail::kGamma));
    base_ = mix64(base_ ^ (lane2 + rng_detail::kGamma));
  }

  std::uint64_t bits(std::uint64_t i) const {
    return rng_detail::mix64(base_ + (i + 1) * rng_detail::kGamma);
  }

  // uniform on [0, 1), 53-bit resolution
  double u01(std::uint64_t i) const {
    return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t i, double lo, double hi) const {
    return lo + u01(i) * (hi - lo);
  }

  // standard normal via Box-Muller; consumes virtual indices 2i and 2i+1
  double gaussian(std::uint64_t i) const {
    double u1 = static_cast<double>((bits(2 * i) >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = u01(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t base_;
};

// order-dependent 64-bit accumulator for composite hash keys
inline std::uint64_t hash_combine(std::uint64_t acc, std::uint64_t v) {
  return rng_detail::mix64(acc ^ (v + rng_detail::kGamma + (acc << 6) + (acc >> 2)));
}

}  // namespace turnhash
