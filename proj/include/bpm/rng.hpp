#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace bpm {

// Counter-based splittable generator. The state is a (key, counter) pair where
// the key is derived once from (seed, stream_id); output i is a SplitMix64-style
// mix of key + i*gamma. Identical (seed, stream_id) gives an identical sequence
// on every platform, and derived streams are independent for all practical
// purposes, which is what the batch samplers rely on for reproducible merges.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), counter_(0) {
    key_ = mix(seed + 0x9e3779b97f4a7c15ull);
    key_ = mix(key_ ^ mix(stream_id + 0xbf58476d1ce4e5b9ull));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  // Child streams: statistically unrelated to the parent and to each other.
  RngStream derive(std::uint64_t child_id) const {
    RngStream child;
    child.seed_ = seed_;
    child.stream_id_ = mix(key_ ^ mix(child_id + 0x94d049bb133111ebull));
    child.key_ = mix(key_ + mix(child_id ^ 0xd6e8feb86659fd93ull));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

  // 32 random bits.
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  // Uniform on [0,1) with 53 bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0,...,n-1}, unbiased (rejection).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Geometric on {1,2,...} with success probability p: number of trials until
  // the first success. Inversion; exact enough for the statistical tests.
  long geometric_from_one(double p) {
    if (p >= 1.0) return 1;
    const double u = 1.0 - uniform01();  // in (0,1]
    return 1 + static_cast<long>(std::floor(std::log(u) / std::log1p(-p)));
  }

  // Label-increment law P(k) = 2^{-k-2}, k >= -1: bit-exact via fair coin runs.
  long bridge_increment() {
    long k = -1;
    while (true) {
      std::uint64_t bits = next_u64();
      for (int i = 0; i < 64; ++i) {
        if ((bits >> i) & 1ull) return k;
        ++k;
      }
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

// Draws an index from a finite pmf given as cumulative-free weights.
// Linear walk; callers keep supports small or tails certified.
inline std::size_t sample_index(RngStream& rng, const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  double u = rng.uniform01() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0) return i;
  }
  return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace bpm
