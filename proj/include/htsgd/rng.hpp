// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace htsgd {

// SplitMix64 finalizer used for seed whitening.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Domain tags keep streams for different roles disjoint even when they share
// a master seed and replication index.
enum class StreamDomain : std::uint64_t {
  data = 1,           // per-replication training data
  series_oracle = 2,  // series-representation oracle draws
  stable_oracle = 3,  // closed-form stable oracle draws
  scratch = 4,        // tests and ad-hoc sampling
};

inline std::uint64_t derive_stream_key(std::uint64_t master_seed,
                                       StreamDomain domain,
                                       std::uint64_t replication) {
  std::uint64_t k = mix64(master_seed + 0x9e3779b97f4a7c15ULL);
  k = mix64(k ^ mix64(static_cast<std::uint64_t>(domain) + 0xbf58476d1ce4e5b9ULL));
  k = mix64(k ^ mix64(replication + 0x94d049bb133111ebULL));
  return k;
}

// Deterministic stream keyed by (master seed, domain, replication index).
// The generator is xoshiro256++ with splitmix64 state expansion; all variate
// transforms are implemented here instead of std::*_distribution so draws are
// bit-identical across standard libraries and platforms.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t replication)
      : key_(derive_stream_key(master_seed, domain, replication)) {
    std::uint64_t s = key_;
    for (auto& w : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      w = mix64(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    ++words_drawn_;
    return result;
  }

  // Uniform on the open interval (0,1), 53-bit resolution.
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform01()); }

  // +1 or -1 with equal probability.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(2.0 * exponential());
    const double phi = 2.0 * kPi * uniform01();
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t words_drawn() const { return words_drawn_; }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t key_;
  std::uint64_t state_[4] = {};
  std::uint64_t words_drawn_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace htsgd
