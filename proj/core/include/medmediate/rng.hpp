// Counter-keyed random number streams.
//
// Reproducibility contract: every Monte Carlo draw in the library is produced
// by a stream constructed from an explicit key (seed plus tags such as
// replicate index, resample index, draw index, row rank). Streams never
// depend on thread scheduling, so results are identical for any thread count.
#pragma once

#include <cstdint>

#include "medmediate/normal.hpp"

namespace medmediate {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mixes one tag into a key. Chain calls to build hierarchical stream keys.
inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t tag) {
    std::uint64_t s = key ^ (tag + 0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2));
    return splitmix64(s);
}

template <typename... Tags>
std::uint64_t derive_key(std::uint64_t key, std::uint64_t tag, Tags... rest) {
    return derive_key(derive_key(key, tag), static_cast<std::uint64_t>(rest)...);
}

/// xoshiro256++ generator, seeded from a 64-bit key via splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t key) {
        for (auto& word : state_) word = splitmix64(key);
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
        return result;
    }

    /// Uniform double strictly inside (0, 1), 53-bit resolution.
    double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal draw by inverse-CDF transform (portable across platforms).
    double normal() { return norm_quantile(uniform01()); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace medmediate
