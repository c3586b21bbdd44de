#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace qiforest {

// Deterministic, platform-independent random stream (xoshiro256** seeded
// through splitmix64). Every stochastic component of the library draws from
// one of these; independent child streams are derived from a master seed
// plus integer keys, so results never depend on scheduling or thread count.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    // Child stream keyed by one or more integers. Same (master, keys...)
    // always yields the same stream.
    static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
        std::uint64_t s = master;
        splitmix64(s);
        for (std::uint64_t k : keys) {
            s ^= k + 0x9e3779b97f4a7c15ULL;
            splitmix64(s);
        }
        return Rng(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform index in [0, bound). bound must be >= 1.
    std::size_t uniform_index(std::size_t bound) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Standard normal via Box-Muller (cosine branch; one sample per call).
    double gaussian() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& s) {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
};

// Stream keys used across the library so unrelated draws never collide.
namespace stream {
inline constexpr std::uint64_t subset = 1;
inline constexpr std::uint64_t bootstrap = 2;
inline constexpr std::uint64_t split = 3;
inline constexpr std::uint64_t trial = 4;
inline constexpr std::uint64_t data = 5;
inline constexpr std::uint64_t model = 6;
}  // namespace stream

}  // namespace qiforest
