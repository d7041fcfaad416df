#ifndef SPDT_RANDOM_HPP
#define SPDT_RANDOM_HPP

#include <cstdint>

namespace spdt {

// splitmix64 step; used for seeding and for key mixing.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// xoshiro256** — the project-wide random stream. All sampling goes through
// this engine plus hand-written inverse-CDF transforms so that output is
// bit-identical across platforms and standard libraries.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed)
    {
        std::uint64_t sm = seed;
        for (auto &w : state_)
            w = splitmix64(sm);
    }

    // Derived stream: same master seed, independent substream per key.
    static RandomStream derive(std::uint64_t master, std::uint64_t key)
    {
        return RandomStream(mix_keys(master, key));
    }
    static RandomStream derive(std::uint64_t master, std::uint64_t k1, std::uint64_t k2)
    {
        return RandomStream(mix_keys(mix_keys(master, k1), k2));
    }

    std::uint64_t next_u64()
    {
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

    // Uniform double in [0, 1), 53 significant bits.
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n)
    {
        // Lemire's multiply-shift with rejection; unbiased and fast.
        std::uint64_t x = next_u64();
        __uint128_t m = (__uint128_t)x * n;
        auto lo = (std::uint64_t)m;
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = (__uint128_t)x * n;
                lo = (std::uint64_t)m;
            }
        }
        return (std::uint64_t)(m >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

} // namespace spdt

#endif
