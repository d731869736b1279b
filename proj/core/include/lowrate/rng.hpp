#pragma once

#include <cstdint>
#include <limits>

namespace lowrate {

/// Identifies one logical draw stream inside a run. Streams with distinct
/// keys are independent; the same key always reproduces the same sequence.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t rep = 0;
    std::uint64_t sensor = 0;
    std::uint64_t purpose = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}
} // namespace detail

/// xoshiro256++ seeded by hashing a StreamKey through splitmix64.
/// Counter-based splitting: every (seed, rep, sensor, purpose) tuple maps to
/// an unrelated point of the state space.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(const StreamKey& key) {
        std::uint64_t h = key.master_seed;
        (void)detail::splitmix64(h);
        h ^= detail::rotl(key.rep, 17) + 0x632be59bd9b4e019ULL;
        (void)detail::splitmix64(h);
        h ^= detail::rotl(key.sensor, 33) + 0x9e6c63d0876a9a47ULL;
        (void)detail::splitmix64(h);
        h ^= detail::rotl(key.purpose, 47) + 0xd1b54a32d192ed03ULL;
        for (auto& si : s_) si = detail::splitmix64(h);
    }

    RngStream(std::uint64_t master_seed, std::uint64_t rep = 0,
              std::uint64_t sensor = 0, std::uint64_t purpose = 0)
        : RngStream(StreamKey{master_seed, rep, sensor, purpose}) {}

    result_type operator()() {
        const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<std::uint64_t>::max();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t s_[4];
};

} // namespace lowrate
