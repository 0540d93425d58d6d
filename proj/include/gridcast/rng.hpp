#pragma once

#include <array>
#include <cstdint>

namespace gridcast {

/// Identifies one reproducible trial: identical (master_seed, stream_id)
/// pairs replay identical trajectories bit-for-bit.
struct RngSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

namespace detail {

/// 64-bit finalizer (splitmix64 avalanche). Full avalanche, bijective.
constexpr std::uint64_t avalanche(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    return avalanche(state);
}

} // namespace detail

/// xoshiro256** by Blackman & Vigna. Chosen over <random> engines because
/// its output (and our bounded mapping below) is identical on every
/// platform and compiler, which the byte-exact reproducibility contract
/// requires; std::uniform_int_distribution is implementation-defined.
class Xoshiro256StarStar {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256StarStar(std::uint64_t seed = 0) noexcept {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = detail::splitmix64(sm);
    }

    std::uint64_t next() noexcept {
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

    std::uint64_t operator()() noexcept { return next(); }

    /// Uniform integer in [0, n). Unbiased (Lemire's method with rejection);
    /// consumes one 64-bit draw per call, a second one with probability
    /// (2^64 mod n) / 2^64 < 2^-60 for the small n used here.
    std::uint64_t bounded(std::uint64_t n) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~0ULL; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

using Rng = Xoshiro256StarStar;

/// Lane id reserved for per-trial control draws (rumor source selection),
/// disjoint from any agent lane.
inline constexpr std::uint64_t kTrialControlLane = ~0ULL;

/// Derives the seed of one logical stream from (master, stream, lane).
/// Agents own lane = agent id, so growing k or changing the radius never
/// perturbs the draws of existing agents.
constexpr std::uint64_t derive_stream_key(std::uint64_t master,
                                          std::uint64_t stream,
                                          std::uint64_t lane) noexcept {
    std::uint64_t h = detail::avalanche(master + 0x9e3779b97f4a7c15ULL);
    h = detail::avalanche(h ^ (stream + 0xbf58476d1ce4e5b9ULL));
    h = detail::avalanche(h ^ (lane + 0x94d049bb133111ebULL));
    return h;
}

inline Rng agent_stream(const RngSeed& seed, std::uint64_t agent_id) noexcept {
    return Rng(derive_stream_key(seed.master_seed, seed.stream_id, agent_id));
}

inline Rng trial_stream(const RngSeed& seed) noexcept {
    return Rng(derive_stream_key(seed.master_seed, seed.stream_id, kTrialControlLane));
}

} // namespace gridcast
