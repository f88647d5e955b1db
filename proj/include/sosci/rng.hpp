#pragma once

#include <cstdint>
#include <limits>

namespace sosci {

/// SplitMix64 (the generator behind java.util.SplittableRandom).
///
/// Seeding is free, so every Monte-Carlo replicate gets its own engine whose
/// state is derived from (master seed, scenario stream, replicate).  Results
/// therefore never depend on how replicates are scheduled across threads.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

private:
    std::uint64_t state_;
};

using Engine = SplitMix64;

/// Seed of replicate `replicate` in stream `stream` under `master`.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t replicate) noexcept {
    std::uint64_t h = SplitMix64::mix(master + SplitMix64::kGamma);
    h = SplitMix64::mix(h ^ (stream * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
    h = SplitMix64::mix(h ^ (replicate * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL));
    return h;
}

inline Engine make_engine(std::uint64_t master, std::uint64_t stream, std::uint64_t replicate) noexcept {
    return Engine(stream_seed(master, stream, replicate));
}

// Reserved stream ids.
namespace streams {
inline constexpr std::uint64_t theta_draw = 0xA11CE;
inline constexpr std::uint64_t time_decay_scales = 0xD1A6;
} // namespace streams

} // namespace sosci
