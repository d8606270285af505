#pragma once

#include <array>
#include <cstdint>

namespace sticky {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on u64.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Injective in replica_index for fixed master_seed: mix64 is a bijection
// applied to distinct inputs.
inline std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t replica_index) {
    return mix64(mix64(master_seed) + replica_index);
}

// Disjoint stream for a second purpose (e.g. sampler warm-up vs chain run).
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t replica_index,
                                        std::uint64_t purpose) {
    return mix64(mix64(master_seed ^ mix64(purpose)) + replica_index);
}

// Counter-based generator with Philox-2x64-10 style rounds (after Salmon et
// al., SC 2011; 64-bit counter variant). Each key selects an independent
// stream; the counter is advanced per block.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        if (lane_ == 2) {
            block_ = philox(counter_++, key_);
            lane_ = 0;
        }
        return block_[lane_++];
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const { return key_; }

private:
    static constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

    static std::array<std::uint64_t, 2> philox(std::uint64_t counter, std::uint64_t key) {
        std::uint64_t x0 = counter;
        std::uint64_t x1 = 0;
        std::uint64_t k = key;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod = static_cast<unsigned __int128>(kMultiplier) * x0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ k ^ x1;
            x1 = lo;
            k += kWeyl;
        }
        return {x0, x1};
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> block_{};
    int lane_ = 2;
};

}  // namespace sticky
