#pragma once
#include <array>
#include <cstdint>

namespace kpr {

// Deterministic pseudo-random stream owned by exactly one logical task.
//
// Generator: xoshiro256** (Blackman & Vigna 2018). The four state words are
// filled from the 64-bit seed by the splitmix64 sequence, so every seed
// (including 0) yields a well-mixed state. Uniform reals in [0, 1) take the
// high 53 bits of the next word:  u = (word >> 11) * 2^-53.
//
// The same seed always reproduces the same output sequence. Streams are
// never shared between concurrent consumers; derive one stream per task
// with substream(), which mixes (base seed, task index) through the
// splitmix64 finalizer.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            word = mix_bits(sm);
        }
    }

    std::uint64_t next_u64() {
        auto& s = state_;
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Uniform in [0, 1); consumes exactly one 64-bit word.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return seed_; }

    // Derived seed for stream number `index` under `base_seed`:
    // splitmix64 finalizer applied to base_seed + (index + 1) * 2^64/phi.
    static std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t index) {
        return mix_bits(base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    static RngStream substream(std::uint64_t base_seed, std::uint64_t index) {
        return RngStream(mix_seed(base_seed, index));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // splitmix64 finalizer (Stafford mix 13).
    static std::uint64_t mix_bits(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_ = 0;
};

}  // namespace kpr
