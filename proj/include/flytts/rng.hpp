#pragma once

#include <cstdint>
#include <string_view>

namespace flytts {

// SplitMix64 stream. Self-contained so generated values are identical across
// standard libraries and platforms, which std::uniform_real_distribution does
// not guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1), 24 bits of mantissa.
    float next_uniform();

    // Uniform in [-bound, bound].
    float next_symmetric(float bound);

    // Standard normal via Box-Muller; second deviate is cached.
    float next_normal();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    float spare_ = 0.0f;
};

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t fnv1a64(const std::uint8_t* bytes, std::size_t n,
                      std::uint64_t seed = 14695981039346656037ULL);

}  // namespace flytts
