#pragma once

#include <cstdint>

namespace ringpir {

// Seedable generator used for every random choice in the library.  splitmix64
// keeps trial replay byte-identical across platforms, which the standard
// <random> distributions do not guarantee.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased uniform draw from {0, ..., n-1}.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    bool coin() { return (next() & 1u) != 0; }

  private:
    std::uint64_t state_;
};

// Derived seed for trial k of a campaign seeded with `seed`.  Trials are
// independent streams yet individually replayable.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t k) {
    Rng r(seed ^ (0xA0761D6478BD642FULL + 0x9E3779B97F4A7C15ULL * (k + 1)));
    return r.next();
}

}  // namespace ringpir
