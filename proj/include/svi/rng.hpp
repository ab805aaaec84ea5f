#pragma once

#include <cstdint>

namespace svi {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen because the whole generator is
// a dozen lines of integer arithmetic, so identical seeds give identical
// streams on every platform and toolchain. All randomness in the library and
// CLI flows through this type; nothing uses <random> distributions.
struct Rng {
    std::uint64_t state = 0x9e3779b97f4a7c15ull;

    explicit Rng(std::uint64_t seed = 1) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53 significant bits
    double nextDouble() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo,hi)
    double nextIn(double lo, double hi) { return lo + (hi - lo) * nextDouble(); }

    // unbiased integer in [0,bound) via masked rejection
    std::uint64_t nextBelow(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t mask = ~0ull;
        std::uint64_t limit = bound - 1;
        int shift = 0;
        while (limit >> shift) ++shift;
        mask = (shift >= 64) ? ~0ull : ((1ull << shift) - 1);
        std::uint64_t v;
        do { v = next() & mask; } while (v >= bound);
        return v;
    }

    bool nextBool() { return (next() & 1) != 0; }

    // independent stream derived from this seed; used to decorrelate phases
    Rng fork(std::uint64_t streamId) const {
        Rng r(state ^ (0xd1342543de82ef95ull * (streamId + 1)));
        r.next();
        return r;
    }
};

} // namespace svi
