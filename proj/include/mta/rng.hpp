#ifndef MTA_RNG_HPP
#define MTA_RNG_HPP

#include <cstdint>

namespace mta {

// xoshiro256** seeded through splitmix64. Self-contained so that seeded runs
// are byte-identical across standard libraries and compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, bound) by rejection; bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (~0ULL / bound);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

    // Uniform in [lo, hi] inclusive.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

    // Uniform signed integer in [lo, hi] inclusive.
    long int_range(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Derives an independent stream; used where per-item determinism must not
    // depend on processing order.
    Rng fork(std::uint64_t stream) const {
        Rng r(0);
        r.s_[0] = s_[0] ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        r.s_[1] = s_[1] + 0xbf58476d1ce4e5b9ULL * (stream + 1);
        r.s_[2] = s_[2] ^ (0x94d049bb133111ebULL * (stream + 1));
        r.s_[3] = s_[3] + (stream + 1);
        r.next();
        r.next();
        return r;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

} // namespace mta

#endif
