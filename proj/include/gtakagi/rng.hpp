#pragma once

#include <gmpxx.h>

#include <cstdint>

namespace gtakagi {

// Counter-based generator in the splitmix64 family. A draw is a pure
// function of (seed, stream, counter), so per-sample streams can be handed
// to workers in any order and still reproduce bit-identically.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + kGamma) + stream)), ctr_(0) {}

    std::uint64_t next_u64() { return mix(key_ + (++ctr_) * kGamma); }

    // uniform in [0,1) with 53 random bits
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, 2^bits)
    mpz_class next_integer(long bits) {
        mpz_class acc(0);
        long produced = 0;
        while (produced < bits) {
            acc <<= 64;
            acc += mpz_class(static_cast<unsigned long>(next_u64()));
            produced += 64;
        }
        acc >>= (produced - bits);
        return acc;
    }

    // uniform dyadic rational in (0,1) with `bits` mantissa bits (odd
    // numerator, so the point is never 0 and never a shorter dyadic)
    mpq_class next_dyadic(long bits) {
        mpz_class n = next_integer(bits) | 1;
        mpz_class den(1);
        den <<= bits;
        mpq_class q(n, den);
        q.canonicalize();
        return q;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
};

} // namespace gtakagi
