#pragma once
// Counter-based randomness. Every stream is (root seed, stream id, counter)
// pushed through a SplitMix-style mixer, so streams never share state: adding
// parties or reordering draws in one stream cannot perturb another. That is
// what makes twin runs and cross-run comparisons line up bit for bit.

#include <cstdint>
#include <vector>

#include "mpclab/bits.hpp"

namespace mpclab {

uint64_t mix64(uint64_t x);

class RandomStream {
public:
    RandomStream() : RandomStream(0, 0) {}
    RandomStream(uint64_t root_seed, uint64_t stream_id)
        : key_(mix64(root_seed ^ mix64(stream_id * 0x9e3779b97f4a7c15ull + 1))) {}

    uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    bool next_bit() { return next_u64() >> 63; }

    // Bernoulli(p). p >= 1 is always true, p <= 0 always false.
    bool bernoulli(double p) {
        if (p >= 1.0) return true;
        if (p <= 0.0) return false;
        // Threshold comparison at 53-bit precision, deterministic across
        // platforms for any given double p.
        return (next_u64() >> 11) < uint64_t(p * 9007199254740992.0);  // 2^53
    }

    // Uniform in [0, bound), unbiased via masked rejection. bound >= 1.
    uint64_t uniform(uint64_t bound) {
        if (bound <= 1) return 0;
        int w = bit_width_u64(bound - 1);
        uint64_t mask = w == 64 ? ~uint64_t(0) : (uint64_t(1) << w) - 1;
        for (;;) {
            uint64_t v = next_u64() & mask;
            if (v < bound) return v;
        }
    }

    // Uniform k-subset of {0..n-1} \ {self} (pass self = n to not exclude
    // anything). Returned sorted ascending.
    std::vector<uint32_t> sample_subset(uint32_t n, uint32_t k, uint32_t self);

    BitString random_bits(size_t nbits) {
        BitString s;
        size_t left = nbits;
        while (left > 0) {
            size_t take = left < 64 ? left : 64;
            s.append_bits(next_u64(), take);
            left -= take;
        }
        return s;
    }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

// Stream id layout for a simulation with n parties: party i gets stream i,
// the adversary stream and environment stream sit above any party id.
inline uint64_t adversary_stream_id(uint32_t n) { return uint64_t(n) + 0x10000000u; }
inline uint64_t environment_stream_id(uint32_t n) { return uint64_t(n) + 0x20000000u; }

}  // namespace mpclab
