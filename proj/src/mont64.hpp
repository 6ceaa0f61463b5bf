#pragma once

#include <cstdint>

namespace mpclab::detail {

using u128_t = unsigned __int128;

// Montgomery arithmetic mod an odd u64. A generic u128 % u64 lowers to a
// library call on the targets we build for; REDC replaces it with three
// multiplies, which matters because prime sampling and fingerprint reduction
// sit on the simulator's hottest path.
struct Mont64 {
    uint64_t n;     // odd modulus
    uint64_t ninv;  // -n^-1 mod 2^64
    uint64_t r2;    // 2^128 mod n

    explicit Mont64(uint64_t mod) : n(mod) {
        uint64_t inv = mod;  // Newton: doubles correct low bits, 5 rounds cover 64
        for (int i = 0; i < 5; ++i) inv *= 2 - mod * inv;
        ninv = ~inv + 1;
        uint64_t r = (~uint64_t(0) % mod) + 1;  // 2^64 mod n
        r2 = uint64_t((u128_t)r * r % mod);
    }

    // (t + m*n) >> 64 with m chosen so the low limb cancels; result < 2n, so
    // one conditional subtract normalizes.
    uint64_t redc(u128_t t) const {
        uint64_t m = uint64_t(t) * ninv;
        u128_t mn = (u128_t)m * n;
        u128_t hi = (t >> 64) + (mn >> 64) + (uint64_t(t) != 0);
        return hi >= n ? uint64_t(hi - n) : uint64_t(hi);
    }

    // a*b * 2^-64 mod n for a, b < n (Montgomery-form product).
    uint64_t mul(uint64_t a, uint64_t b) const { return redc((u128_t)a * b); }

    // a * 2^64 mod n for a < n: into Montgomery form, or one Horner shift.
    uint64_t shift_up(uint64_t a) const { return redc((u128_t)a * r2); }
};

}  // namespace mpclab::detail
