#pragma once
// Small arbitrary-precision unsigned integer. Fingerprint primes live in
// [2, n^lambda], which clears 64 bits once lambda*log2(n) does, so a couple of
// limbs is the realistic ceiling. Schoolbook everything.

#include <cstdint>
#include <string>
#include <vector>

#include "mpclab/bits.hpp"

namespace mpclab {

class BigUint {
public:
    BigUint() = default;
    BigUint(uint64_t v) {
        if (v) limbs_.push_back(v);
    }

    // MSB-first bit string as an integer; empty string is 0.
    static BigUint from_bits(const BitString& s);

    // Little-endian 64-bit limbs.
    static BigUint from_limbs(std::vector<uint64_t> limbs) {
        BigUint r;
        r.limbs_ = std::move(limbs);
        r.trim();
        return r;
    }

    static BigUint pow_u64(uint64_t base, uint32_t exp);

    bool is_zero() const { return limbs_.empty(); }
    bool fits_u64() const { return limbs_.size() <= 1; }
    uint64_t as_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

    size_t bitlen() const;

    int cmp(const BigUint& o) const;
    bool operator==(const BigUint& o) const { return cmp(o) == 0; }
    bool operator!=(const BigUint& o) const { return cmp(o) != 0; }
    bool operator<(const BigUint& o) const { return cmp(o) < 0; }
    bool operator<=(const BigUint& o) const { return cmp(o) <= 0; }
    bool operator>(const BigUint& o) const { return cmp(o) > 0; }
    bool operator>=(const BigUint& o) const { return cmp(o) >= 0; }

    BigUint operator+(const BigUint& o) const;
    BigUint operator-(const BigUint& o) const;  // requires *this >= o
    BigUint operator*(const BigUint& o) const;
    BigUint operator%(const BigUint& o) const;
    BigUint operator/(const BigUint& o) const;
    BigUint operator>>(unsigned k) const;

    bool bit(size_t i) const;
    bool is_even() const { return limbs_.empty() || (limbs_[0] & 1) == 0; }

    uint64_t mod_u64(uint64_t m) const;

    // (a * b) mod m, all values < m.
    static BigUint mulmod(const BigUint& a, const BigUint& b, const BigUint& m);
    // (base ^ exp) mod m.
    static BigUint powmod(const BigUint& base, const BigUint& exp, const BigUint& m);

    // MSB-first bits, exactly `nbits` wide (value must fit).
    BitString to_bits(size_t nbits) const;

    std::string to_string() const;  // decimal, for diagnostics

    const std::vector<uint64_t>& limbs() const { return limbs_; }

private:
    void trim();
    static void divmod(const BigUint& num, const BigUint& den, BigUint& q, BigUint& r);

    // Little-endian limbs, no trailing zero limb.
    std::vector<uint64_t> limbs_;
};

// Deterministic primality. Exact for all inputs: trial division under 2^20,
// a fixed Miller-Rabin base set (exact below 3.3e24) above it, and 64
// candidate-derived rounds beyond that range.
bool is_prime(const BigUint& n);
bool is_prime_u64(uint64_t n);

// Reduce an MSB-first bit string modulo m (chunked Horner).
BigUint mod_of_bits(const BitString& s, const BigUint& m);

}  // namespace mpclab
