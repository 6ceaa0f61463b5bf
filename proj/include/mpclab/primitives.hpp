#pragma once
// Sublinear building blocks: prime-fingerprint equality testing and the
// hitting-set estimate behind committee election sizing.

#include <cstdint>

#include "mpclab/bigint.hpp"
#include "mpclab/bits.hpp"
#include "mpclab/rng.hpp"

namespace mpclab {

// Uniform prime in [2, base^lambda], by rejection sampling over the range and
// deterministic primality testing. base >= 2, lambda >= 1.
BigUint sample_prime(uint64_t base, uint32_t lambda, RandomStream& rng);

// Wire width of one equality-test field. Both p-2 and any residue fit in
// bitlen(base^lambda - 1) bits, which never exceeds ceil(lambda*log2(base)).
size_t fingerprint_field_bits(uint64_t base, uint32_t lambda);

// Total bits exchanged by one equality test: two fixed-width fields plus the
// one-bit verdict.
inline size_t equality_test_bits(uint64_t base, uint32_t lambda) {
    return 2 * fingerprint_field_bits(base, lambda) + 1;
}

struct EqualityResult {
    bool equal;             // verdict the responder reports
    size_t bits_exchanged;  // |encode(p)| + |encode(residue)| + 1
    BigUint prime;
};

// One prime-fingerprint equality test between two bit strings of any length.
// The initiating side samples the prime from rng; both sides must agree on
// (base, lambda). False positives happen only when the prime divides the
// integer difference of the inputs.
EqualityResult equality_test(const BitString& m1, const BitString& m2, uint64_t base,
                             uint32_t lambda, RandomStream& rng);

// Wire encoding used by protocols: the initiator's message carries p-2 and
// its residue, each in fingerprint_field_bits; the 1-bit reply closes it.
BitString encode_equality_challenge(const BigUint& prime, const BigUint& residue, uint64_t base,
                                    uint32_t lambda);
struct EqualityChallenge {
    BigUint prime;
    BigUint residue;
    bool valid;
};
EqualityChallenge decode_equality_challenge(const BitString& msg, uint64_t base, uint32_t lambda);

// Fraction of `trials` random p-Bernoulli subsets R of a universe containing a
// designated honest set H with |H intersect R| >= p*|H|/2, plus a Wilson
// score interval on that fraction.
struct HittingSetEstimate {
    double rate;
    double lo;
    double hi;
    uint32_t trials;
};
HittingSetEstimate hitting_set_estimate(uint32_t universe, uint32_t honest, double p,
                                        uint32_t trials, RandomStream& rng);

// Wilson score interval for `successes` out of `trials` at ~95% (z = 1.96).
void wilson_interval(uint64_t successes, uint64_t trials, double& lo, double& hi);

}  // namespace mpclab
