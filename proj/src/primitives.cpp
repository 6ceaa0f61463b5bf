#include "mpclab/primitives.hpp"

#include <cmath>
#include <stdexcept>

namespace mpclab {

namespace {

// Uniform BigUint in [lo, hi] by top-masked rejection.
BigUint uniform_big(const BigUint& lo, const BigUint& hi, RandomStream& rng) {
    BigUint span = hi - lo + BigUint(1);
    size_t w = span.bitlen();
    size_t words = (w + 63) / 64;
    uint64_t topmask = (w % 64) ? ((uint64_t(1) << (w % 64)) - 1) : ~uint64_t(0);
    for (;;) {
        std::vector<uint64_t> limbs(words);
        for (size_t i = 0; i < words; ++i) limbs[i] = rng.next_u64();
        limbs[words - 1] &= topmask;
        BigUint cand = BigUint::from_limbs(std::move(limbs));
        if (cand < span) return lo + cand;
    }
}

}  // namespace

size_t fingerprint_field_bits(uint64_t base, uint32_t lambda) {
    if (base < 2 || lambda < 1) throw std::invalid_argument("fingerprint range needs base>=2, lambda>=1");
    BigUint n = BigUint::pow_u64(base, lambda);
    return (n - BigUint(1)).bitlen();
}

BigUint sample_prime(uint64_t base, uint32_t lambda, RandomStream& rng) {
    if (base < 2 || lambda < 1) throw std::invalid_argument("sample_prime needs base>=2, lambda>=1");
    BigUint hi = BigUint::pow_u64(base, lambda);
    BigUint lo(2);
    // Fast path when the whole range sits within one limb: same single draw per
    // candidate and same accept rule as uniform_big, so the stream of sampled
    // primes is unchanged, just without per-candidate heap traffic.
    BigUint span_big = hi - BigUint(1);  // hi - lo + 1
    if (span_big.fits_u64()) {
        uint64_t span = span_big.as_u64();
        size_t w = span_big.bitlen();
        uint64_t topmask = (w == 64) ? ~uint64_t(0) : ((uint64_t(1) << w) - 1);
        for (;;) {
            uint64_t cand = rng.next_u64() & topmask;
            if (cand >= span) continue;
            if (cand > ~uint64_t(0) - 2) continue;  // 2 + cand = 2^64: even, composite
            uint64_t v = cand + 2;
            if (is_prime_u64(v)) return BigUint(v);
        }
    }
    for (;;) {
        BigUint cand = uniform_big(lo, hi, rng);
        if (is_prime(cand)) return cand;
    }
}

EqualityResult equality_test(const BitString& m1, const BitString& m2, uint64_t base,
                             uint32_t lambda, RandomStream& rng) {
    EqualityResult r;
    r.prime = sample_prime(base, lambda, rng);
    BigUint v1 = mod_of_bits(m1, r.prime);
    BigUint v2 = mod_of_bits(m2, r.prime);
    r.equal = v1 == v2;
    r.bits_exchanged = equality_test_bits(base, lambda);
    return r;
}

BitString encode_equality_challenge(const BigUint& prime, const BigUint& residue, uint64_t base,
                                    uint32_t lambda) {
    size_t w = fingerprint_field_bits(base, lambda);
    BitString out = (prime - BigUint(2)).to_bits(w);
    out.append(residue.to_bits(w));
    return out;
}

EqualityChallenge decode_equality_challenge(const BitString& msg, uint64_t base, uint32_t lambda) {
    // No primality re-check on the responder side: a malformed modulus from a
    // corrupt challenger only degrades the challenger's own detection, and the
    // responder's reply stays a pure residue comparison either way.
    EqualityChallenge c;
    size_t w = fingerprint_field_bits(base, lambda);
    if (msg.size() != 2 * w) {
        c.valid = false;
        return c;
    }
    c.prime = BigUint::from_bits(msg.slice(0, w)) + BigUint(2);
    c.residue = BigUint::from_bits(msg.slice(w, w));
    c.valid = true;
    return c;
}

HittingSetEstimate hitting_set_estimate(uint32_t universe, uint32_t honest, double p,
                                        uint32_t trials, RandomStream& rng) {
    if (honest > universe || trials == 0) throw std::invalid_argument("bad hitting-set parameters");
    uint64_t hits = 0;
    double need = p * honest / 2.0;
    for (uint32_t t = 0; t < trials; ++t) {
        // Only the honest coordinates matter for |H intersect R|; the rest of
        // the universe is irrelevant to the count.
        uint32_t in_both = 0;
        for (uint32_t i = 0; i < honest; ++i) {
            if (rng.bernoulli(p)) ++in_both;
        }
        if (double(in_both) >= need) ++hits;
    }
    HittingSetEstimate e;
    e.trials = trials;
    e.rate = double(hits) / trials;
    wilson_interval(hits, trials, e.lo, e.hi);
    return e;
}

void wilson_interval(uint64_t successes, uint64_t trials, double& lo, double& hi) {
    if (trials == 0) {
        lo = 0.0;
        hi = 1.0;
        return;
    }
    double z = 1.959963984540054;
    double n = double(trials);
    double phat = double(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = phat + z2 / (2.0 * n);
    double margin = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    lo = (center - margin) / denom;
    hi = (center + margin) / denom;
    if (lo < 0.0) lo = 0.0;
    if (hi > 1.0) hi = 1.0;
}

}  // namespace mpclab
