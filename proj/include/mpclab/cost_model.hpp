#pragma once
// Size model for cryptographic objects. The schemes themselves are mocks; the
// only thing protocols consume from them at the wire level is how many bits
// each object occupies, which is what this table pins down.

#include <cstdint>

namespace mpclab {

struct CostModel {
    // Bits per modeled object. Each defaults to c * lambda * depth.
    uint64_t pk_bits = 64;
    uint64_t ct_bits_base = 64;
    uint64_t share_bits = 64;
    uint64_t proof_bits = 64;
    uint64_t sig_bits = 64;
    uint64_t skey_bits = 64;

    // Mock ciphertext layout overhead: an 11-bit plaintext length field plus a
    // 16-bit integrity check, all under the keystream.
    static constexpr uint64_t kCtLenBits = 11;
    static constexpr uint64_t kCtCheckBits = 16;
    static constexpr uint64_t kCtOverhead = kCtLenBits + kCtCheckBits;
    static constexpr uint64_t kPlaintextCap = 1024;

    static CostModel defaults(uint32_t lambda, uint32_t depth, uint32_t c = 1) {
        CostModel m;
        uint64_t b = uint64_t(c) * lambda * depth;
        if (b < 1) b = 1;
        m.pk_bits = m.ct_bits_base = m.share_bits = m.proof_bits = m.sig_bits = m.skey_bits = b;
        return m;
    }

    // Ciphertext size for a given plaintext size: padded up to the modeled
    // object size, growing only when the payload cannot fit.
    uint64_t ct_bits(uint64_t plain_bits) const {
        uint64_t need = kCtOverhead + plain_bits;
        return need > ct_bits_base ? need : ct_bits_base;
    }

    bool valid() const {
        return pk_bits >= 1 && ct_bits_base >= 1 && share_bits >= 1 && proof_bits >= 1 &&
               sig_bits >= 1 && skey_bits >= 1;
    }
};

}  // namespace mpclab
