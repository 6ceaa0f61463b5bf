#pragma once
// Size-faithful mock cryptography. Nothing here is secure and nothing needs to
// be: protocols only depend on object sizes, round-trip correctness, and the
// abort behavior of mismatched keys or tampered bits. Encryption is plaintext
// XOR a key-derived stream under a small integrity check; signatures are keyed
// tags tracked by a per-simulation registry, which makes them exactly
// unforgeable within the model.

#include <cstdint>
#include <optional>
#include <unordered_set>

#include "mpclab/bits.hpp"
#include "mpclab/cost_model.hpp"
#include "mpclab/rng.hpp"

namespace mpclab {

struct KeyPair {
    BitString pk;  // public half, B_pk bits
    BitString sk;  // secret half, B_skey bits
};

// Deterministic in r (any nonempty bit string). Both halves share a common
// core so that encrypt-under-pk / decrypt-under-sk line up.
KeyPair pke_gen(const CostModel& cost, const BitString& r);

// Ciphertext layout under the keystream: [len:11][check:16][plaintext][pad],
// total cost.ct_bits(|plain|). |plain| <= kPlaintextCap.
BitString pke_encrypt(const CostModel& cost, const BitString& pk, const BitString& plain);

// nullopt on any integrity failure (wrong key, tampered header/payload bits).
// Flips confined to the padding region are undetectable here by design; the
// padding carries no information.
std::optional<BitString> pke_decrypt(const CostModel& cost, const BitString& sk,
                                     const BitString& ct);

// Symmetric scheme: same wire layout, key is the B_skey-bit string itself.
BitString ske_gen(const CostModel& cost, RandomStream& rng);
BitString ske_encrypt(const CostModel& cost, const BitString& key, const BitString& plain);
std::optional<BitString> ske_decrypt(const CostModel& cost, const BitString& key,
                                     const BitString& ct);

struct SigKeyPair {
    BitString vk;  // B_pk bits
    BitString sk;  // B_skey bits
};

SigKeyPair sig_gen(const CostModel& cost, const BitString& r);

// Keyed-tag signatures. verify accepts only (vk, msg, sig) triples whose exact
// bits were produced by a sign() call on this registry: recomputing the tag
// alone is not enough, the registry lookup must hit too.
class SignatureRegistry {
  public:
    BitString sign(const CostModel& cost, const BitString& sk, const BitString& msg);
    bool verify(const CostModel& cost, const BitString& vk, const BitString& msg,
                const BitString& sig) const;
    size_t issued() const { return valid_.size(); }

  private:
    std::unordered_set<uint64_t> valid_;
};

}  // namespace mpclab
