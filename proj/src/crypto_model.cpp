#include "mpclab/crypto_model.hpp"

#include <cassert>

namespace mpclab {

namespace {

// Shared-core width: the prefix of public and secret key material that the
// stream cipher is derived from.
size_t core_width(const CostModel& cost) {
    uint64_t w = cost.pk_bits < cost.skey_bits ? cost.pk_bits : cost.skey_bits;
    return w < 64 ? size_t(w) : 64;
}

uint64_t core_of(const CostModel& cost, const BitString& key) {
    size_t w = core_width(cost);
    return key.size() >= w ? key.read_bits(0, w) : key.read_bits(0, key.size());
}

uint64_t keystream_word(uint64_t core, uint64_t block, uint64_t domain) {
    return mix64(core ^ mix64(block * 0x9e3779b97f4a7c15ull + domain));
}

// Expand `core` into a key string of `bits` bits: core prefix verbatim, then
// domain-separated filler.
BitString expand_key(uint64_t core, size_t bits, uint64_t domain) {
    BitString out;
    size_t w = bits < 64 ? bits : 64;
    out.append_bits(core, w);
    uint64_t block = 1;
    while (out.size() < bits) {
        size_t take = bits - out.size() < 64 ? bits - out.size() : 64;
        out.append_bits(keystream_word(core, block++, domain), take);
    }
    return out;
}

void xor_keystream(BitString& buf, uint64_t core, uint64_t domain) {
    for (size_t pos = 0; pos < buf.size(); pos += 64) {
        size_t take = buf.size() - pos < 64 ? buf.size() - pos : 64;
        uint64_t ks = keystream_word(core, pos / 64, domain);
        uint64_t cur = buf.read_bits(pos, take);
        uint64_t mixed = cur ^ (take < 64 ? (ks & ((uint64_t(1) << take) - 1)) : ks);
        for (size_t k = 0; k < take; ++k) buf.set_bit(pos + k, (mixed >> k) & 1);
    }
}

uint64_t check_tag(uint64_t core, const BitString& plain) {
    return mix64(core ^ (plain.hash64() * 0x2545f4914f6cdd1dull)) & 0xffff;
}

constexpr uint64_t kDomEnc = 0x656e63;   // stream/filler domain separators
constexpr uint64_t kDomPk = 0x706b;
constexpr uint64_t kDomSk = 0x736b;
constexpr uint64_t kDomVk = 0x766b;
constexpr uint64_t kDomSig = 0x736967;

BitString encrypt_core(const CostModel& cost, uint64_t core, const BitString& plain) {
    assert(plain.size() <= CostModel::kPlaintextCap);
    BitString buf;
    buf.append_bits(plain.size(), CostModel::kCtLenBits);
    buf.append_bits(check_tag(core, plain), CostModel::kCtCheckBits);
    buf.append(plain);
    uint64_t target = cost.ct_bits(plain.size());
    uint64_t pad_block = 1 << 20;  // padding blocks live past any real block index
    while (buf.size() < target) {
        size_t take = target - buf.size() < 64 ? size_t(target - buf.size()) : 64;
        buf.append_bits(keystream_word(core, pad_block++, kDomEnc), take);
    }
    xor_keystream(buf, core, kDomEnc);
    return buf;
}

std::optional<BitString> decrypt_core(const CostModel& cost, uint64_t core, const BitString& ct) {
    if (ct.size() < CostModel::kCtOverhead) return std::nullopt;
    BitString buf = ct;
    xor_keystream(buf, core, kDomEnc);
    uint64_t len = buf.read_bits(0, CostModel::kCtLenBits);
    if (len > CostModel::kPlaintextCap) return std::nullopt;
    if (CostModel::kCtOverhead + len > buf.size()) return std::nullopt;
    if (ct.size() != cost.ct_bits(len)) return std::nullopt;
    BitString plain = buf.slice(CostModel::kCtOverhead, len);
    uint64_t check = buf.read_bits(CostModel::kCtLenBits, CostModel::kCtCheckBits);
    if (check != check_tag(core, plain)) return std::nullopt;
    return plain;
}

}  // namespace

KeyPair pke_gen(const CostModel& cost, const BitString& r) {
    uint64_t core = mix64(r.hash64() ^ kDomEnc);
    KeyPair kp;
    kp.pk = expand_key(core, cost.pk_bits, kDomPk);
    kp.sk = expand_key(core, cost.skey_bits, kDomSk);
    return kp;
}

BitString pke_encrypt(const CostModel& cost, const BitString& pk, const BitString& plain) {
    return encrypt_core(cost, core_of(cost, pk), plain);
}

std::optional<BitString> pke_decrypt(const CostModel& cost, const BitString& sk,
                                     const BitString& ct) {
    return decrypt_core(cost, core_of(cost, sk), ct);
}

BitString ske_gen(const CostModel& cost, RandomStream& rng) {
    return rng.random_bits(cost.skey_bits);
}

BitString ske_encrypt(const CostModel& cost, const BitString& key, const BitString& plain) {
    return encrypt_core(cost, core_of(cost, key), plain);
}

std::optional<BitString> ske_decrypt(const CostModel& cost, const BitString& key,
                                     const BitString& ct) {
    return decrypt_core(cost, core_of(cost, key), ct);
}

SigKeyPair sig_gen(const CostModel& cost, const BitString& r) {
    uint64_t core = mix64(r.hash64() ^ kDomSig);
    SigKeyPair kp;
    kp.vk = expand_key(core, cost.pk_bits, kDomVk);
    kp.sk = expand_key(core, cost.skey_bits, kDomSk ^ kDomSig);
    return kp;
}

namespace {

uint64_t triple_hash(uint64_t core, const BitString& msg, const BitString& sig) {
    uint64_t h = mix64(core ^ 0x7461675f73696721ull);
    h = mix64(h ^ msg.hash64() ^ (uint64_t(msg.size()) << 32));
    h = mix64(h ^ sig.hash64() ^ sig.size());
    return h;
}

BitString tag_of(const CostModel& cost, uint64_t core, const BitString& msg) {
    BitString sig;
    uint64_t seed = mix64(core ^ msg.hash64() ^ (uint64_t(msg.size()) * 0x9e3779b97f4a7c15ull));
    uint64_t block = 0;
    while (sig.size() < cost.sig_bits) {
        size_t take = cost.sig_bits - sig.size() < 64 ? size_t(cost.sig_bits - sig.size()) : 64;
        sig.append_bits(keystream_word(seed, block++, kDomSig), take);
    }
    return sig;
}

}  // namespace

BitString SignatureRegistry::sign(const CostModel& cost, const BitString& sk,
                                  const BitString& msg) {
    uint64_t core = core_of(cost, sk);
    BitString sig = tag_of(cost, core, msg);
    valid_.insert(triple_hash(core, msg, sig));
    return sig;
}

bool SignatureRegistry::verify(const CostModel& cost, const BitString& vk, const BitString& msg,
                               const BitString& sig) const {
    uint64_t core = core_of(cost, vk);
    if (sig != tag_of(cost, core, msg)) return false;
    return valid_.count(triple_hash(core, msg, sig)) != 0;
}

}  // namespace mpclab
