#include "mpclab/idealfunc.hpp"

#include <stdexcept>

namespace mpclab {

BitString fit_width(const BitString& s, size_t bits) {
    if (s.size() == bits) return s;
    if (s.size() > bits) return s.slice(0, bits);
    BitString out = s;
    out.append(BitString(bits - s.size()));
    return out;
}

FunctionSpec make_function(const std::string& name, uint32_t in_bits, uint32_t out_bits,
                           uint32_t depth, bool multi_output) {
    FunctionSpec f;
    f.name = name;
    f.in_bits = in_bits;
    f.out_bits = out_bits;
    f.depth = depth;
    f.multi_output = multi_output;

    auto bitwise = [in_bits, out_bits, multi_output](bool is_and) {
        return [in_bits, out_bits, multi_output, is_and](const std::vector<BitString>& xs) {
            BitString acc(in_bits);
            bool first = true;
            for (const BitString& x : xs) {
                BitString v = fit_width(x, in_bits);
                if (first) {
                    acc = v;
                    first = false;
                    continue;
                }
                for (size_t b = 0; b < in_bits; ++b) {
                    bool l = acc.bit(b), r = v.bit(b);
                    acc.set_bit(b, is_and ? (l && r) : (l != r));
                }
            }
            BitString y = fit_width(acc, out_bits);
            if (!multi_output) return std::vector<BitString>{y};
            return std::vector<BitString>(xs.size(), y);
        };
    };

    if (name == "xor") {
        f.eval = bitwise(false);
    } else if (name == "and_tree") {
        f.eval = bitwise(true);
    } else if (name == "const0") {
        f.eval = [out_bits, multi_output](const std::vector<BitString>& xs) {
            if (!multi_output) return std::vector<BitString>{BitString(out_bits)};
            return std::vector<BitString>(xs.size(), BitString(out_bits));
        };
    } else if (name == "identity") {
        f.eval = [out_bits, multi_output](const std::vector<BitString>& xs) {
            if (!multi_output) {
                return std::vector<BitString>{fit_width(xs.empty() ? BitString() : xs[0], out_bits)};
            }
            std::vector<BitString> ys;
            ys.reserve(xs.size());
            for (const BitString& x : xs) ys.push_back(fit_width(x, out_bits));
            return ys;
        };
    } else if (name == "rotate") {
        if (!multi_output) throw std::invalid_argument("rotate is multi-output only");
        f.eval = [out_bits](const std::vector<BitString>& xs) {
            std::vector<BitString> ys(xs.size());
            for (size_t i = 0; i < xs.size(); ++i) ys[i] = fit_width(xs[(i + 1) % xs.size()], out_bits);
            return ys;
        };
    } else {
        throw std::invalid_argument("unknown function: " + name);
    }
    return f;
}

std::vector<std::string> function_names() { return {"xor", "and_tree", "const0", "identity", "rotate"}; }

uint64_t sb_poly_in(const CostModel& cost, uint64_t ell_in_bits) {
    return cost.pk_bits + cost.ct_bits_base * ell_in_bits + cost.proof_bits;
}

uint64_t sb_broadcast_bits(uint32_t c_live, uint64_t ell_in_bits, uint32_t lambda,
                           const CostModel& cost, uint32_t c_sb) {
    if (c_live < 2) return 0;
    uint64_t c = c_live;
    uint64_t blob = sb_poly_in(cost, ell_in_bits);
    // Equality tests run over the concatenation of |C| length-prefixed blobs,
    // so the fingerprint domain scales with |C|*(16+blob).
    uint64_t domain = c * (16 + blob);
    if (domain < 2) domain = 2;
    uint64_t eq = equality_test_bits(domain, lambda);
    return c_sb * (c * (c - 1) * blob + (c * (c - 1) / 2) * eq);
}

uint64_t oracle_output_bits(uint64_t ell_out_bits, uint32_t c_live, const CostModel& cost) {
    return ell_out_bits * uint64_t(c_live) * (cost.share_bits + cost.proof_bits);
}

std::vector<PartyId> IdealOracle::live_of(const std::vector<PartyId>& participants) const {
    std::vector<PartyId> live;
    for (PartyId p : participants)
        if (sim_.is_live(p)) live.push_back(p);
    return live;
}

void IdealOracle::charge_pairs(const std::vector<PartyId>& live, uint64_t bits) {
    if (live.size() < 2 || bits == 0) return;
    uint64_t pairs = uint64_t(live.size()) * (live.size() - 1);
    uint64_t each = bits / pairs;
    uint64_t rem = bits % pairs;
    uint64_t k = 0;
    for (PartyId a : live) {
        for (PartyId b : live) {
            if (a == b) continue;
            uint64_t amount = each + (k < rem ? 1 : 0);
            if (amount) sim_.charge_virtual(a, b, amount);
            ++k;
        }
    }
}

IdealOracle::GenResult IdealOracle::f_gen(const std::vector<PartyId>& participants,
                                          uint32_t lambda, bool sig_kind, const char* label) {
    GenResult res;
    std::vector<PartyId> live = live_of(participants);
    if (live.empty()) return res;

    // XOR of per-participant randomness; one honest uniform contribution makes
    // the combined string uniform.
    BitString r(lambda);
    for (PartyId p : live) {
        BitString ri = sim_.party_rng(p).random_bits(lambda);
        for (uint32_t b = 0; b < lambda; ++b) {
            if (ri.bit(b)) r.flip_bit(b);
        }
    }

    Secret sec;
    sec.sig_kind = sig_kind;
    if (sig_kind) {
        SigKeyPair kp = sig_gen(cost_, r);
        sec.pk = kp.vk;
        sec.sk = kp.sk;
    } else {
        KeyPair kp = pke_gen(cost_, r);
        sec.pk = kp.pk;
        sec.sk = kp.sk;
    }
    res.handle = int(secrets_.size());
    secrets_.push_back(sec);
    res.pk = sec.pk;

    res.charged = sb_broadcast_bits(uint32_t(live.size()), lambda, sim_.config().lambda, cost_);
    charge_pairs(live, res.charged);

    // Corrupted participants learned pk above; now the adversary may cut
    // honest ones off.
    sim_.oracle_denials(label, participants);
    return res;
}

IdealOracle::CompResult IdealOracle::f_comp(int gen_handle,
                                            const std::vector<PartyId>& participants,
                                            const std::vector<BitString>& slot_cts,
                                            const FunctionSpec& f, const char* label) {
    CompResult res;
    // A dead setup (no live participant at F_Gen time) hands back handle -1;
    // evaluate on defaults so an already-doomed run can wind down normally.
    if (gen_handle < 0 || size_t(gen_handle) >= secrets_.size()) {
        res.effective_inputs.assign(slot_cts.size(), BitString(f.in_bits));
        auto ys0 = f.eval(res.effective_inputs);
        res.y = fit_width(ys0.empty() ? BitString() : ys0[0], f.out_bits);
        res.receivers = live_of(participants);
        return res;
    }
    const Secret& sec = secrets_.at(gen_handle);
    assert(!sec.sig_kind);

    res.effective_inputs.reserve(slot_cts.size());
    for (const BitString& ct : slot_cts) {
        auto plain = ct.empty() ? std::nullopt : pke_decrypt(cost_, sec.sk, ct);
        res.effective_inputs.push_back(plain ? fit_width(*plain, f.in_bits)
                                             : BitString(f.in_bits));
    }
    auto ys = f.eval(res.effective_inputs);
    res.y = fit_width(ys.empty() ? BitString() : ys[0], f.out_bits);

    std::vector<PartyId> live = live_of(participants);
    res.charged = oracle_output_bits(f.out_bits, uint32_t(live.size()), cost_);
    charge_pairs(live, res.charged);

    sim_.oracle_denials(label, participants);
    res.receivers = live_of(participants);
    return res;
}

IdealOracle::CompSignResult IdealOracle::f_comp_sign(int enc_handle, int sig_handle,
                                                     const std::vector<PartyId>& participants,
                                                     const std::vector<BitString>& slot_cts,
                                                     const std::vector<BitString>& key_cts,
                                                     const FunctionSpec& f, const char* label) {
    CompSignResult res;
    // Same dead-setup tolerance as f_comp: no live participants at F_Gen time
    // means no keys exist, so hand back empty pairs and let callers time out.
    if (enc_handle < 0 || size_t(enc_handle) >= secrets_.size() || sig_handle < 0 ||
        size_t(sig_handle) >= secrets_.size()) {
        res.effective_inputs.assign(slot_cts.size(), BitString(f.in_bits));
        res.out.resize(slot_cts.size());
        return res;
    }
    const Secret& enc_sec = secrets_.at(enc_handle);
    const Secret& sig_sec = secrets_.at(sig_handle);
    assert(!enc_sec.sig_kind && sig_sec.sig_kind);
    res.sig_vk = sig_sec.pk;

    // Inputs and symmetric keys arrive as separate ciphertext lists; a slot
    // with a bad entry falls back to all-zero (the key fallback shows up later
    // as the receiver's DecryptFail).
    std::vector<BitString> keys(slot_cts.size());
    res.effective_inputs.reserve(slot_cts.size());
    for (size_t i = 0; i < slot_cts.size(); ++i) {
        auto plain = slot_cts[i].empty() ? std::nullopt : pke_decrypt(cost_, enc_sec.sk, slot_cts[i]);
        res.effective_inputs.push_back(plain ? fit_width(*plain, f.in_bits)
                                             : BitString(f.in_bits));
        auto key = i < key_cts.size() && !key_cts[i].empty()
                       ? pke_decrypt(cost_, enc_sec.sk, key_cts[i])
                       : std::nullopt;
        keys[i] = key ? fit_width(*key, cost_.skey_bits) : BitString(cost_.skey_bits);
    }

    auto ys = f.eval(res.effective_inputs);
    res.out.resize(slot_cts.size());
    for (size_t i = 0; i < slot_cts.size(); ++i) {
        BitString y = fit_width(i < ys.size() ? ys[i] : BitString(), f.out_bits);
        BitString ct = ske_encrypt(cost_, keys[i], y);
        BitWriter signed_msg;
        signed_msg.u(i, 16);  // bind the slot index: swapped pairs must not verify
        signed_msg.str(ct);
        BitString sigma = registry_.sign(cost_, sig_sec.sk, signed_msg.take());
        res.out[i] = {std::move(ct), std::move(sigma)};
    }

    std::vector<PartyId> live = live_of(participants);
    res.charged = oracle_output_bits(uint64_t(f.out_bits) * slot_cts.size(),
                                     uint32_t(live.size()), cost_);
    charge_pairs(live, res.charged);

    sim_.oracle_denials(label, participants);
    for (PartyId p : participants) {
        if (sim_.is_live(p)) {
            res.designated = p;
            res.have_designated = true;
            break;
        }
    }
    return res;
}

}  // namespace mpclab
