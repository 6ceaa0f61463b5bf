#include "mpclab/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpclab/broadcast.hpp"
#include "mpclab/committee.hpp"
#include "mpclab/crypto_model.hpp"
#include "mpclab/phases.hpp"
#include "mpclab/routing.hpp"

namespace mpclab {
namespace {

// Tag allocation. The building blocks own 1..5 (broadcast), 10..13 (election)
// and 40..41 (routing); the layers above them use the 20s.
constexpr Tag kTagElect = 10;
constexpr Tag kTagPk = 20;
constexpr Tag kTagCt = 21;
constexpr Tag kTagEqChallenge = 22;
constexpr Tag kTagEqVerdict = 23;
constexpr Tag kTagEqFlag = 24;
constexpr Tag kTagOut = 25;
constexpr Tag kTagXlist = 26;
constexpr Tag kTagPair = 27;
constexpr Tag kTagNotify = 40;
constexpr Tag kTagRumor = 41;
constexpr Tag kTagStrawValue = 45;

// What "consistent" means for a protocol's outputs.
enum class Family {
    None,         // outputs legitimately differ (sparse_network neighborhoods)
    Agreement,    // live honest outputs must all match
    Electees,     // agreement among outputs that carry an electee view
    SenderValue,  // agreement, and an honest sender's value must win
    Function,     // every live honest output equals f(effective inputs)
    PerParty,     // live honest i's output equals slot i of f(effective inputs)
    Strawman,     // checked like SenderValue; expected to fail under attack
};

struct DriveOut {
    Family family = Family::Agreement;
    uint32_t committee_size = 0;
    bool degraded = false;
    std::vector<BitString> effective_inputs;
};

uint32_t index_width(uint32_t n) { return uint32_t(std::max(1, ceil_log2(n))); }

bool contains(const std::vector<PartyId>& sorted, PartyId x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

// Pairwise fingerprint comparison of a per-member value among mutually
// recognized electees (lower index challenges, flags go to the local view).
void committee_value_eq(Sim& sim, const ElectionResult& er, const std::vector<BitString>& value,
                        const std::string& prefix) {
    EqPhaseSpec eq;
    eq.step_prefix = prefix;
    eq.challenge_tag = kTagEqChallenge;
    eq.verdict_tag = kTagEqVerdict;
    eq.flag_tag = kTagEqFlag;
    eq.challenge_targets = [&er](PartyId i) {
        std::vector<PartyId> t;
        if (er.elected[i])
            for (PartyId j : er.view[i])
                if (j > i) t.push_back(j);
        return t;
    };
    eq.respond_pred = [&er](PartyId r, PartyId c) {
        return er.elected[r] != 0 && std::binary_search(er.view[r].begin(), er.view[r].end(), c);
    };
    eq.value_of = [&value](PartyId i) -> const BitString& { return value[i]; };
    eq.flag_targets = [&er](PartyId i) { return er.view[i]; };
    run_equality_phase(sim, eq);
}

void emit_election_outputs(Sim& sim, const ElectionResult& er) {
    sim.run_round("elect.out", [&](PartyCtx& ctx) {
        BitWriter w;
        w.u(er.elected[ctx.id()] ? 1 : 0, 1);
        if (er.elected[ctx.id()]) w.str(er.view_ser[ctx.id()]);
        ctx.set_output(w.take());
    });
}

DriveOut drive_single_source(Sim& sim, const ProtocolParams& params) {
    run_single_source_broadcast(sim, params.sender, params.message);
    DriveOut d;
    d.family = Family::SenderValue;
    return d;
}

DriveOut drive_a2a(Sim& sim, const std::vector<BitString>& inputs) {
    run_all_to_all_broadcast(sim, inputs);
    DriveOut d;
    d.family = Family::Agreement;
    return d;
}

DriveOut drive_gl(Sim& sim, const std::vector<BitString>& inputs) {
    run_all_to_all_gl(sim, inputs);
    DriveOut d;
    d.family = Family::Agreement;
    return d;
}

DriveOut drive_committee_elect(Sim& sim, const RunConfig& cfg) {
    ElectionResult er = run_committee_elect(sim, cfg.alpha, kTagElect);
    emit_election_outputs(sim, er);
    DriveOut d;
    d.family = Family::Electees;
    d.committee_size = uint32_t(er.committee.size());
    d.degraded = er.clipped;
    return d;
}

DriveOut drive_local_elect(Sim& sim, const RunConfig& cfg) {
    RoutingGraph g = run_sparse_network(sim, cfg.alpha, kTagNotify);
    ElectionResult er = run_local_committee_elect(sim, cfg.alpha, g, kTagElect);
    emit_election_outputs(sim, er);
    DriveOut d;
    d.family = Family::Electees;
    d.committee_size = uint32_t(er.committee.size());
    d.degraded = er.clipped;
    return d;
}

DriveOut drive_sparse(Sim& sim, const RunConfig& cfg) {
    RoutingGraph g = run_sparse_network(sim, cfg.alpha, kTagNotify);
    const uint32_t wi = index_width(sim.n());
    sim.run_round("net.out", [&](PartyCtx& ctx) {
        BitWriter w;
        const auto& nb = g.nbrs[ctx.id()];
        w.u(uint32_t(nb.size()), 16);
        for (PartyId j : nb) w.u(j, wi);
        ctx.set_output(w.take());
    });
    DriveOut d;
    d.family = Family::None;
    return d;
}

DriveOut drive_gossip(Sim& sim, const RunConfig& cfg, const std::vector<BitString>& inputs) {
    const uint32_t n = sim.n();
    RoutingGraph g = run_sparse_network(sim, cfg.alpha, kTagNotify);
    GossipSpec gs;
    gs.rumor_tag = kTagRumor;
    gs.graph = &g;
    uint32_t vb = 0;
    for (const auto& x : inputs) vb = std::max(vb, uint32_t(x.size()));
    gs.value_bits = vb;
    gs.inputs.assign(n, std::nullopt);
    // A party with an empty input starts no rumor of its own (it still
    // forwards everyone else's).
    for (PartyId i = 0; i < n; ++i)
        if (!inputs[i].empty()) gs.inputs[i] = inputs[i];
    GossipResult gr = run_gossip(sim, gs);

    const uint32_t wi = index_width(n);
    sim.run_round("gossip.out", [&](PartyCtx& ctx) {
        BitWriter w;
        const auto& heard = gr.heard[ctx.id()];
        w.u(uint32_t(heard.size()), 16);
        for (const auto& [origin, value] : heard) {
            w.u(origin, wi);
            w.lp(value);
        }
        ctx.set_output(w.take());
    });
    DriveOut d;
    d.family = Family::Agreement;
    return d;
}

// The no-defenses baseline: flood the sender's value over sampled
// neighborhoods, keep the first copy heard, never check anything, output a
// zero default instead of aborting.
DriveOut drive_strawman(Sim& sim, const ProtocolParams& params) {
    const uint32_t n = sim.n();
    const uint32_t mb = uint32_t(params.message.size());
    const uint32_t want = std::min(n - 1, params.d_target);
    sim.register_tag(kTagNotify, "straw.notify", BudgetRule{1, 1});
    sim.register_tag(kTagStrawValue, "straw.value", BudgetRule{mb, 0});

    std::vector<std::vector<PartyId>> nbrs(n);
    sim.run_round("straw.notify", [&](PartyCtx& ctx) {
        for (PartyId r : ctx.rng().sample_subset(n, want, ctx.id())) {
            nbrs[ctx.id()].push_back(r);
            ctx.send(r, kTagNotify, BitString::from_u64(1, 1));
        }
    });
    sim.run_round("straw.tally", [&](PartyCtx& ctx) {
        auto& v = nbrs[ctx.id()];
        for (const auto& m : ctx.inbox())
            if (m.tag == kTagNotify) v.push_back(m.sender);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    });

    std::vector<uint8_t> have(n, 0), forwarded(n, 0);
    std::vector<BitString> val(n);
    have[params.sender] = 1;
    val[params.sender] = params.message;

    bool sent_any = true;
    for (uint32_t r = 0; sent_any && r < n; ++r) {
        sent_any = false;
        sim.run_round("straw.forward", [&](PartyCtx& ctx) {
            PartyId me = ctx.id();
            for (const auto& m : ctx.inbox()) {
                if (m.tag != kTagStrawValue || have[me]) continue;
                have[me] = 1;  // first copy wins, nothing is verified
                val[me] = m.payload;
            }
            if (have[me] && !forwarded[me]) {
                forwarded[me] = 1;
                for (PartyId to : nbrs[me]) ctx.send(to, kTagStrawValue, val[me]);
                sent_any = true;
            }
        });
    }
    sim.run_round("straw.decide", [&](PartyCtx& ctx) {
        ctx.set_output(have[ctx.id()] ? val[ctx.id()] : BitString(mb));
    });
    DriveOut d;
    d.family = Family::Strawman;
    return d;
}

// Shared by the committee MPC drivers: distribute the oracle's public
// material from claimed members to `targets_of(member)`, then have every
// party cross-check the copies it received and encrypt its input to the
// senders. Returns per-party pk-sender lists via out parameters.
struct PkRound {
    std::vector<std::vector<PartyId>> senders;  // who sent me a key copy
    std::vector<BitString> accepted;            // the copy each party accepted
};

DriveOut drive_mpc_committee(Sim& sim, const RunConfig& cfg, const ProtocolParams& params,
                             const std::vector<BitString>& inputs) {
    const uint32_t n = sim.n();
    const uint32_t wi = index_width(n);
    const FunctionSpec& f = params.f;
    SignatureRegistry registry;
    IdealOracle oracle(sim, cfg.cost, registry);

    ElectionResult er = run_committee_elect(sim, cfg.alpha, kTagElect);
    DriveOut d;
    d.family = Family::Function;
    d.committee_size = uint32_t(er.committee.size());
    d.degraded = er.clipped;

    auto gen = oracle.f_gen(er.committee, cfg.lambda, false, "mpc.gen");
    auto acts_member = [&](PartyId i) { return er.elected[i] != 0 && contains(er.committee, i); };

    const uint64_t pkb = cfg.cost.pk_bits;
    sim.register_tag(kTagPk, "mpc.pk", BudgetRule{pkb, pkb});
    sim.run_round("mpc.pk_forward", [&](PartyCtx& ctx) {
        if (!acts_member(ctx.id())) return;
        for (PartyId r = 0; r < n; ++r)
            if (r != ctx.id()) ctx.send(r, kTagPk, gen.pk);
    });

    const uint64_t ctb = cfg.cost.ct_bits(f.in_bits);
    sim.register_tag(kTagCt, "mpc.ct", BudgetRule{ctb, ctb});
    std::vector<BitString> own_ct(n);
    sim.run_round("mpc.ct_send", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        BitString pk;
        bool have = false;
        if (acts_member(me)) {
            pk = gen.pk;
            have = true;
        }
        std::vector<PartyId> senders;
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagPk) continue;
            if (!have) {
                pk = m.payload;
                have = true;
            } else if (m.payload != pk) {
                ctx.abort(AbortReason::PkMismatch);
                return;
            }
            senders.push_back(m.sender);
        }
        if (!have) {
            ctx.abort(AbortReason::Timeout);
            return;
        }
        std::sort(senders.begin(), senders.end());
        senders.erase(std::unique(senders.begin(), senders.end()), senders.end());
        own_ct[me] = pke_encrypt(cfg.cost, pk, fit_width(inputs[me], f.in_bits));
        for (PartyId c : senders) ctx.send(c, kTagCt, own_ct[me]);
    });

    std::vector<std::vector<BitString>> slots(n);
    std::vector<BitString> mc(n);
    sim.run_round("mpc.collect", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        if (!acts_member(me)) return;
        slots[me].assign(n, BitString());
        slots[me][me] = own_ct[me];
        for (const auto& m : ctx.inbox())
            if (m.tag == kTagCt) slots[me][m.sender] = m.payload;
        BitWriter w;
        for (PartyId i = 0; i < n; ++i) {
            if (slots[me][i].empty()) continue;
            w.u(i, wi);
            w.lp(slots[me][i]);
        }
        mc[me] = w.take();
    });

    committee_value_eq(sim, er, mc, "mpc.mc");

    std::vector<BitString> chosen(n);
    for (PartyId c : er.committee)
        if (sim.is_live(c) && acts_member(c)) {
            chosen = slots[c];
            break;
        }
    auto comp = oracle.f_comp(gen.handle, er.committee, chosen, f, "mpc.comp");
    d.effective_inputs = comp.effective_inputs;

    std::vector<uint8_t> got_y(n, 0);
    for (PartyId r : comp.receivers) got_y[r] = 1;

    const uint64_t ob = f.out_bits;
    sim.register_tag(kTagOut, "mpc.out", BudgetRule{ob, ob});
    sim.run_round("mpc.out_forward", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        if (!got_y[me] || !acts_member(me)) return;
        for (PartyId r = 0; r < n; ++r)
            if (r != me) ctx.send(r, kTagOut, comp.y);
    });
    sim.run_round("mpc.out_decide", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        BitString y;
        bool have = false;
        if (got_y[me] && acts_member(me)) {
            y = comp.y;
            have = true;
        }
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagOut) continue;
            if (!have) {
                y = m.payload;
                have = true;
            } else if (m.payload != y) {
                ctx.abort(AbortReason::OutputMismatch);
                return;
            }
        }
        if (!have) {
            ctx.abort(AbortReason::Timeout);
            return;
        }
        ctx.set_output(y);
    });
    return d;
}

DriveOut drive_mpc_multi_output(Sim& sim, const RunConfig& cfg, const ProtocolParams& params,
                                const std::vector<BitString>& inputs) {
    const uint32_t n = sim.n();
    const uint32_t wi = index_width(n);
    const FunctionSpec& f = params.f;
    SignatureRegistry registry;
    IdealOracle oracle(sim, cfg.cost, registry);

    ElectionResult er = run_committee_elect(sim, cfg.alpha, kTagElect);
    DriveOut d;
    d.family = Family::PerParty;
    d.committee_size = uint32_t(er.committee.size());
    d.degraded = er.clipped;

    auto gen_e = oracle.f_gen(er.committee, cfg.lambda, false, "mmo.gen_enc");
    auto gen_s = oracle.f_gen(er.committee, cfg.lambda, true, "mmo.gen_sig");
    auto acts_member = [&](PartyId i) { return er.elected[i] != 0 && contains(er.committee, i); };

    const uint64_t pkb = cfg.cost.pk_bits;
    sim.register_tag(kTagPk, "mmo.pk", BudgetRule{2 * pkb, 2 * pkb});
    sim.run_round("mmo.pk_forward", [&](PartyCtx& ctx) {
        if (!acts_member(ctx.id())) return;
        BitWriter w;
        w.str(gen_e.pk);
        w.str(gen_s.pk);
        BitString both = w.take();
        for (PartyId r = 0; r < n; ++r)
            if (r != ctx.id()) ctx.send(r, kTagPk, both);
    });

    const uint64_t ctxb = cfg.cost.ct_bits(f.in_bits);
    const uint64_t ctkb = cfg.cost.ct_bits(cfg.cost.skey_bits);
    sim.register_tag(kTagCt, "mmo.ct", BudgetRule{ctxb + ctkb, ctxb + ctkb});
    std::vector<BitString> own_key(n), vk_of(n);
    std::vector<BitString> own_ctx(n), own_ctk(n);
    sim.run_round("mmo.ct_send", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        BitString pk, vk;
        bool have = false;
        if (acts_member(me)) {
            pk = gen_e.pk;
            vk = gen_s.pk;
            have = true;
        }
        std::vector<PartyId> senders;
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagPk) continue;
            if (m.payload.size() != 2 * pkb) {
                ctx.abort(AbortReason::PkMismatch);
                return;
            }
            BitString p = m.payload.slice(0, pkb);
            BitString v = m.payload.slice(pkb, pkb);
            if (!have) {
                pk = p;
                vk = v;
                have = true;
            } else if (p != pk || v != vk) {
                ctx.abort(AbortReason::PkMismatch);
                return;
            }
            senders.push_back(m.sender);
        }
        if (!have) {
            ctx.abort(AbortReason::Timeout);
            return;
        }
        std::sort(senders.begin(), senders.end());
        senders.erase(std::unique(senders.begin(), senders.end()), senders.end());
        vk_of[me] = vk;
        own_key[me] = ske_gen(cfg.cost, ctx.rng());
        own_ctx[me] = pke_encrypt(cfg.cost, pk, fit_width(inputs[me], f.in_bits));
        own_ctk[me] = pke_encrypt(cfg.cost, pk, own_key[me]);
        BitWriter w;
        w.str(own_ctx[me]);
        w.str(own_ctk[me]);
        BitString both = w.take();
        for (PartyId c : senders) ctx.send(c, kTagCt, both);
    });

    std::vector<std::vector<BitString>> slots_x(n), slots_k(n);
    std::vector<BitString> mc(n);
    sim.run_round("mmo.collect", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        if (!acts_member(me)) return;
        slots_x[me].assign(n, BitString());
        slots_k[me].assign(n, BitString());
        slots_x[me][me] = own_ctx[me];
        slots_k[me][me] = own_ctk[me];
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagCt) continue;
            if (m.payload.size() != ctxb + ctkb) continue;  // malformed -> zero default
            slots_x[me][m.sender] = m.payload.slice(0, ctxb);
            slots_k[me][m.sender] = m.payload.slice(ctxb, ctkb);
        }
        BitWriter w;
        for (PartyId i = 0; i < n; ++i) {
            if (slots_x[me][i].empty()) continue;
            w.u(i, wi);
            w.str(slots_x[me][i]);
            w.str(slots_k[me][i]);
        }
        mc[me] = w.take();
    });

    committee_value_eq(sim, er, mc, "mmo.mc");

    std::vector<BitString> chosen_x(n), chosen_k(n);
    for (PartyId c : er.committee)
        if (sim.is_live(c) && acts_member(c)) {
            chosen_x = slots_x[c];
            chosen_k = slots_k[c];
            break;
        }
    auto cs = oracle.f_comp_sign(gen_e.handle, gen_s.handle, er.committee, chosen_x, chosen_k, f,
                                 "mmo.comp");
    d.effective_inputs = cs.effective_inputs;

    const uint64_t ctob = cfg.cost.ct_bits(f.out_bits);
    const uint64_t pairb = ctob + cfg.cost.sig_bits;
    sim.register_tag(kTagPair, "mmo.pair", BudgetRule{pairb, pairb});
    sim.run_round("mmo.deliver", [&](PartyCtx& ctx) {
        if (!cs.have_designated || ctx.id() != cs.designated) return;
        for (PartyId i = 0; i < n; ++i) {
            if (i == ctx.id()) continue;
            BitWriter w;
            w.str(cs.out[i].first);
            w.str(cs.out[i].second);
            ctx.send(i, kTagPair, w.take());
        }
    });
    sim.run_round("mmo.decide", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        std::vector<std::pair<BitString, BitString>> pairs;
        if (cs.have_designated && me == cs.designated) pairs.push_back(cs.out[me]);
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagPair) continue;
            if (m.payload.size() != pairb) {
                ctx.abort(AbortReason::SigReject);
                return;
            }
            pairs.emplace_back(m.payload.slice(0, ctob), m.payload.slice(ctob, cfg.cost.sig_bits));
        }
        if (pairs.empty()) {
            ctx.abort(AbortReason::Timeout);
            return;
        }
        for (const auto& [ct, sigma] : pairs) {
            BitWriter w;
            w.u(me, 16);  // the oracle signs [slot || ct'], bind the same way
            w.str(ct);
            if (!registry.verify(cfg.cost, vk_of[me], w.take(), sigma)) {
                ctx.abort(AbortReason::SigReject);
                return;
            }
        }
        auto y = ske_decrypt(cfg.cost, own_key[me], pairs.front().first);
        if (!y) {
            ctx.abort(AbortReason::DecryptFail);
            return;
        }
        ctx.set_output(fit_width(*y, f.out_bits));
    });
    return d;
}

DriveOut drive_mpc_gossip(Sim& sim, const RunConfig& cfg, const ProtocolParams& params,
                          const std::vector<BitString>& inputs) {
    const uint32_t n = sim.n();
    const FunctionSpec& f = params.f;
    RoutingGraph g = run_sparse_network(sim, cfg.alpha, kTagNotify);

    // Every party gossips its input padded to the size of the first-round
    // broadcast blob the oracle model prices (key share, ciphertext, proof).
    const uint64_t blob_bits = sb_poly_in(cfg.cost, f.in_bits);
    GossipSpec gs;
    gs.rumor_tag = kTagRumor;
    gs.graph = &g;
    gs.value_bits = uint32_t(blob_bits);
    gs.inputs.assign(n, std::nullopt);
    for (PartyId i = 0; i < n; ++i)
        gs.inputs[i] = fit_width(fit_width(inputs[i], f.in_bits), blob_bits);
    GossipResult gr = run_gossip(sim, gs);

    // The output-reconstruction exchange runs over the same sparse edges;
    // charge it there so locality reflects the whole protocol.
    std::vector<std::pair<PartyId, PartyId>> edges;
    for (PartyId u = 0; u < n; ++u) {
        if (!sim.is_live(u)) continue;
        for (PartyId v : g.nbrs[u])
            if (sim.is_live(v)) edges.emplace_back(u, v);
    }
    uint64_t charge = oracle_output_bits(f.out_bits, sim.live_count(), cfg.cost);
    if (!edges.empty()) {
        uint64_t per = charge / edges.size();
        uint64_t rem = charge % edges.size();
        for (size_t e = 0; e < edges.size(); ++e) {
            uint64_t b = per + (e < rem ? 1 : 0);
            if (b) sim.charge_virtual(edges[e].first, edges[e].second, b);
        }
    }
    sim.oracle_denials("mpc.comp", sim.live_parties());

    std::vector<BitString> ref;
    sim.run_round("mpc.eval", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        std::vector<BitString> eff(n);
        for (PartyId i = 0; i < n; ++i) eff[i] = BitString(f.in_bits);
        for (const auto& [origin, value] : gr.heard[me]) eff[origin] = fit_width(value, f.in_bits);
        auto ys = f.eval(eff);
        ctx.set_output(fit_width(ys.empty() ? BitString() : ys[0], f.out_bits));
        if (ref.empty() && !sim.is_corrupted(me)) ref = std::move(eff);
    });

    DriveOut d;
    d.family = Family::Function;
    d.effective_inputs = ref.empty() ? std::vector<BitString>(n, BitString(f.in_bits)) : ref;
    return d;
}

DriveOut drive_mpc_local(Sim& sim, const RunConfig& cfg, const ProtocolParams& params,
                         const std::vector<BitString>& inputs) {
    const uint32_t n = sim.n();
    const uint32_t wi = index_width(n);
    const FunctionSpec& f = params.f;
    SignatureRegistry registry;
    IdealOracle oracle(sim, cfg.cost, registry);

    RoutingGraph g = run_sparse_network(sim, cfg.alpha, kTagNotify);
    ElectionResult er = run_local_committee_elect(sim, cfg.alpha, g, kTagElect);
    DriveOut d;
    d.family = Family::Function;
    d.committee_size = uint32_t(er.committee.size());
    d.degraded = er.clipped;

    auto gen = oracle.f_gen(er.committee, cfg.lambda, false, "mlt.gen");
    auto acts_member = [&](PartyId i) { return er.elected[i] != 0 && contains(er.committee, i); };

    // Each member covers ceil(n / sqrt(h)) sampled parties instead of all n;
    // election sizing makes every party land in some member's set whp.
    const uint32_t cover =
        std::min(n - 1, uint32_t(std::ceil(double(n) / std::sqrt(double(cfg.h)))));
    std::vector<std::vector<PartyId>> s_of(n);
    const uint64_t pkb = cfg.cost.pk_bits;
    sim.register_tag(kTagPk, "mlt.pk", BudgetRule{pkb, pkb});
    sim.run_round("mlt.pk_forward", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        if (!acts_member(me)) return;
        s_of[me] = ctx.rng().sample_subset(n, cover, me);
        for (PartyId r : s_of[me]) ctx.send(r, kTagPk, gen.pk);
    });

    const uint64_t ctb = cfg.cost.ct_bits(f.in_bits);
    sim.register_tag(kTagCt, "mlt.ct", BudgetRule{ctb, ctb});
    std::vector<BitString> own_ct(n);
    sim.run_round("mlt.ct_send", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        BitString pk;
        bool have = false;
        if (acts_member(me)) {
            pk = gen.pk;
            have = true;
        }
        std::vector<PartyId> senders;
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagPk) continue;
            if (!have) {
                pk = m.payload;
                have = true;
            } else if (m.payload != pk) {
                ctx.abort(AbortReason::PkMismatch);
                return;
            }
            senders.push_back(m.sender);
        }
        if (!have) {
            ctx.abort(AbortReason::Timeout);  // covered by no member's sample
            return;
        }
        std::sort(senders.begin(), senders.end());
        senders.erase(std::unique(senders.begin(), senders.end()), senders.end());
        own_ct[me] = pke_encrypt(cfg.cost, pk, fit_width(inputs[me], f.in_bits));
        for (PartyId c : senders) ctx.send(c, kTagCt, own_ct[me]);
    });

    // Members exchange their partial ciphertext lists across the committee
    // and merge; a conflicting copy for one party is an equivocation.
    const uint64_t xrec = wi + 16 + ctb;
    const uint64_t xlb = uint64_t(cover + 1) * xrec;
    sim.register_tag(kTagXlist, "mlt.xlist", BudgetRule{xlb, xlb});
    std::vector<std::vector<BitString>> merged(n);
    sim.run_round("mlt.xlist", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        if (!acts_member(me)) return;
        merged[me].assign(n, BitString());
        merged[me][me] = own_ct[me];
        for (const auto& m : ctx.inbox())
            if (m.tag == kTagCt) merged[me][m.sender] = m.payload;
        BitWriter w;
        for (PartyId i = 0; i < n; ++i) {
            if (merged[me][i].empty()) continue;
            w.u(i, wi);
            w.lp(merged[me][i]);
        }
        BitString xl = w.take();
        for (PartyId j : er.view[me])
            if (j != me) ctx.send(j, kTagXlist, xl);
    });

    std::vector<BitString> mc(n);
    sim.run_round("mlt.merge", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        if (!acts_member(me)) return;
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagXlist) continue;
            BitReader r(m.payload);
            while (r.ok() && r.remaining() > 0) {
                uint64_t idx = r.u(wi);
                BitString ct = r.lp();
                if (!r.ok() || idx >= n || ct.size() != ctb) {
                    ctx.abort(AbortReason::Equivocation);  // member relayed garbage
                    return;
                }
                if (merged[me][idx].empty()) {
                    merged[me][idx] = ct;
                } else if (merged[me][idx] != ct) {
                    ctx.abort(AbortReason::Equivocation);
                    return;
                }
            }
        }
        BitWriter w;
        for (PartyId i = 0; i < n; ++i) {
            if (merged[me][i].empty()) continue;
            w.u(i, wi);
            w.lp(merged[me][i]);
        }
        mc[me] = w.take();
    });

    committee_value_eq(sim, er, mc, "mlt.mc");

    std::vector<BitString> chosen(n);
    for (PartyId c : er.committee)
        if (sim.is_live(c) && acts_member(c)) {
            chosen = merged[c];
            break;
        }
    auto comp = oracle.f_comp(gen.handle, er.committee, chosen, f, "mlt.comp");
    d.effective_inputs = comp.effective_inputs;

    std::vector<uint8_t> got_y(n, 0);
    for (PartyId r : comp.receivers) got_y[r] = 1;

    const uint64_t ob = f.out_bits;
    sim.register_tag(kTagOut, "mlt.out", BudgetRule{ob, ob});
    sim.run_round("mlt.out_forward", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        if (!got_y[me] || !acts_member(me)) return;
        for (PartyId r : s_of[me]) ctx.send(r, kTagOut, comp.y);
    });
    sim.run_round("mlt.out_decide", [&](PartyCtx& ctx) {
        PartyId me = ctx.id();
        BitString y;
        bool have = false;
        if (got_y[me] && acts_member(me)) {
            y = comp.y;
            have = true;
        }
        for (const auto& m : ctx.inbox()) {
            if (m.tag != kTagOut) continue;
            if (!have) {
                y = m.payload;
                have = true;
            } else if (m.payload != y) {
                ctx.abort(AbortReason::OutputMismatch);
                return;
            }
        }
        if (!have) {
            ctx.abort(AbortReason::Timeout);
            return;
        }
        ctx.set_output(y);
    });
    return d;
}

DriveOut drive(Sim& sim, const RunConfig& cfg, const ProtocolParams& params,
               const std::vector<BitString>& inputs) {
    const std::string& nm = params.name;
    if (nm == "single_source_broadcast") return drive_single_source(sim, params);
    if (nm == "all_to_all_broadcast") return drive_a2a(sim, inputs);
    if (nm == "all_to_all_gl") return drive_gl(sim, inputs);
    if (nm == "committee_elect") return drive_committee_elect(sim, cfg);
    if (nm == "local_committee_elect") return drive_local_elect(sim, cfg);
    if (nm == "sparse_network") return drive_sparse(sim, cfg);
    if (nm == "gossip") return drive_gossip(sim, cfg, inputs);
    if (nm == "strawman_broadcast") return drive_strawman(sim, params);
    if (nm == "mpc_committee") return drive_mpc_committee(sim, cfg, params, inputs);
    if (nm == "mpc_multi_output") return drive_mpc_multi_output(sim, cfg, params, inputs);
    if (nm == "mpc_gossip") return drive_mpc_gossip(sim, cfg, params, inputs);
    if (nm == "mpc_local_tradeoff") return drive_mpc_local(sim, cfg, params, inputs);
    throw std::invalid_argument("drive: unknown protocol " + nm);
}

void evaluate_consistency(RunReport& rep, const Sim& sim, const ProtocolParams& params,
                          const DriveOut& d) {
    const uint32_t n = sim.n();
    std::vector<PartyId> live_honest;
    for (PartyId i = 0; i < n; ++i) {
        if (sim.is_corrupted(i)) continue;
        if (sim.outcome(i).aborted)
            ++rep.aborted_honest;
        else
            live_honest.push_back(i);
    }
    rep.live_honest = uint32_t(live_honest.size());

    auto all_agree = [&]() {
        for (size_t k = 1; k < live_honest.size(); ++k)
            if (sim.outcome(live_honest[k]).output != sim.outcome(live_honest[0]).output)
                return false;
        return true;
    };

    bool ok = true;
    switch (d.family) {
        case Family::None:
            break;
        case Family::Agreement:
            ok = all_agree();
            break;
        case Family::Electees: {
            const BitString* ref = nullptr;
            for (PartyId i : live_honest) {
                const BitString& o = sim.outcome(i).output;
                if (o.empty() || !o.bit(0)) continue;
                if (!ref) {
                    ref = &o;
                } else if (o != *ref) {
                    ok = false;
                    break;
                }
            }
            break;
        }
        case Family::SenderValue: {
            rep.expected_outputs = {params.message};
            ok = all_agree();
            if (ok && !sim.is_corrupted(params.sender)) {
                for (PartyId i : live_honest)
                    if (sim.outcome(i).output != params.message) {
                        ok = false;
                        break;
                    }
            }
            break;
        }
        case Family::Function: {
            std::vector<BitString> eff(n);
            for (PartyId i = 0; i < n; ++i)
                eff[i] = fit_width(i < d.effective_inputs.size() ? d.effective_inputs[i]
                                                                 : BitString(),
                                   params.f.in_bits);
            auto ys = params.f.eval(eff);
            BitString expect = fit_width(ys.empty() ? BitString() : ys[0], params.f.out_bits);
            rep.expected_outputs = {expect};
            for (PartyId i : live_honest)
                if (sim.outcome(i).output != expect) {
                    ok = false;
                    break;
                }
            break;
        }
        case Family::PerParty: {
            std::vector<BitString> eff(n);
            for (PartyId i = 0; i < n; ++i)
                eff[i] = fit_width(i < d.effective_inputs.size() ? d.effective_inputs[i]
                                                                 : BitString(),
                                   params.f.in_bits);
            auto ys = params.f.eval(eff);
            rep.expected_outputs.resize(n);
            for (PartyId i = 0; i < n; ++i)
                rep.expected_outputs[i] =
                    fit_width(i < ys.size() ? ys[i] : BitString(), params.f.out_bits);
            for (PartyId i : live_honest)
                if (sim.outcome(i).output != rep.expected_outputs[i]) {
                    ok = false;
                    break;
                }
            break;
        }
        case Family::Strawman: {
            rep.expected_outputs = {params.message};
            if (!sim.is_corrupted(params.sender)) {
                for (PartyId i : live_honest)
                    if (sim.outcome(i).output != params.message) {
                        ok = false;
                        break;
                    }
            }
            break;
        }
    }
    rep.consistency_ok = ok;
}

bool needs_sparse(const std::string& name) {
    return name == "local_committee_elect" || name == "sparse_network" || name == "gossip" ||
           name == "mpc_gossip" || name == "mpc_local_tradeoff";
}

bool is_mpc(const std::string& name) { return name.rfind("mpc_", 0) == 0; }

}  // namespace

std::vector<std::string> protocol_names() {
    return {"single_source_broadcast",
            "all_to_all_broadcast",
            "all_to_all_gl",
            "committee_elect",
            "local_committee_elect",
            "sparse_network",
            "gossip",
            "strawman_broadcast",
            "mpc_committee",
            "mpc_multi_output",
            "mpc_gossip",
            "mpc_local_tradeoff"};
}

uint32_t protocol_round_bound(const std::string& name, uint32_t n) {
    if (name == "single_source_broadcast") return 3;
    if (name == "all_to_all_broadcast") return 7;
    if (name == "all_to_all_gl") return 3;
    if (name == "committee_elect") return 7;
    if (name == "local_committee_elect") return n + 8;
    if (name == "sparse_network") return 3;
    if (name == "gossip") return n + 3;
    if (name == "strawman_broadcast") return n + 3;
    if (name == "mpc_committee") return 15;
    if (name == "mpc_multi_output") return 15;
    if (name == "mpc_gossip") return n + 3;
    if (name == "mpc_local_tradeoff") return n + 17;
    return 0;
}

std::string validate_protocol_config(const RunConfig& cfg, const ProtocolParams& params) {
    if (!cfg.valid()) return "run config invalid (check n, h, alpha, lambda, depth, cost)";
    auto names = protocol_names();
    if (std::find(names.begin(), names.end(), params.name) == names.end())
        return "unknown protocol: " + params.name;
    if (params.inputs.size() > cfg.n) return "more inputs than parties";
    if (needs_sparse(params.name) && !(double(cfg.h) > std::log2(double(cfg.n))))
        return "sparse-network protocols need h > log2(n)";
    if (params.name == "single_source_broadcast" || params.name == "strawman_broadcast") {
        if (params.sender >= cfg.n) return "sender index out of range";
        if (params.message.empty()) return "broadcast message must be nonempty";
    }
    if (params.name == "strawman_broadcast") {
        bool nonzero = false;
        for (size_t i = 0; i < params.message.size() && !nonzero; ++i)
            nonzero = params.message.bit(i);
        if (!nonzero) return "strawman message must differ from the all-zero default";
        if (params.d_target < 1) return "strawman needs d_target >= 1";
    }
    if (is_mpc(params.name)) {
        if (!params.f.eval) return "mpc protocols need a function with an evaluator";
        if (params.f.in_bits < 1 || params.f.out_bits < 1)
            return "function widths must be at least 1";
        if (params.f.in_bits > CostModel::kPlaintextCap)
            return "function input exceeds the encryption plaintext cap";
        if (params.name == "mpc_multi_output") {
            if (!params.f.multi_output) return "mpc_multi_output needs a multi-output function";
            if (params.f.out_bits > CostModel::kPlaintextCap)
                return "function output exceeds the encryption plaintext cap";
            if (cfg.cost.skey_bits > CostModel::kPlaintextCap)
                return "symmetric key exceeds the encryption plaintext cap";
        } else if (params.f.multi_output) {
            return params.name + " needs a single-output function";
        }
    }
    return "";
}

RunReport run_protocol(const RunConfig& cfg, const ProtocolParams& params, Strategy* strategy) {
    std::string err = validate_protocol_config(cfg, params);
    if (!err.empty()) throw std::invalid_argument("run_protocol: " + err);

    std::vector<BitString> inputs = params.inputs;
    inputs.resize(cfg.n);

    Sim sim(cfg);
    if (strategy) {
        std::vector<PartyId> corrupted =
            strategy->choose_corrupted(cfg.n, cfg.h, sim.environment_rng());
        std::sort(corrupted.begin(), corrupted.end());
        corrupted.erase(std::unique(corrupted.begin(), corrupted.end()), corrupted.end());
        sim.set_adversary(corrupted, strategy);
        strategy->substitute_inputs(inputs, corrupted, sim.adversary_rng());
    }

    DriveOut d = drive(sim, cfg, params, inputs);
    sim.finalize();

    RunReport rep;
    rep.outcomes = sim.outcomes();
    rep.corrupted = sim.corrupted();
    rep.total_bits = sim.metrics().total();
    rep.message_count = sim.metrics().message_count();
    rep.max_locality = sim.metrics().max_locality();
    rep.honest_bits = sim.metrics().honest_sent();
    rep.adversary_bits = sim.metrics().adversary_sent();
    rep.rounds = uint32_t(sim.round());
    rep.committee_size = d.committee_size;
    rep.degraded = d.degraded;
    rep.effective_inputs = d.effective_inputs;
    evaluate_consistency(rep, sim, params, d);

    if (strategy && !params.skip_honest_twin) {
        std::vector<BitString> honest_inputs = params.inputs;
        honest_inputs.resize(cfg.n);
        Sim twin(cfg);
        drive(twin, cfg, params, honest_inputs);
        twin.finalize();
        rep.twin_total_bits = twin.metrics().total();
        rep.twin_max_locality = twin.metrics().max_locality();
    } else {
        rep.twin_total_bits = rep.total_bits;
        rep.twin_max_locality = rep.max_locality;
    }
    return rep;
}

}  // namespace mpclab
