#include "mpclab/committee.hpp"

#include <algorithm>
#include <cmath>

#include "mpclab/phases.hpp"

namespace mpclab {

BitString serialize_committee(const std::vector<PartyId>& members, uint32_t n) {
    const uint32_t wi = std::max(1, ceil_log2(n));
    BitWriter w;
    for (PartyId m : members) w.u(m, wi);
    return w.take();
}

namespace {

// Shared tail: threshold check + view serialization already done; run the
// mutual-electee equality phase and collect the ground-truth committee.
void election_eq_phase(Sim& sim, ElectionResult& res, const char* prefix, Tag tag_base) {
    EqPhaseSpec eq;
    eq.step_prefix = prefix;
    eq.challenge_tag = Tag(tag_base + 1);
    eq.verdict_tag = Tag(tag_base + 2);
    eq.flag_tag = Tag(tag_base + 3);
    eq.challenge_targets = [&res](PartyId i) {
        std::vector<PartyId> t;
        if (res.elected[i])
            for (PartyId j : res.view[i])
                if (j > i) t.push_back(j);
        return t;
    };
    eq.respond_pred = [&res](PartyId responder, PartyId challenger) {
        return res.elected[responder] &&
               std::binary_search(res.view[responder].begin(), res.view[responder].end(),
                                  challenger);
    };
    eq.value_of = [&res](PartyId i) -> const BitString& { return res.view_ser[i]; };
    eq.flag_targets = [&res](PartyId i) { return res.view[i]; };
    run_equality_phase(sim, eq);
}

void finish_views(Sim& sim, ElectionResult& res) {
    const uint32_t n = sim.n();
    std::vector<uint8_t> seen(n, 0);
    for (PartyId i = 0; i < n; ++i) {
        for (PartyId j : res.view[i]) seen[j] = 1;
    }
    for (PartyId i = 0; i < n; ++i)
        if (seen[i]) res.committee.push_back(i);
}

}  // namespace

ElectionResult run_committee_elect(Sim& sim, double alpha, Tag tag_base) {
    const RunConfig& cfg = sim.config();
    const uint32_t n = cfg.n;

    ElectionResult res;
    res.p = std::min(1.0, alpha * std::log2(double(n)) / cfg.h);
    res.clipped = res.p >= 1.0;
    res.elected.assign(n, 0);
    res.view.resize(n);
    res.view_ser.resize(n);

    sim.register_tag(tag_base, "elect.announce", BudgetRule{1, 1});

    sim.run_round("elect.announce", [&](PartyCtx& ctx) {
        if (!ctx.rng().bernoulli(res.p)) return;
        res.elected[ctx.id()] = 1;
        BitString one = BitString::from_u64(1, 1);
        for (PartyId r = 0; r < n; ++r)
            if (r != ctx.id()) ctx.send(r, tag_base, one);
    });

    sim.run_round("elect.tally", [&](PartyCtx& ctx) {
        auto& v = res.view[ctx.id()];
        for (const auto& m : ctx.inbox())
            if (m.tag == tag_base) v.push_back(m.sender);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        // Own coin does not count toward the stuffing threshold.
        if (double(v.size()) >= 2.0 * res.p * n) {
            ctx.abort(AbortReason::Threshold);
            return;
        }
        std::vector<PartyId> members = v;
        if (res.elected[ctx.id()]) {
            members.push_back(ctx.id());
            std::sort(members.begin(), members.end());
        }
        res.view_ser[ctx.id()] = serialize_committee(members, n);
    });

    election_eq_phase(sim, res, "elect", tag_base);
    finish_views(sim, res);
    return res;
}

ElectionResult run_local_committee_elect(Sim& sim, double alpha, const RoutingGraph& graph,
                                         Tag tag_base) {
    const RunConfig& cfg = sim.config();
    const uint32_t n = cfg.n;

    ElectionResult res;
    res.p = std::min(1.0, alpha * std::log2(double(n)) / std::sqrt(double(cfg.h)));
    res.clipped = res.p >= 1.0;
    res.elected.assign(n, 0);
    res.view.resize(n);
    res.view_ser.resize(n);

    // Coins are flipped up front (no wire cost); announcements are empty-value
    // rumors gossiped over the sparse graph.
    GossipSpec gs;
    gs.step_prefix = "lce";
    gs.rumor_tag = tag_base;
    gs.value_bits = 0;
    gs.graph = &graph;
    gs.inputs.resize(n);
    for (PartyId i = 0; i < n; ++i) {
        if (sim.is_live(i) && sim.party_rng(i).bernoulli(res.p)) {
            res.elected[i] = 1;
            gs.inputs[i] = BitString();
        }
    }
    GossipResult gossip = run_gossip(sim, gs);

    sim.run_round("lce.tally", [&](PartyCtx& ctx) {
        auto& v = res.view[ctx.id()];
        for (const auto& [origin, value] : gossip.heard[ctx.id()]) {
            (void)value;
            if (origin != ctx.id()) v.push_back(origin);
        }
        if (double(v.size()) >= 2.0 * res.p * n) {
            ctx.abort(AbortReason::Threshold);
            return;
        }
        std::vector<PartyId> members = v;
        if (res.elected[ctx.id()]) {
            members.push_back(ctx.id());
            std::sort(members.begin(), members.end());
        }
        res.view_ser[ctx.id()] = serialize_committee(members, n);
    });

    election_eq_phase(sim, res, "lce", tag_base);
    finish_views(sim, res);
    return res;
}

}  // namespace mpclab
