#include "mpclab/routing.hpp"

#include <algorithm>
#include <cmath>

namespace mpclab {

RoutingGraph run_sparse_network(Sim& sim, double alpha, Tag notify_tag) {
    const RunConfig& cfg = sim.config();
    const uint32_t n = cfg.n;
    RoutingGraph g;
    g.d = alpha * n * std::log2(double(n)) / cfg.h;
    g.out.resize(n);
    g.nbrs.resize(n);

    uint32_t want = uint32_t(std::ceil(g.d));
    if (want > n - 1) want = n - 1;
    sim.register_tag(notify_tag, "net.notify", BudgetRule{1, 1});

    sim.run_round("net.notify", [&](PartyCtx& ctx) {
        g.out[ctx.id()] = ctx.rng().sample_subset(n, want, ctx.id());
        for (PartyId r : g.out[ctx.id()]) ctx.send(r, notify_tag, BitString::from_u64(1, 1));
    });

    sim.run_round("net.tally", [&](PartyCtx& ctx) {
        std::vector<PartyId> in;
        for (const auto& m : ctx.inbox())
            if (m.tag == notify_tag) in.push_back(m.sender);
        std::sort(in.begin(), in.end());
        in.erase(std::unique(in.begin(), in.end()), in.end());
        if (double(in.size()) > 2.0 * g.d) {
            ctx.abort(AbortReason::Threshold);
            return;
        }
        auto& nb = g.nbrs[ctx.id()];
        nb = g.out[ctx.id()];
        nb.insert(nb.end(), in.begin(), in.end());
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    });

    return g;
}

namespace {

struct GossipState {
    std::map<PartyId, BitString> have;
    std::vector<PartyId> queue;   // origins accepted this round, to forward next
    bool warned = false;          // our single warning is out
    bool emitted = false;
};

}  // namespace

GossipResult run_gossip(Sim& sim, const GossipSpec& spec) {
    const RunConfig& cfg = sim.config();
    const uint32_t n = cfg.n;
    assert(spec.graph && spec.inputs.size() == n);
    const uint32_t wi = std::max(1, ceil_log2(n));

    uint32_t k = 0;
    for (const auto& x : spec.inputs)
        if (x) ++k;

    // Per-edge budget: k value records plus the one warning a party may send.
    const uint64_t record_max = uint64_t(wi) + 1 + 16 + spec.value_bits;
    const uint64_t edge_budget = uint64_t(k + 1) * record_max;
    const std::string tag_label = spec.step_prefix + ".rumor";
    sim.register_tag(spec.rumor_tag, tag_label.c_str(), BudgetRule{edge_budget, edge_budget});

    const uint32_t max_rounds = spec.max_rounds ? spec.max_rounds : n;
    const std::string step = spec.step_prefix + ".flood";

    GossipResult res;
    res.records_sent.assign(n, 0);
    std::vector<GossipState> st(n);

    bool sent_any = false;
    auto send_warn = [&](PartyCtx& ctx, PartyId origin) {
        if (st[ctx.id()].warned) return;
        st[ctx.id()].warned = true;
        BitWriter w;
        w.u(origin, wi);
        w.u(1, 1);
        BitString rec = w.take();
        for (PartyId r : (*spec.graph).nbrs[ctx.id()]) {
            ctx.send(r, spec.rumor_tag, rec);
            ++res.records_sent[ctx.id()];
            sent_any = true;
        }
    };

    auto behave = [&](PartyCtx& ctx) {
        GossipState& me = st[ctx.id()];

        if (!me.emitted) {
            me.emitted = true;
            if (spec.inputs[ctx.id()]) {
                me.have[ctx.id()] = *spec.inputs[ctx.id()];
                me.queue.push_back(ctx.id());
            }
        }

        bool conflict = false;
        PartyId conflict_origin = 0;
        bool warn_seen = false;
        PartyId warn_origin = 0;
        for (const auto& m : ctx.inbox()) {
            if (m.tag != spec.rumor_tag) continue;
            BitReader r(m.payload);
            while (r.ok() && r.remaining() > 0) {
                PartyId origin = PartyId(r.u(wi));
                bool warn = r.u(1);
                if (!r.ok() || origin >= n) {
                    conflict = true;  // malformed batch: blame the sender
                    conflict_origin = m.sender;
                    break;
                }
                if (warn) {
                    warn_seen = true;
                    warn_origin = origin;
                    continue;
                }
                BitString v = r.lp();
                if (!r.ok() || v.size() > spec.value_bits) {
                    conflict = true;
                    conflict_origin = m.sender;
                    break;
                }
                auto it = me.have.find(origin);
                if (it == me.have.end()) {
                    me.have.emplace(origin, std::move(v));
                    me.queue.push_back(origin);
                } else if (it->second != v) {
                    conflict = true;
                    conflict_origin = origin;
                    break;
                }
            }
            if (conflict) break;
        }

        if (conflict) {
            if (!cfg.silent_abort) send_warn(ctx, conflict_origin);
            ctx.abort_after_send(AbortReason::Equivocation);
            return;
        }
        if (warn_seen) {
            if (!cfg.silent_abort) send_warn(ctx, warn_origin);
            ctx.abort_after_send(AbortReason::Warned);
            return;
        }

        if (me.queue.empty()) return;
        BitWriter w;
        for (PartyId origin : me.queue) {
            w.u(origin, wi);
            w.u(0, 1);
            w.lp(me.have[origin]);
        }
        BitString batch = w.take();
        size_t records = me.queue.size();
        me.queue.clear();
        for (PartyId r : (*spec.graph).nbrs[ctx.id()]) {
            ctx.send(r, spec.rumor_tag, batch);
            res.records_sent[ctx.id()] += records;
            sent_any = true;
        }
    };

    for (uint32_t round = 0; round < max_rounds; ++round) {
        sent_any = false;
        sim.run_round(step.c_str(), behave);
        ++res.rounds;
        if (!sent_any) break;
    }

    res.heard.resize(n);
    for (uint32_t i = 0; i < n; ++i) res.heard[i] = std::move(st[i].have);
    return res;
}

}  // namespace mpclab
