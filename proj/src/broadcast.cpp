#include "mpclab/broadcast.hpp"

#include <algorithm>
#include <map>

#include "mpclab/phases.hpp"

namespace mpclab {

namespace {

constexpr Tag kTagValue = 1;
constexpr Tag kTagEcho = 2;
constexpr Tag kTagChallenge = 3;
constexpr Tag kTagVerdict = 4;
constexpr Tag kTagFlag = 5;

uint64_t max_input_bits(const std::vector<BitString>& inputs) {
    uint64_t m = 0;
    for (const auto& x : inputs) m = std::max<uint64_t>(m, x.size());
    return m;
}

}  // namespace

void run_single_source_broadcast(Sim& sim, PartyId sender, const BitString& m) {
    const uint32_t n = sim.n();
    uint64_t mb = std::max<uint64_t>(1, m.size());
    sim.register_tag(kTagValue, "ssb.value", BudgetRule{mb, mb});
    sim.register_tag(kTagEcho, "ssb.echo", BudgetRule{mb, mb});

    sim.run_round("ssb.send", [&](PartyCtx& ctx) {
        if (ctx.id() != sender) return;
        for (PartyId r = 0; r < n; ++r)
            if (r != sender) ctx.send(r, kTagValue, m);
    });

    // Receivers' accepted candidate value, recorded when it arrives.
    std::vector<BitString> cand(n);
    std::vector<uint8_t> have(n, 0);

    sim.run_round("ssb.echo", [&](PartyCtx& ctx) {
        if (ctx.id() == sender) return;
        for (const auto& msg : ctx.inbox()) {
            if (msg.tag == kTagValue && msg.sender == sender) {
                cand[ctx.id()] = msg.payload;
                have[ctx.id()] = 1;
            }
        }
        if (!have[ctx.id()]) {
            ctx.abort(AbortReason::Timeout);
            return;
        }
        for (PartyId r = 0; r < n; ++r)
            if (r != ctx.id() && r != sender) ctx.send(r, kTagEcho, cand[ctx.id()]);
    });

    sim.run_round("ssb.decide", [&](PartyCtx& ctx) {
        if (ctx.id() == sender) {
            ctx.set_output(m);
            return;
        }
        uint32_t echoes = 0;
        for (const auto& msg : ctx.inbox()) {
            if (msg.tag != kTagEcho) continue;
            ++echoes;
            if (msg.payload != cand[ctx.id()]) {
                ctx.abort(AbortReason::Equivocation);
                return;
            }
        }
        // Expect one echo from every other receiver; silence is an abort.
        if (echoes < n - 2) {
            ctx.abort(AbortReason::Timeout);
            return;
        }
        ctx.set_output(cand[ctx.id()]);
    });
}

void run_all_to_all_broadcast(Sim& sim, const std::vector<BitString>& inputs) {
    const uint32_t n = sim.n();
    assert(inputs.size() == n);
    uint64_t mb = std::max<uint64_t>(1, max_input_bits(inputs));
    sim.register_tag(kTagValue, "a2a.value", BudgetRule{mb, mb});

    sim.run_round("a2a.input", [&](PartyCtx& ctx) {
        for (PartyId r = 0; r < n; ++r)
            if (r != ctx.id()) ctx.send(r, kTagValue, inputs[ctx.id()]);
    });

    // Concatenation of all n slots, own input included; silent slots empty.
    std::vector<BitString> concat(n);
    sim.run_round("a2a.build", [&](PartyCtx& ctx) {
        std::map<PartyId, const BitString*> got;
        for (const auto& msg : ctx.inbox())
            if (msg.tag == kTagValue) got[msg.sender] = &msg.payload;
        BitWriter w;
        for (PartyId i = 0; i < n; ++i) {
            if (i == ctx.id())
                w.lp(inputs[i]);
            else if (auto it = got.find(i); it != got.end())
                w.lp(*it->second);
            else
                w.lp(BitString());
        }
        concat[ctx.id()] = w.take();
    });

    EqPhaseSpec eq;
    eq.step_prefix = "a2a";
    eq.challenge_tag = kTagChallenge;
    eq.verdict_tag = kTagVerdict;
    eq.flag_tag = kTagFlag;
    eq.challenge_targets = [n](PartyId i) {
        std::vector<PartyId> t;
        for (PartyId j = i + 1; j < n; ++j) t.push_back(j);
        return t;
    };
    eq.respond_pred = [](PartyId, PartyId) { return true; };
    eq.value_of = [&concat](PartyId i) -> const BitString& { return concat[i]; };
    eq.flag_targets = [n](PartyId i) {
        std::vector<PartyId> t;
        for (PartyId j = 0; j < n; ++j)
            if (j != i) t.push_back(j);
        return t;
    };
    run_equality_phase(sim, eq);

    sim.run_round("a2a.out", [&](PartyCtx& ctx) { ctx.set_output(concat[ctx.id()]); });
}

void run_all_to_all_gl(Sim& sim, const std::vector<BitString>& inputs) {
    const uint32_t n = sim.n();
    assert(inputs.size() == n);
    const uint32_t wi = std::max(1, ceil_log2(n));
    uint64_t mb = std::max<uint64_t>(1, max_input_bits(inputs));
    // One echo batch carries up to n-2 records of [origin][len][value].
    uint64_t batch = uint64_t(n) * (wi + 16 + mb);
    sim.register_tag(kTagValue, "gl.value", BudgetRule{mb, mb});
    sim.register_tag(kTagEcho, "gl.echo", BudgetRule{batch, batch});

    sim.run_round("gl.input", [&](PartyCtx& ctx) {
        for (PartyId r = 0; r < n; ++r)
            if (r != ctx.id()) ctx.send(r, kTagValue, inputs[ctx.id()]);
    });

    // direct[i][o] = the value party i received straight from origin o.
    std::vector<std::map<PartyId, BitString>> direct(n);
    sim.run_round("gl.echo", [&](PartyCtx& ctx) {
        for (const auto& msg : ctx.inbox())
            if (msg.tag == kTagValue) direct[ctx.id()][msg.sender] = msg.payload;
        for (PartyId r = 0; r < n; ++r) {
            if (r == ctx.id()) continue;
            BitWriter w;
            for (const auto& [o, v] : direct[ctx.id()]) {
                if (o == r) continue;
                w.u(o, wi);
                w.lp(v);
            }
            if (w.peek().size() > 0) ctx.send(r, kTagEcho, w.take());
        }
    });

    sim.run_round("gl.decide", [&](PartyCtx& ctx) {
        // echoes[o] = values other parties claim origin o sent, by echoer.
        std::map<PartyId, uint32_t> echo_count;
        bool bad = false;
        for (const auto& msg : ctx.inbox()) {
            if (msg.tag != kTagEcho) continue;
            BitReader r(msg.payload);
            while (r.ok() && r.remaining() > 0) {
                PartyId o = PartyId(r.u(wi));
                BitString v = r.lp();
                if (!r.ok() || o >= n || o == ctx.id() || o == msg.sender) {
                    bad = true;
                    break;
                }
                ++echo_count[o];
                auto it = direct[ctx.id()].find(o);
                if (it == direct[ctx.id()].end() || it->second != v) bad = true;
            }
            if (!r.ok()) bad = true;
            if (bad) break;
        }
        if (bad) {
            ctx.abort(AbortReason::Equivocation);
            return;
        }
        // Every origin we heard directly needs n-2 confirming echoes; origins
        // we never heard must not have echoes either (silence must be global).
        for (const auto& [o, v] : direct[ctx.id()]) {
            (void)v;
            if (echo_count[o] < n - 2) {
                ctx.abort(AbortReason::Timeout);
                return;
            }
        }
        for (const auto& [o, c] : echo_count) {
            (void)c;
            if (!direct[ctx.id()].count(o)) {
                ctx.abort(AbortReason::Equivocation);
                return;
            }
        }
        BitWriter w;
        for (PartyId i = 0; i < n; ++i) {
            if (i == ctx.id())
                w.lp(inputs[i]);
            else if (auto it = direct[ctx.id()].find(i); it != direct[ctx.id()].end())
                w.lp(it->second);
            else
                w.lp(BitString());
        }
        ctx.set_output(w.take());
    });
}

}  // namespace mpclab
