#include "mpclab/adversary.hpp"

#include <algorithm>
#include <stdexcept>

#include "mpclab/bits.hpp"

namespace mpclab {

namespace {

// Tags a strategy needs to speak the public wire contract. Mirrors the
// protocol drivers; the values are part of the on-wire format, not private.
constexpr Tag kTagElect = 10;
constexpr Tag kTagStrawValue = 45;

bool ends_with(const std::string& s, const char* suffix) {
    std::string_view sv(suffix);
    return s.size() >= sv.size() && s.compare(s.size() - sv.size(), sv.size(), sv) == 0;
}

uint32_t index_width(uint32_t n) { return std::max<uint32_t>(1, ceil_log2(n)); }

// Drops every queued message. The party still reads its inbox, so the run
// proceeds; everyone downstream just times out on the missing data.
class HonestButSilent : public Strategy {
  public:
    std::string name() const override { return "honest_but_silent"; }
    void rewrite(AdvCtx& ctx) override {
        for (auto* out : ctx.outboxes) out->clear();
    }
};

// Sends inconsistent copies: payloads to odd receivers get their last bit
// flipped, even receivers see the honest value. Flipping the tail avoids
// forging routed-record origin fields, so blame lands on the equivocator.
class Equivocator : public Strategy {
  public:
    std::string name() const override { return "equivocator"; }
    void rewrite(AdvCtx& ctx) override {
        for (auto* out : ctx.outboxes)
            for (Message& m : *out)
                if ((m.receiver & 1u) && m.payload.size() > 0)
                    m.payload.flip_bit(m.payload.size() - 1);
    }
};

// Inflates every queued payload with random bits to flood_factor times its
// size (at least 64 bits, capped around a megabit per message) so receivers
// blow their per-flow budgets.
class Flooder : public Strategy {
  public:
    explicit Flooder(uint64_t factor) : factor_(std::max<uint64_t>(2, factor)) {}
    std::string name() const override { return "flooder"; }
    void rewrite(AdvCtx& ctx) override {
        for (auto* out : ctx.outboxes)
            for (Message& m : *out) {
                size_t base = std::max<size_t>(m.payload.size(), 64);
                size_t want = std::min<size_t>(base * factor_, m.payload.size() + (size_t(1) << 20));
                while (m.payload.size() < want) {
                    size_t chunk = std::min<size_t>(64, want - m.payload.size());
                    m.payload.append_bits(ctx.rng.next_u64(), chunk);
                }
            }
    }

  private:
    uint64_t factor_;
};

// Tries to pack the committee. Against the clique election every corrupted
// party announces membership to everyone; against the local election it
// keeps injecting forged-origin announcement records into the gossip flood.
// Either the view threshold trips (abort) or the honest majority assumption
// inside the elected set is what the sampling math has to defend.
class CommitteeStuffer : public Strategy {
  public:
    std::string name() const override { return "committee_stuffer"; }
    void rewrite(AdvCtx& ctx) override {
        std::string step = ctx.step;
        uint32_t n = ctx.sim.config().n;
        if (step == "elect.announce") {
            BitString one = BitString::from_u64(1, 1);
            for (size_t k = 0; k < ctx.corrupted.size(); ++k) {
                auto* out = ctx.outboxes[k];
                out->clear();
                PartyId c = ctx.corrupted[k];
                for (PartyId r = 0; r < n; ++r)
                    if (r != c) out->push_back({c, r, kTagElect, ctx.round, one});
            }
            return;
        }
        if (step == "lce.flood") {
            // Empty-value announcement record: [origin][marker 0][len 0].
            uint32_t wi = index_width(n);
            for (size_t k = 0; k < ctx.corrupted.size(); ++k) {
                PartyId c = ctx.corrupted[k];
                for (uint32_t j = 0; j < 5; ++j) {
                    PartyId origin = PartyId((uint64_t(c) * 5 + j) % n);
                    BitWriter w;
                    w.u(origin, wi);
                    w.u(0, 1);
                    w.u(0, 16);
                    BitString rec = w.take();
                    for (PartyId r = 0; r < n; ++r)
                        if (r != c) ctx.outboxes[k]->push_back({c, r, kTagElect, ctx.round, rec});
                }
            }
        }
    }
};

// Splits the public-key agreement: odd receivers get the first payload bit
// flipped during key forwarding, so the two halves of the network see
// different keys and the cross-check aborts.
class PkForker : public Strategy {
  public:
    std::string name() const override { return "pk_forker"; }
    void rewrite(AdvCtx& ctx) override {
        if (!ends_with(ctx.step, ".pk_forward")) return;
        for (auto* out : ctx.outboxes)
            for (Message& m : *out)
                if ((m.receiver & 1u) && m.payload.size() > 0) m.payload.flip_bit(0);
    }
};

// Tampers with output forwarding. Untargeted: odd receivers get a flipped
// copy, forcing output cross-check aborts. Targeted: only `target`'s copy is
// altered and the corrupted set is the low-index block so the designated
// signer is corrupted whenever one exists.
class OutputForker : public Strategy {
  public:
    OutputForker(PartyId target, bool targeted) : target_(target), targeted_(targeted) {}
    std::string name() const override { return "output_forker"; }

    std::vector<PartyId> choose_corrupted(uint32_t n, uint32_t h, RandomStream& env) override {
        if (!targeted_) return Strategy::choose_corrupted(n, h, env);
        std::vector<PartyId> c;
        for (PartyId i = 0; i < n - h; ++i) c.push_back(i);
        return c;
    }

    void rewrite(AdvCtx& ctx) override {
        std::string step = ctx.step;
        if (!ends_with(step, ".out_forward") && step != "mmo.deliver") return;
        for (auto* out : ctx.outboxes)
            for (Message& m : *out) {
                bool hit = targeted_ ? (m.receiver == target_) : ((m.receiver & 1u) != 0);
                if (hit && m.payload.size() > 0) m.payload.flip_bit(0);
            }
    }

  private:
    PartyId target_;
    bool targeted_;
};

// Swaps corrupted parties' inputs for uniform random strings of the same
// width. The run must stay consistent: honest outputs must match the
// function applied to the substituted inputs.
class InputSubstituter : public Strategy {
  public:
    std::string name() const override { return "input_substituter"; }
    void substitute_inputs(std::vector<BitString>& inputs, const std::vector<PartyId>& corrupted,
                           RandomStream& rng) override {
        for (PartyId c : corrupted) {
            if (c >= inputs.size() || inputs[c].size() == 0) continue;
            size_t w = inputs[c].size();
            BitString fresh;
            while (fresh.size() < w) {
                size_t chunk = std::min<size_t>(64, w - fresh.size());
                fresh.append_bits(rng.next_u64(), chunk);
            }
            inputs[c] = fresh;
        }
    }
};

// Corrupts everyone except the sender, the target, and h-2 bystanders, then
// feeds the target the bitwise inverse of the true message while suppressing
// real copies on corrupted->target edges. Quiescent flooding accepts
// whichever copy lands first, so a sparse honest neighborhood around the
// target loses the race; rumor spreading with per-edge receipts does not.
class IsolationAttacker : public Strategy {
  public:
    IsolationAttacker(PartyId target, BitString true_message)
        : target_(target), true_message_(std::move(true_message)) {}
    std::string name() const override { return "isolation_attacker"; }

    std::vector<PartyId> choose_corrupted(uint32_t n, uint32_t h, RandomStream& env) override {
        std::vector<uint8_t> honest(n, 0);
        honest[0] = 1;
        uint32_t have = 1;
        if (target_ < n && !honest[target_]) {
            honest[target_] = 1;
            ++have;
        }
        std::vector<PartyId> pool;
        for (PartyId i = 0; i < n; ++i)
            if (!honest[i]) pool.push_back(i);
        while (have < h && !pool.empty()) {
            size_t j = size_t(env.uniform(pool.size()));
            honest[pool[j]] = 1;
            pool[j] = pool.back();
            pool.pop_back();
            ++have;
        }
        std::vector<PartyId> corr;
        for (PartyId i = 0; i < n; ++i)
            if (!honest[i]) corr.push_back(i);
        return corr;
    }

    void rewrite(AdvCtx& ctx) override {
        std::string step = ctx.step;
        if (step == "straw.forward") {
            BitString lie = true_message_;
            lie.invert();
            for (size_t k = 0; k < ctx.outboxes.size(); ++k) {
                auto* out = ctx.outboxes[k];
                // Replace any real value headed to the target, and always race
                // a forged copy in; first delivery wins under quiescent flooding.
                out->erase(std::remove_if(out->begin(), out->end(),
                                          [&](const Message& m) {
                                              return m.receiver == target_ && m.tag == kTagStrawValue;
                                          }),
                           out->end());
                out->push_back({ctx.corrupted[k], target_, kTagStrawValue, ctx.round, lie});
            }
            return;
        }
        if (ends_with(step, ".flood")) {
            // Rumor records carry [origin][marker][len][value]; flip the first
            // value bit of anything headed to the target. Receipts and origin
            // checks make this self-defeating, which is the point.
            uint32_t wi = index_width(ctx.sim.config().n);
            for (auto* out : ctx.outboxes)
                for (Message& m : *out) {
                    if (m.receiver != target_) continue;
                    if (m.payload.size() > wi + 17)
                        m.payload.flip_bit(wi + 17);
                    else if (m.payload.size() > 0)
                        m.payload.flip_bit(m.payload.size() - 1);
                }
            return;
        }
        for (auto* out : ctx.outboxes)
            for (Message& m : *out)
                if (m.receiver == target_ && m.payload.size() > 0)
                    m.payload.flip_bit(m.payload.size() - 1);
    }

  private:
    PartyId target_;
    BitString true_message_;
};

}  // namespace

std::vector<std::string> strategy_names() {
    return {"honest_but_silent", "equivocator",       "flooder",
            "committee_stuffer", "pk_forker",         "output_forker",
            "input_substituter", "isolation_attacker"};
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const StrategyOpts& opts) {
    if (name == "honest_but_silent") return std::make_unique<HonestButSilent>();
    if (name == "equivocator") return std::make_unique<Equivocator>();
    if (name == "flooder") return std::make_unique<Flooder>(opts.flood_factor);
    if (name == "committee_stuffer") return std::make_unique<CommitteeStuffer>();
    if (name == "pk_forker") return std::make_unique<PkForker>();
    if (name == "output_forker") return std::make_unique<OutputForker>(opts.target, opts.targeted);
    if (name == "input_substituter") return std::make_unique<InputSubstituter>();
    if (name == "isolation_attacker")
        return std::make_unique<IsolationAttacker>(opts.target, opts.true_message);
    throw std::invalid_argument("unknown strategy: " + name);
}

}  // namespace mpclab
