#include "mpclab/phases.hpp"

#include <map>
#include <utility>

#include "mpclab/bigint.hpp"
#include "mpclab/primitives.hpp"

namespace mpclab {

bool inbox_has_flag(const PartyCtx& ctx, Tag flag_tag) {
    for (const auto& m : ctx.inbox())
        if (m.tag == flag_tag) return true;
    return false;
}

void run_equality_phase(Sim& sim, const EqPhaseSpec& spec) {
    const RunConfig& cfg = sim.config();
    const uint64_t base = cfg.n;  // detection error <= 1/n^lambda per test
    const uint64_t challenge_bits = 2ull * fingerprint_field_bits(base, cfg.lambda);

    const std::string s1 = spec.step_prefix + ".eq1";
    const std::string s2 = spec.step_prefix + ".eq2";
    const std::string s3 = spec.step_prefix + ".eq3";
    const std::string s4 = spec.step_prefix + ".eq4";
    const std::string t_challenge = spec.step_prefix + ".challenge";
    const std::string t_verdict = spec.step_prefix + ".verdict";
    const std::string t_flag = spec.step_prefix + ".flag";

    sim.register_tag(spec.challenge_tag, t_challenge.c_str(),
                     BudgetRule{challenge_bits, challenge_bits});
    sim.register_tag(spec.verdict_tag, t_verdict.c_str(), BudgetRule{1, 1});
    sim.register_tag(spec.flag_tag, t_flag.c_str(), BudgetRule{1, 1});

    const bool flags = !cfg.silent_abort;

    // Challenger bookkeeping: which responders each party is waiting on.
    std::vector<std::vector<PartyId>> waiting(cfg.n);

    auto flood_flags = [&](PartyCtx& ctx) {
        if (!flags) return;
        BitString flag = BitString::from_u64(1, 1);
        for (PartyId t : spec.flag_targets(ctx.id()))
            if (t != ctx.id()) ctx.send(t, spec.flag_tag, flag);
    };

    sim.run_round(s1.c_str(), [&](PartyCtx& ctx) {
        for (PartyId r : spec.challenge_targets(ctx.id())) {
            if (r == ctx.id()) continue;
            BigUint p = sample_prime(base, cfg.lambda, ctx.rng());
            BigUint res = mod_of_bits(spec.value_of(ctx.id()), p);
            waiting[ctx.id()].push_back(r);
            ctx.send(r, spec.challenge_tag, encode_equality_challenge(p, res, base, cfg.lambda));
        }
    });

    sim.run_round(s2.c_str(), [&](PartyCtx& ctx) {
        bool failed = false;
        for (const auto& m : ctx.inbox()) {
            if (m.tag != spec.challenge_tag) continue;
            if (!spec.respond_pred(ctx.id(), m.sender)) continue;
            EqualityChallenge ch = decode_equality_challenge(m.payload, base, cfg.lambda);
            bool equal =
                ch.valid && mod_of_bits(spec.value_of(ctx.id()), ch.prime) == ch.residue;
            ctx.send(m.sender, spec.verdict_tag, BitString::from_u64(equal ? 1 : 0, 1));
            if (!equal) failed = true;
        }
        if (failed) {
            flood_flags(ctx);
            ctx.abort_after_send(AbortReason::Equality);
        }
    });

    sim.run_round(s3.c_str(), [&](PartyCtx& ctx) {
        if (inbox_has_flag(ctx, spec.flag_tag)) {
            ctx.abort(AbortReason::Warned);
            return;
        }
        std::map<PartyId, bool> verdict;
        for (const auto& m : ctx.inbox())
            if (m.tag == spec.verdict_tag && m.payload.size() == 1)
                verdict[m.sender] = m.payload.bit(0);
        AbortReason why = AbortReason::None;
        for (PartyId r : waiting[ctx.id()]) {
            auto it = verdict.find(r);
            if (it == verdict.end()) {
                why = AbortReason::Timeout;  // responder silent or gone
            } else if (!it->second) {
                why = AbortReason::Equality;
                break;
            }
        }
        if (why != AbortReason::None) {
            flood_flags(ctx);
            ctx.abort_after_send(why);
        }
    });

    sim.run_round(s4.c_str(), [&](PartyCtx& ctx) {
        if (inbox_has_flag(ctx, spec.flag_tag)) ctx.abort(AbortReason::Warned);
    });
}

}  // namespace mpclab
