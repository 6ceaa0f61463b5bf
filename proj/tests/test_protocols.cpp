#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mpclab/protocols.hpp"

using namespace mpclab;

namespace {

RunConfig cfg_of(uint32_t n, uint32_t h, double alpha = 2.0, uint64_t seed = 1) {
    RunConfig cfg;
    cfg.n = n;
    cfg.h = h;
    cfg.alpha = alpha;
    cfg.seed = seed;
    return cfg;
}

std::vector<BitString> byte_inputs(uint32_t n, uint64_t salt = 0) {
    std::vector<BitString> xs(n);
    for (uint32_t i = 0; i < n; ++i)
        xs[i] = BitString::from_u64((uint64_t(i) * 37 + salt * 11 + 5) & 0xff, 8);
    return xs;
}

BitString xor_of(const std::vector<BitString>& xs, uint32_t bits) {
    BitString acc(bits);
    for (const auto& x : xs)
        for (uint32_t b = 0; b < bits && b < x.size(); ++b)
            if (x.bit(b)) acc.flip_bit(b);
    return acc;
}

bool is_corrupted(const RunReport& rep, PartyId i) {
    return std::binary_search(rep.corrupted.begin(), rep.corrupted.end(), i);
}

// Silences every corrupted party from round 0 on.
struct Mute : Strategy {
    std::vector<PartyId> fixed;
    explicit Mute(std::vector<PartyId> who) : fixed(std::move(who)) {}
    std::string name() const override { return "mute"; }
    std::vector<PartyId> choose_corrupted(uint32_t, uint32_t, RandomStream&) override {
        return fixed;
    }
    void rewrite(AdvCtx& ctx) override {
        for (auto* ob : ctx.outboxes) ob->clear();
    }
};

// Substitutes a fixed input for every corrupted party, then behaves honestly.
struct FixedInput : Strategy {
    std::vector<PartyId> fixed;
    uint64_t value;
    FixedInput(std::vector<PartyId> who, uint64_t v) : fixed(std::move(who)), value(v) {}
    std::string name() const override { return "fixed_input"; }
    std::vector<PartyId> choose_corrupted(uint32_t, uint32_t, RandomStream&) override {
        return fixed;
    }
    void substitute_inputs(std::vector<BitString>& inputs, const std::vector<PartyId>& corrupted,
                           RandomStream&) override {
        for (PartyId c : corrupted) inputs[c] = BitString::from_u64(value, 8);
    }
};

// Flips the first bit of key material sent to odd receivers at one step.
struct PkForker : Strategy {
    std::string step;
    explicit PkForker(std::string s) : step(std::move(s)) {}
    std::string name() const override { return "pk_forker"; }
    void rewrite(AdvCtx& ctx) override {
        if (step != ctx.step) return;
        for (auto* ob : ctx.outboxes)
            for (Message& m : *ob)
                if (m.receiver % 2 == 1 && !m.payload.empty()) m.payload.flip_bit(0);
    }
};

// Corrupts party 0 (the designated output distributor when the whole clique
// is the committee) and tampers the signed pair addressed to one target.
struct PairTamperer : Strategy {
    PartyId target;
    explicit PairTamperer(PartyId t) : target(t) {}
    std::string name() const override { return "pair_tamperer"; }
    std::vector<PartyId> choose_corrupted(uint32_t, uint32_t, RandomStream&) override {
        return {0};
    }
    void rewrite(AdvCtx& ctx) override {
        if (std::string(ctx.step) != "mmo.deliver") return;
        for (auto* ob : ctx.outboxes)
            for (Message& m : *ob)
                if (m.receiver == target && !m.payload.empty()) m.payload.flip_bit(0);
    }
};

}  // namespace

TEST_CASE("registry lists twelve protocols and validation screens configs") {
    auto names = protocol_names();
    CHECK(names.size() == 12);

    ProtocolParams p;
    p.name = "no_such_protocol";
    CHECK(validate_protocol_config(cfg_of(8, 4), p) != "");

    p.name = "single_source_broadcast";
    p.message = BitString::parse("1011");
    CHECK(validate_protocol_config(cfg_of(8, 4), p) == "");
    p.sender = 9;
    CHECK(validate_protocol_config(cfg_of(8, 4), p) != "");
    p.sender = 0;
    p.message = BitString();
    CHECK(validate_protocol_config(cfg_of(8, 4), p) != "");

    // Sparse-network protocols need h > log2(n).
    p = ProtocolParams{};
    p.name = "sparse_network";
    CHECK(validate_protocol_config(cfg_of(64, 6), p) != "");
    CHECK(validate_protocol_config(cfg_of(64, 7), p) == "");

    // Function-arity screens.
    p = ProtocolParams{};
    p.name = "mpc_committee";
    CHECK(validate_protocol_config(cfg_of(16, 8), p) != "");  // no evaluator
    p.f = make_function("xor", 8, 8, 8, false);
    CHECK(validate_protocol_config(cfg_of(16, 8), p) == "");
    p.f = make_function("rotate", 8, 8, 8, true);
    CHECK(validate_protocol_config(cfg_of(16, 8), p) != "");  // multi-output rejected
    p.name = "mpc_multi_output";
    CHECK(validate_protocol_config(cfg_of(16, 8), p) == "");
    p.f = make_function("xor", 8, 8, 8, false);
    CHECK(validate_protocol_config(cfg_of(16, 8), p) != "");  // single-output rejected

    // Plaintext cap.
    p.name = "mpc_committee";
    p.f = make_function("xor", 2000, 8, 8, false);
    CHECK(validate_protocol_config(cfg_of(16, 8), p) != "");

    // Strawman needs a value distinguishable from the silent default.
    p = ProtocolParams{};
    p.name = "strawman_broadcast";
    p.message = BitString(6);
    CHECK(validate_protocol_config(cfg_of(16, 8), p) != "");
    p.message.set_bit(2, true);
    CHECK(validate_protocol_config(cfg_of(16, 8), p) == "");

    CHECK_THROWS_AS(run_protocol(cfg_of(8, 4), ProtocolParams{}, nullptr), std::invalid_argument);
}

TEST_CASE("single source broadcast through the driver: exact cost, agreement") {
    ProtocolParams p;
    p.name = "single_source_broadcast";
    p.sender = 2;
    p.message = BitString::parse("101101011101");  // 12 bits
    RunReport rep = run_protocol(cfg_of(8, 4), p, nullptr);

    // (n-1) fan-out messages plus (n-1)(n-2) echoes of the same length.
    CHECK(rep.total_bits == 7 * 12 + 7 * 6 * 12);
    CHECK(rep.message_count == 7 + 42);
    CHECK(rep.rounds <= protocol_round_bound(p.name, 8));
    CHECK(rep.consistency_ok);
    CHECK(rep.aborted_honest == 0);
    CHECK(rep.live_honest == 8);
    for (const auto& o : rep.outcomes) CHECK(o.output == p.message);
    // No adversary: the twin is the run itself.
    CHECK(rep.twin_total_bits == rep.total_bits);
    CHECK(rep.twin_max_locality == rep.max_locality);
}

TEST_CASE("all_to_all and gl drivers produce the identical slot concatenation") {
    auto inputs = byte_inputs(6);
    inputs[3] = BitString::parse("10");  // mixed widths
    ProtocolParams pa;
    pa.name = "all_to_all_broadcast";
    pa.inputs = inputs;
    ProtocolParams pg;
    pg.name = "all_to_all_gl";
    pg.inputs = inputs;

    RunReport ra = run_protocol(cfg_of(6, 3), pa, nullptr);
    RunReport rg = run_protocol(cfg_of(6, 3), pg, nullptr);
    CHECK(ra.consistency_ok);
    CHECK(rg.consistency_ok);
    CHECK(ra.aborted_honest == 0);
    CHECK(rg.aborted_honest == 0);
    CHECK(ra.outcomes[0].output == rg.outcomes[0].output);
    CHECK(ra.rounds <= protocol_round_bound(pa.name, 6));
    CHECK(rg.rounds <= protocol_round_bound(pg.name, 6));
    // The fingerprint variant beats the cubic baseline at these sizes already.
    CHECK(ra.total_bits < rg.total_bits);
}

TEST_CASE("committee_elect standalone: electee views agree, size is plausible") {
    ProtocolParams p;
    p.name = "committee_elect";
    RunReport rep = run_protocol(cfg_of(64, 32, 2.0, 7), p, nullptr);
    CHECK(rep.aborted_honest == 0);
    CHECK(rep.consistency_ok);
    CHECK(rep.rounds <= protocol_round_bound(p.name, 64));
    CHECK(!rep.degraded);  // p = 2*6/32 < 1
    CHECK(rep.committee_size >= 5);
    CHECK(rep.committee_size <= 55);
    uint32_t electees = 0;
    for (const auto& o : rep.outcomes)
        if (!o.output.empty() && o.output.bit(0)) ++electees;
    CHECK(electees == rep.committee_size);
}

TEST_CASE("sparse_network and gossip standalones run abort-free when honest") {
    ProtocolParams ps;
    ps.name = "sparse_network";
    RunReport rs = run_protocol(cfg_of(128, 32, 2.0, 3), ps, nullptr);
    CHECK(rs.aborted_honest == 0);
    CHECK(rs.consistency_ok);  // family has no cross-party contract
    CHECK(rs.rounds <= protocol_round_bound(ps.name, 128));

    ProtocolParams pg;
    pg.name = "gossip";
    pg.inputs = byte_inputs(64);
    RunReport rg = run_protocol(cfg_of(64, 16, 2.0, 3), pg, nullptr);
    CHECK(rg.aborted_honest == 0);
    CHECK(rg.consistency_ok);
    CHECK(rg.rounds <= protocol_round_bound(pg.name, 64));
    // Agreement means every live party serialized the same heard map, which
    // must cover all 64 origins.
    CHECK(rg.outcomes[0].output.read_bits(0, 16) == 64);
}

TEST_CASE("mpc_committee computes xor with zero honest aborts") {
    auto inputs = byte_inputs(64, 9);
    ProtocolParams p;
    p.name = "mpc_committee";
    p.f = make_function("xor", 8, 8, 8, false);
    p.inputs = inputs;
    RunConfig cfg = cfg_of(64, 32, 2.0, 11);
    cfg.lambda = 8;
    RunReport rep = run_protocol(cfg, p, nullptr);

    CHECK(rep.aborted_honest == 0);
    CHECK(rep.live_honest == 64);
    CHECK(rep.consistency_ok);
    CHECK(!rep.degraded);
    CHECK(rep.committee_size >= 5);
    CHECK(rep.rounds <= protocol_round_bound(p.name, 64));

    BitString expect = xor_of(inputs, 8);
    for (const auto& o : rep.outcomes) CHECK(o.output == expect);
    REQUIRE(rep.effective_inputs.size() == 64);
    for (size_t i = 0; i < 64; ++i) CHECK(rep.effective_inputs[i] == inputs[i]);
    REQUIRE(rep.expected_outputs.size() == 1);
    CHECK(rep.expected_outputs[0] == expect);
}

TEST_CASE("substituted inputs surface in effective inputs and the agreed output") {
    auto inputs = byte_inputs(16, 2);
    ProtocolParams p;
    p.name = "mpc_committee";
    p.f = make_function("xor", 8, 8, 8, false);
    p.inputs = inputs;
    FixedInput strat({1, 2}, 0xAA);
    RunReport rep = run_protocol(cfg_of(16, 8, 2.0, 5), p, &strat);

    CHECK(rep.aborted_honest == 0);
    CHECK(rep.consistency_ok);
    auto subbed = inputs;
    subbed[1] = BitString::from_u64(0xAA, 8);
    subbed[2] = BitString::from_u64(0xAA, 8);
    CHECK(rep.effective_inputs[1] == subbed[1]);
    CHECK(rep.effective_inputs[2] == subbed[2]);
    BitString expect = xor_of(subbed, 8);
    for (PartyId i = 0; i < 16; ++i) {
        if (is_corrupted(rep, i)) continue;
        CHECK(rep.outcomes[i].output == expect);
    }
    // The twin ran on the original inputs over the same seed, so it moved the
    // same number of bits (same election, same message sizes).
    CHECK(rep.twin_total_bits == rep.total_bits);
}

TEST_CASE("forked public keys abort the committee run, blaming the right step") {
    auto inputs = byte_inputs(32, 4);
    ProtocolParams p;
    p.name = "mpc_committee";
    p.f = make_function("xor", 8, 8, 8, false);
    p.inputs = inputs;
    PkForker strat("mpc.pk_forward");
    RunConfig cfg = cfg_of(32, 16, 4.0, 21);  // alpha clips p: everyone is a member
    RunReport rep = run_protocol(cfg, p, &strat);
    CHECK(rep.degraded);

    // Odd receivers saw one flipped copy among the real ones and abort with
    // PkMismatch. Even members then wait forever for their dead equality
    // partners, so the whole committee winds down without an output; what
    // matters is nobody finishes with a wrong one.
    CHECK(rep.consistency_ok);
    CHECK(rep.live_honest == 0);
    for (PartyId i = 0; i < 32; ++i) {
        const auto& o = rep.outcomes[i];
        CHECK(o.aborted);
        if (i % 2 == 1) CHECK(o.reason == AbortReason::PkMismatch);
    }
}

TEST_CASE("mpc_multi_output hands every party its own rotated slot") {
    const uint32_t n = 16;
    auto inputs = byte_inputs(n, 6);
    ProtocolParams p;
    p.name = "mpc_multi_output";
    p.f = make_function("rotate", 8, 8, 8, true);
    p.inputs = inputs;
    RunReport rep = run_protocol(cfg_of(n, 8, 2.0, 9), p, nullptr);

    CHECK(rep.aborted_honest == 0);
    CHECK(rep.consistency_ok);
    CHECK(rep.rounds <= protocol_round_bound(p.name, n));
    REQUIRE(rep.expected_outputs.size() == n);
    for (PartyId i = 0; i < n; ++i) {
        CHECK(rep.outcomes[i].output == inputs[(i + 1) % n]);
        CHECK(rep.expected_outputs[i] == inputs[(i + 1) % n]);
    }
}

TEST_CASE("a tampered signed pair hits only its target, with SigReject") {
    const uint32_t n = 16;
    auto inputs = byte_inputs(n, 8);
    ProtocolParams p;
    p.name = "mpc_multi_output";
    p.f = make_function("rotate", 8, 8, 8, true);
    p.inputs = inputs;
    PairTamperer strat(5);
    RunReport rep = run_protocol(cfg_of(n, 8, 2.0, 15), p, &strat);

    CHECK(rep.outcomes[5].aborted);
    CHECK(rep.outcomes[5].reason == AbortReason::SigReject);
    CHECK(rep.consistency_ok);
    for (PartyId i = 1; i < n; ++i) {
        if (i == 5) continue;
        CHECK(!rep.outcomes[i].aborted);
        CHECK(rep.outcomes[i].output == inputs[(i + 1) % n]);
    }
}

TEST_CASE("mpc_gossip evaluates xor over the flooded inputs, locality stays sparse") {
    const uint32_t n = 64;
    auto inputs = byte_inputs(n, 3);
    ProtocolParams p;
    p.name = "mpc_gossip";
    p.f = make_function("xor", 8, 8, 8, false);
    p.inputs = inputs;
    RunConfig cfg = cfg_of(n, 32, 2.0, 13);
    RunReport rep = run_protocol(cfg, p, nullptr);

    CHECK(rep.aborted_honest == 0);
    CHECK(rep.consistency_ok);
    CHECK(rep.rounds <= protocol_round_bound(p.name, n));
    BitString expect = xor_of(inputs, 8);
    for (const auto& o : rep.outcomes) CHECK(o.output == expect);
    REQUIRE(rep.effective_inputs.size() == n);
    for (size_t i = 0; i < n; ++i) CHECK(rep.effective_inputs[i] == inputs[i]);

    const double d = cfg.alpha * n * std::log2(double(n)) / cfg.h;  // 24
    CHECK(rep.max_locality <= uint32_t(3 * d) + 1);
}

TEST_CASE("mpc_local_tradeoff: sampled coverage reaches everyone when honest") {
    const uint32_t n = 256;
    auto inputs = byte_inputs(n, 12);
    ProtocolParams p;
    p.name = "mpc_local_tradeoff";
    p.f = make_function("xor", 8, 8, 8, false);
    p.inputs = inputs;
    RunConfig cfg = cfg_of(n, 100, 1.0, 17);
    RunReport rep = run_protocol(cfg, p, nullptr);

    CHECK(rep.aborted_honest == 0);  // nobody landed outside all cover sets
    CHECK(!rep.degraded);            // p = 8/10 stays a real coin
    CHECK(rep.consistency_ok);
    CHECK(rep.rounds <= protocol_round_bound(p.name, n));
    CHECK(rep.committee_size >= 150);
    CHECK(rep.committee_size <= 256);
    BitString expect = xor_of(inputs, 8);
    for (const auto& o : rep.outcomes) CHECK(o.output == expect);
}

TEST_CASE("strawman flood delivers to everyone in the honest case") {
    ProtocolParams p;
    p.name = "strawman_broadcast";
    p.sender = 0;
    p.d_target = 4;
    p.message = BitString::parse("1010011010100110");
    RunReport rep = run_protocol(cfg_of(64, 32, 2.0, 3), p, nullptr);
    CHECK(rep.aborted_honest == 0);
    CHECK(rep.consistency_ok);
    CHECK(rep.rounds <= protocol_round_bound(p.name, 64));
    for (const auto& o : rep.outcomes) CHECK(o.output == p.message);
}

TEST_CASE("the honest twin prices what the adversary suppressed") {
    ProtocolParams p;
    p.name = "single_source_broadcast";
    p.sender = 0;
    p.message = BitString::parse("101101011101");
    Mute strat({0});
    RunReport rep = run_protocol(cfg_of(8, 4, 2.0, 1), p, &strat);

    // A muted sender moves zero bits and times everyone out...
    CHECK(rep.total_bits == 0);
    CHECK(rep.live_honest == 0);
    CHECK(rep.aborted_honest == 7);
    for (PartyId i = 1; i < 8; ++i) CHECK(rep.outcomes[i].reason == AbortReason::Timeout);
    CHECK(rep.consistency_ok);  // vacuously: nobody finished
    // ...while the twin prices the honest schedule.
    CHECK(rep.twin_total_bits == 7 * 12 + 7 * 6 * 12);

    p.skip_honest_twin = true;
    RunReport rep2 = run_protocol(cfg_of(8, 4, 2.0, 1), p, &strat);
    CHECK(rep2.twin_total_bits == rep2.total_bits);
    CHECK(rep2.twin_total_bits == 0);
}
