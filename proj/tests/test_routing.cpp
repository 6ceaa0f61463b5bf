#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "mpclab/routing.hpp"

using namespace mpclab;

namespace {

RunConfig cfg_of(uint32_t n, uint32_t h, uint64_t seed = 1) {
    RunConfig cfg;
    cfg.n = n;
    cfg.h = h;
    cfg.seed = seed;
    return cfg;
}

constexpr Tag kNotify = 40;
constexpr Tag kRumor = 41;

GossipSpec spec_for(const RoutingGraph& g, uint32_t n, uint32_t value_bits) {
    GossipSpec gs;
    gs.value_bits = value_bits;
    gs.inputs.resize(n);
    gs.graph = &g;
    gs.rumor_tag = kRumor;
    return gs;
}

// Connectivity of the subgraph induced on `members` by g.nbrs, via union-find.
bool induced_connected(const RoutingGraph& g, const std::vector<PartyId>& members) {
    if (members.empty()) return true;
    std::vector<int32_t> comp(g.nbrs.size(), -1);
    for (size_t k = 0; k < members.size(); ++k) comp[members[k]] = int32_t(k);
    std::vector<int32_t> parent(members.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int32_t(int32_t)> find = [&](int32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (PartyId u : members)
        for (PartyId v : g.nbrs[u])
            if (comp[v] >= 0) parent[find(comp[u])] = find(comp[v]);
    int32_t root = find(0);
    for (size_t k = 1; k < members.size(); ++k)
        if (find(int32_t(k)) != root) return false;
    return true;
}

// Corrupted parties notify everybody, blowing honest in-degrees past 2d.
class NotifyStuffer : public Strategy {
  public:
    std::string name() const override { return "test_notify_stuffer"; }
    void rewrite(AdvCtx& ctx) override {
        if (std::string(ctx.step) != "net.notify") return;
        uint32_t n = ctx.sim.n();
        for (size_t k = 0; k < ctx.corrupted.size(); ++k) {
            PartyId c = ctx.corrupted[k];
            auto* ob = ctx.outboxes[k];
            ob->clear();
            for (PartyId r = 0; r < n; ++r)
                if (r != c) ob->push_back(Message{c, r, kNotify, 0, BitString::from_u64(1, 1)});
        }
    }
};

// Flips the first value bit of the initial rumor batch for odd receivers.
class RumorEquivocator : public Strategy {
  public:
    explicit RumorEquivocator(uint64_t value_bit_pos) : pos_(value_bit_pos) {}
    std::string name() const override { return "test_rumor_equivocator"; }
    void rewrite(AdvCtx& ctx) override {
        if (done_ || std::string(ctx.step) != "gossip.flood") return;
        for (auto* ob : ctx.outboxes)
            for (auto& m : *ob)
                if (m.receiver % 2 == 1 && pos_ < m.payload.size()) m.payload.flip_bit(pos_);
        done_ = true;
    }

  private:
    uint64_t pos_;
    bool done_ = false;
};

// Inflates one queued rumor message far past the per-edge budget.
class RumorFlooder : public Strategy {
  public:
    std::string name() const override { return "test_rumor_flooder"; }
    PartyId victim = kNoParty;
    static constexpr PartyId kNoParty = 0xffff;

    void rewrite(AdvCtx& ctx) override {
        if (victim != kNoParty || std::string(ctx.step) != "gossip.flood") return;
        for (auto* ob : ctx.outboxes) {
            for (auto& m : *ob) {
                BitString pad = RandomStream(5, 5).random_bits(m.payload.size() * 6 + 512);
                m.payload.append(pad);
                victim = m.receiver;
                return;
            }
        }
    }
};

// Sends a forged rumor record for its own origin directly to every
// non-neighbor. Graph neighbors are skipped: the sender will accept its own
// record back and re-forward it to them, and a second copy on those flows
// would blow the per-edge budget.
class DirectInjector : public Strategy {
  public:
    DirectInjector(uint32_t n, BitString value, std::vector<PartyId> skip)
        : n_(n), value_(std::move(value)), skip_(std::move(skip)) {}
    std::string name() const override { return "test_direct_injector"; }
    void rewrite(AdvCtx& ctx) override {
        if (done_ || std::string(ctx.step) != "gossip.flood") return;
        done_ = true;
        uint32_t wi = std::max(1, ceil_log2(n_));
        for (size_t k = 0; k < ctx.corrupted.size(); ++k) {
            PartyId c = ctx.corrupted[k];
            BitWriter w;
            w.u(c, wi);
            w.u(0, 1);
            w.lp(value_);
            BitString rec = w.take();
            for (PartyId r = 0; r < n_; ++r) {
                if (r == c || std::binary_search(skip_.begin(), skip_.end(), r)) continue;
                ctx.outboxes[k]->push_back(Message{c, r, kRumor, 0, rec});
            }
        }
    }

  private:
    uint32_t n_;
    BitString value_;
    std::vector<PartyId> skip_;
    bool done_ = false;
};

}  // namespace

TEST_CASE("sparse network: degree arithmetic and structure") {
    // n=256, h=64, alpha=2: d = 2*256*8/64 = 64 exactly.
    Sim sim(cfg_of(256, 64, 21));
    RoutingGraph g = run_sparse_network(sim, 2.0);
    CHECK(g.d == doctest::Approx(64.0));
    for (PartyId i = 0; i < 256; ++i) {
        CHECK(!sim.outcome(i).aborted);
        CHECK(g.out[i].size() == 64);
        // Sorted, unique, self-free, and within the 3d locality envelope.
        CHECK(std::is_sorted(g.nbrs[i].begin(), g.nbrs[i].end()));
        CHECK(std::adjacent_find(g.nbrs[i].begin(), g.nbrs[i].end()) == g.nbrs[i].end());
        CHECK(!std::binary_search(g.nbrs[i].begin(), g.nbrs[i].end(), i));
        CHECK(double(g.nbrs[i].size()) <= 3.0 * g.d + 1.0);
    }
    // The union graph is symmetric.
    for (PartyId i = 0; i < 256; ++i)
        for (PartyId j : g.nbrs[i]) CHECK(std::binary_search(g.nbrs[j].begin(), g.nbrs[j].end(), i));
    // Notify traffic: one bit per sampled edge.
    CHECK(sim.metrics().total() == 256 * 64);
}

TEST_CASE("sparse network: stuffed in-degree aborts every honest party") {
    // n=64, h=40, alpha=1: d = 9.6, threshold 19.2; 24 corrupted notifying
    // everyone already exceeds it.
    Sim sim(cfg_of(64, 40, 3));
    NotifyStuffer strat;
    std::vector<PartyId> corrupted;
    for (PartyId i = 40; i < 64; ++i) corrupted.push_back(i);
    sim.set_adversary(corrupted, &strat);
    RoutingGraph g = run_sparse_network(sim, 1.0);
    (void)g;
    for (PartyId i = 0; i < 40; ++i) {
        CHECK(sim.outcome(i).aborted);
        CHECK(sim.outcome(i).reason == AbortReason::Threshold);
    }
}

TEST_CASE("sparse network: honest runs stay abort-free and honest-connected") {
    uint32_t connected = 0;
    const uint32_t trials = 100;
    for (uint64_t seed = 1; seed <= trials; ++seed) {
        RunConfig cfg = cfg_of(128, 32, seed);
        Sim sim(cfg);
        RoutingGraph g = run_sparse_network(sim, 2.0);
        for (PartyId i = 0; i < 128; ++i) REQUIRE(!sim.outcome(i).aborted);
        // Induced subgraph on a random "honest" 32-subset chosen by the
        // environment, as an adversary would leave behind.
        auto honest = sim.environment_rng().sample_subset(128, 32, 128);
        if (induced_connected(g, honest)) ++connected;
    }
    CHECK(connected >= 99);
}

TEST_CASE("gossip: one rumor floods a dense graph in a few rounds") {
    RunConfig cfg = cfg_of(16, 8, 17);
    Sim sim(cfg);
    RoutingGraph g = run_sparse_network(sim, 2.0);  // d = 16: complete graph
    GossipSpec gs = spec_for(g, 16, 13);
    BitString v = BitString::from_u64(0x1abc, 13);
    gs.inputs[3] = v;
    GossipResult res = run_gossip(sim, gs);
    CHECK(res.rounds <= 4);
    for (PartyId i = 0; i < 16; ++i) {
        REQUIRE(!sim.outcome(i).aborted);
        REQUIRE(res.heard[i].count(3) == 1);
        CHECK(res.heard[i][3] == v);
        CHECK(res.records_sent[i] <= 2 * g.nbrs[i].size());
    }
}

TEST_CASE("gossip: flooding works across a genuinely sparse graph") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        RunConfig cfg = cfg_of(64, 32, seed);
        Sim sim(cfg);
        RoutingGraph g = run_sparse_network(sim, 2.0);  // d = 24
        GossipSpec gs = spec_for(g, 64, 8);
        BitString v = BitString::from_u64(0x5e, 8);
        gs.inputs[9] = v;
        GossipResult res = run_gossip(sim, gs);
        CHECK(res.rounds <= 8);
        for (PartyId i = 0; i < 64; ++i) {
            REQUIRE(!sim.outcome(i).aborted);
            REQUIRE(res.heard[i].count(9) == 1);
            CHECK(res.heard[i][9] == v);
        }
    }
}

TEST_CASE("gossip: every party spreads every origin within the record budget") {
    RunConfig cfg = cfg_of(24, 12, 29);
    Sim sim(cfg);
    RoutingGraph g = run_sparse_network(sim, 2.0);
    GossipSpec gs = spec_for(g, 24, 10);
    for (PartyId i = 0; i < 24; ++i) gs.inputs[i] = BitString::from_u64(0x200 + i, 10);
    GossipResult res = run_gossip(sim, gs);
    CHECK(res.rounds <= 24);
    for (PartyId i = 0; i < 24; ++i) {
        REQUIRE(!sim.outcome(i).aborted);
        for (PartyId o = 0; o < 24; ++o) {
            REQUIRE(res.heard[i].count(o) == 1);
            CHECK(res.heard[i][o] == *gs.inputs[o]);
        }
        CHECK(res.records_sent[i] <= uint64_t(24 + 1) * g.nbrs[i].size());
    }
}

TEST_CASE("gossip: an equivocated rumor aborts the whole component") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        RunConfig cfg = cfg_of(32, 16, seed);
        Sim sim(cfg);
        RoutingGraph g = run_sparse_network(sim, 2.0);  // d = 20: dense
        // Value bits start after [origin:5][warn:1][len:16].
        RumorEquivocator strat(5 + 1 + 16);
        sim.set_adversary({0}, &strat);
        GossipSpec gs = spec_for(g, 32, 8);
        gs.inputs[0] = BitString::from_u64(0xa5, 8);
        GossipResult res = run_gossip(sim, gs);
        CHECK(res.rounds <= 32);

        // No split-brain among live parties, and the warn cascade takes the
        // whole connected component down with it.
        bool have = false;
        BitString first;
        for (PartyId i = 1; i < 32; ++i) {
            const auto& oc = sim.outcome(i);
            if (oc.aborted) {
                CHECK((oc.reason == AbortReason::Equivocation || oc.reason == AbortReason::Warned));
                continue;
            }
            auto it = res.heard[i].find(0);
            if (it == res.heard[i].end()) continue;
            if (!have) {
                first = it->second;
                have = true;
            } else {
                CHECK(it->second == first);
            }
        }
        uint32_t honest_aborts = 0;
        for (PartyId i = 1; i < 32; ++i)
            if (sim.outcome(i).aborted) ++honest_aborts;
        CHECK(honest_aborts == 31);
        // The one warning per party keeps everything within the edge budget:
        // no flood aborts anywhere.
        for (PartyId i = 1; i < 32; ++i) CHECK(sim.outcome(i).reason != AbortReason::Flood);
    }
}

TEST_CASE("gossip: payload inflation floods out the receiver, bits still charged") {
    RunConfig cfg = cfg_of(16, 8, 31);
    Sim sim(cfg);
    RoutingGraph g = run_sparse_network(sim, 2.0);
    RumorFlooder strat;
    sim.set_adversary({3}, &strat);
    GossipSpec gs = spec_for(g, 16, 8);
    gs.inputs[3] = BitString::from_u64(0x42, 8);
    run_gossip(sim, gs);
    REQUIRE(strat.victim != RumorFlooder::kNoParty);
    CHECK(sim.outcome(strat.victim).aborted);
    CHECK(sim.outcome(strat.victim).reason == AbortReason::Flood);
    CHECK(sim.metrics().pair(3, strat.victim) > 0);
}

TEST_CASE("gossip: rumors from non-neighbors are accepted") {
    // The wire does not authenticate graph membership, so a corrupted party
    // can push its record to everyone directly; consistent values spread
    // without any conflict.
    RunConfig cfg = cfg_of(32, 16, 37);
    Sim sim(cfg);
    RoutingGraph g = run_sparse_network(sim, 1.0);  // d = 10: sparse
    BitString forged = BitString::from_u64(0x77, 8);
    DirectInjector strat(32, forged, g.nbrs[5]);
    sim.set_adversary({5}, &strat);
    GossipSpec gs = spec_for(g, 32, 8);
    gs.inputs[20] = BitString::from_u64(0x11, 8);  // one honest rumor too
    GossipResult res = run_gossip(sim, gs);
    for (PartyId i = 0; i < 32; ++i) {
        if (i == 5) continue;
        REQUIRE(!sim.outcome(i).aborted);
        REQUIRE(res.heard[i].count(5) == 1);
        CHECK(res.heard[i][5] == forged);
        CHECK(res.heard[i][20] == BitString::from_u64(0x11, 8));
    }
}
