#pragma once
// Sparse routing-network establishment and responsible gossip over it.
//
// sparse_network: every party samples ceil(d) out-neighbors (d = alpha * n *
// log2(n) / h), notifies them, and aborts if its in-degree exceeds 2d. The
// message graph is the union of both directions.
//
// gossip: synchronous flooding with conflict responsibility. Each party
// forwards each origin's rumor at most once; seeing two different values for
// one origin makes it warn its neighbors once and abort, and receiving a
// warning makes it forward the warning once and abort. Runs until quiescent,
// capped at n rounds.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpclab/netsim.hpp"

namespace mpclab {

struct RoutingGraph {
    double d = 0;  // real-valued degree target
    std::vector<std::vector<PartyId>> out;   // sampled out-neighborhoods
    std::vector<std::vector<PartyId>> nbrs;  // N_out union N_in, sorted
};

// Two rounds: notify, tally. Parties whose in-degree exceeds 2d abort with
// Threshold. Precondition (checked by the protocol entry points): h > log2 n.
RoutingGraph run_sparse_network(Sim& sim, double alpha, Tag notify_tag = 40);

struct GossipSpec {
    std::string step_prefix = "gossip";
    Tag rumor_tag = 41;
    uint32_t value_bits = 0;  // widest value a rumor may carry
    uint32_t max_rounds = 0;  // 0 means n
    // One entry per party; nullopt parties start nothing but still forward.
    std::vector<std::optional<BitString>> inputs;
    const RoutingGraph* graph = nullptr;
};

struct GossipResult {
    // heard[i]: origin -> accepted value (party i's own entry included).
    std::vector<std::map<PartyId, BitString>> heard;
    // Rumor records sent per party (the (k+1)*|N| forwarding-budget subject).
    std::vector<uint64_t> records_sent;
    uint32_t rounds = 0;
};

// Wire format, records batched per (sender, neighbor, round) into one message:
//   value record: [origin: ceil(log2 n)][0][len: 16][value]
//   warn  record: [origin: ceil(log2 n)][1]
GossipResult run_gossip(Sim& sim, const GossipSpec& spec);

}  // namespace mpclab
