#pragma once
// Committee self-election. Each party flips a bias-p coin; electees announce;
// everyone tallies announcements into its view C_i and aborts if the view hits
// the 2pn stuffing threshold (own coin not counted). Mutually-recognized
// electee pairs then fingerprint-compare serialized views, so a non-aborted
// run leaves all honest electees with identical member sets.
//
// The clique variant announces point-to-point with p = min(1, alpha*log2(n)/h).
// The local variant announces via gossip over the sparse routing graph with
// p = min(1, alpha*log2(n)/sqrt(h)).

#include <vector>

#include "mpclab/netsim.hpp"
#include "mpclab/routing.hpp"

namespace mpclab {

struct ElectionResult {
    double p = 0;
    bool clipped = false;                    // p hit 1: committee degenerates to [n]
    std::vector<uint8_t> elected;            // own coin, as flipped
    std::vector<std::vector<PartyId>> view;  // C_i: announcers party i heard, sorted
    std::vector<BitString> view_ser;         // serialize(C_i + self when elected)
    // Ground truth for downstream oracles: every party that appeared in at
    // least one view (honest electees always do).
    std::vector<PartyId> committee;
};

// Serialized committee view: sorted indices, fixed-width ceil(log2 n) bits.
BitString serialize_committee(const std::vector<PartyId>& members, uint32_t n);

// Clique election, 6 rounds (announce, tally, eq1..eq4). Tags used:
// tag_base .. tag_base+3.
ElectionResult run_committee_elect(Sim& sim, double alpha, Tag tag_base = 10);

// Gossip election over `graph`: announcements are empty-value rumors. Rounds:
// gossip rounds + tally + eq1..eq4. Tags used: tag_base .. tag_base+3.
ElectionResult run_local_committee_elect(Sim& sim, double alpha, const RoutingGraph& graph,
                                         Tag tag_base = 10);

}  // namespace mpclab
