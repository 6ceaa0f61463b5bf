#pragma once
// End-to-end protocol drivers and the registry the harness dispatches on.
//
// Every protocol runs inside one Sim and leaves per-party Outcomes behind. The
// report separates the primary (possibly adversarial) run from its all-honest
// twin: the twin runs with the same seed and no adversary, and its totals are
// what cost sweeps report, per the metrics contract.
//
// Registry names:
//   single_source_broadcast  all_to_all_broadcast  all_to_all_gl
//   committee_elect          local_committee_elect
//   sparse_network           gossip                strawman_broadcast
//   mpc_committee            mpc_multi_output      mpc_gossip
//   mpc_local_tradeoff

#include <string>
#include <vector>

#include "mpclab/idealfunc.hpp"
#include "mpclab/netsim.hpp"

namespace mpclab {

struct ProtocolParams {
    std::string name;
    FunctionSpec f;                 // MPC protocols
    std::vector<BitString> inputs;  // one per party where the protocol takes inputs
    PartyId sender = 0;             // single_source_broadcast, strawman_broadcast
    BitString message;              // value the sender distributes
    uint32_t d_target = 3;          // strawman neighborhood size
    bool skip_honest_twin = false;  // suppress the twin run (attack-only studies)
};

struct RunReport {
    std::vector<Outcome> outcomes;      // primary run
    std::vector<PartyId> corrupted;     // sorted; empty for honest runs
    uint64_t total_bits = 0;        // primary run totals
    uint64_t message_count = 0;
    uint32_t max_locality = 0;
    uint64_t honest_bits = 0;
    uint64_t adversary_bits = 0;
    uint32_t rounds = 0;

    uint64_t twin_total_bits = 0;  // all-honest twin (equals primary when honest)
    uint32_t twin_max_locality = 0;

    uint32_t committee_size = 0;  // ground truth where a committee exists
    bool degraded = false;        // an election probability clipped to 1

    // Agreement among live honest outputs plus, where a reference exists,
    // equality with the plain evaluator on the effective inputs.
    bool consistency_ok = true;
    uint32_t aborted_honest = 0;
    uint32_t live_honest = 0;

    std::vector<BitString> effective_inputs;  // at the functionality boundary
    std::vector<BitString> expected_outputs;  // reference outputs (family-specific)
};

// Empty string when the configuration is runnable for this protocol; otherwise
// a human-readable reason (unknown name, h too small, width overflow, ...).
std::string validate_protocol_config(const RunConfig& cfg, const ProtocolParams& params);

// Runs the protocol (and its twin unless suppressed) and evaluates the
// consistency contract. Throws std::invalid_argument when
// validate_protocol_config rejects.
RunReport run_protocol(const RunConfig& cfg, const ProtocolParams& params, Strategy* strategy);

std::vector<std::string> protocol_names();

// Protocol family round bounds (sanity checks for tests; n = party count).
uint32_t protocol_round_bound(const std::string& name, uint32_t n);

}  // namespace mpclab
