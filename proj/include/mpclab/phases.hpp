#pragma once
// The pairwise-verification motif shared by the broadcast, committee, and MPC
// protocols: challengers fingerprint their local value to responders, verdicts
// come back, failures flood a one-bit abort flag. Four rounds:
//   <prefix>.eq1   challenger sends [p-2 || residue]
//   <prefix>.eq2   responder replies 1-bit verdict; on mismatch floods flags
//                  and aborts
//   <prefix>.eq3   challenger evaluates verdicts (missing -> Timeout, 0 ->
//                  Equality), flags on failure; everyone absorbs flags
//   <prefix>.eq4   stragglers absorb the last flags
// Flag flooding is skipped in silent-abort mode (config.silent_abort).

#include <functional>
#include <string>
#include <vector>

#include "mpclab/netsim.hpp"

namespace mpclab {

struct EqPhaseSpec {
    std::string step_prefix;
    Tag challenge_tag = 0;
    Tag verdict_tag = 0;
    Tag flag_tag = 0;
    // Who party i challenges (empty when i does not participate). Lower-index
    // challengers are conventional but not required here; callers decide.
    std::function<std::vector<PartyId>(PartyId)> challenge_targets;
    // Whether `responder` answers a challenge from `challenger`; unreciprocated
    // challenges are ignored and the challenger times out.
    std::function<bool(PartyId responder, PartyId challenger)> respond_pred;
    // The value each party defends.
    std::function<const BitString&(PartyId)> value_of;
    // Receivers of the 1-bit abort flag a failing endpoint floods.
    std::function<std::vector<PartyId>(PartyId)> flag_targets;
};

// Registers the three tags with exact budgets (one challenge, one verdict,
// one flag per ordered pair) and runs the four rounds.
void run_equality_phase(Sim& sim, const EqPhaseSpec& spec);

// Absorb any abort flags present in the inbox (used by later rounds of
// protocols whose flags can straggle past the phase).
bool inbox_has_flag(const PartyCtx& ctx, Tag flag_tag);

}  // namespace mpclab
