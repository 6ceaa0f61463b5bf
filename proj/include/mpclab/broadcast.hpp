#pragma once
// Point-to-point broadcast emulations. All three run on the complete graph and
// either terminate with agreement among live honest parties or abort them.
//
//   single-source: sender fans out, receivers echo to each other, any
//                  disagreement or missing message aborts the receiver.
//   all-to-all:    everyone fans out its input, parties concatenate the n
//                  slots and fingerprint-check the concatenations pairwise
//                  (lower index challenges), failures flood one-bit flags.
//   all-to-all-gl: the cubic baseline, n parallel single-source broadcasts
//                  with per-origin echoes and no fingerprinting.

#include <vector>

#include "mpclab/netsim.hpp"

namespace mpclab {

// Sender distributes `m`; every live party ends with output m (the sender
// included) or aborts. 3 rounds.
void run_single_source_broadcast(Sim& sim, PartyId sender, const BitString& m);

// Every party contributes inputs[i]; live parties output the concatenation of
// all n values, each 16-bit length-prefixed, ascending party index. A party
// that stayed silent occupies an empty slot. 7 rounds.
void run_all_to_all_broadcast(Sim& sim, const std::vector<BitString>& inputs);

// Same output contract as run_all_to_all_broadcast, built from per-origin
// echoes instead of fingerprints. 3 rounds, cubic traffic.
void run_all_to_all_gl(Sim& sim, const std::vector<BitString>& inputs);

}  // namespace mpclab
