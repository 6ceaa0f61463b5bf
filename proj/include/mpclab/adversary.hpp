#pragma once
// Named adversary strategies for the attack harness. Every strategy is
// protocol-generic: it keys on the stable step labels and the public wire
// contract (tags, record layouts), never on driver internals, so the same
// strategy object can be thrown at any protocol in the registry.

#include <memory>
#include <string>
#include <vector>

#include "mpclab/netsim.hpp"

namespace mpclab {

struct StrategyOpts {
    uint64_t flood_factor = 4;  // payload inflation multiple for flooder
    PartyId target = 1;         // victim for the targeted strategies
    bool targeted = false;      // output_forker: tamper only `target`'s copy
    BitString true_message;     // isolation_attacker feeds its bitwise inverse
};

// honest_but_silent, equivocator, flooder, committee_stuffer, pk_forker,
// output_forker, input_substituter, isolation_attacker.
std::vector<std::string> strategy_names();

// Factory for the named strategies. Throws std::invalid_argument on unknown
// names. The returned object holds no per-run state and can be reused.
std::unique_ptr<Strategy> make_strategy(const std::string& name, const StrategyOpts& opts = {});

}  // namespace mpclab
