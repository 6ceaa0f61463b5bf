#pragma once
// Trusted-party oracles with faithful bit charging. The real cryptographic
// machinery they stand in for (threshold FHE, NIZKs) is out of scope; what is
// modeled exactly is (a) input/output behavior including malformed-input
// defaults and selective abort, and (b) how many bits the stand-in protocol
// would have cost, charged onto the participants' pairwise channels.

#include <functional>
#include <string>
#include <vector>

#include "mpclab/crypto_model.hpp"
#include "mpclab/netsim.hpp"
#include "mpclab/primitives.hpp"

namespace mpclab {

struct FunctionSpec {
    std::string name;
    uint32_t in_bits = 8;   // per input slot
    uint32_t out_bits = 8;  // per output slot
    uint32_t depth = 8;
    bool multi_output = false;
    // Pure evaluator: takes one input per slot (already width-normalized),
    // returns one output (single-output) or one per slot (multi-output).
    std::function<std::vector<BitString>(const std::vector<BitString>&)> eval;
};

// Named function library: xor, and_tree, const0, identity, rotate.
// rotate is multi-output only (y_i = x_{i+1 mod m}); identity is y = x_0 for
// single-output and y_i = x_i for multi-output.
FunctionSpec make_function(const std::string& name, uint32_t in_bits, uint32_t out_bits,
                           uint32_t depth, bool multi_output);
std::vector<std::string> function_names();

// Zero-pad or truncate to exactly `bits`.
BitString fit_width(const BitString& s, size_t bits);

// Closed-form charges.
//
// The setup charge models one simultaneous-broadcast among the |C| live
// participants, each contributing a blob of poly_in = B_pk + B_ct*l_in +
// B_proof bits: full exchange plus pairwise equality tests over the
// concatenated transcripts (the lambda log-factor term).
uint64_t sb_poly_in(const CostModel& cost, uint64_t ell_in_bits);
uint64_t sb_broadcast_bits(uint32_t c_live, uint64_t ell_in_bits, uint32_t lambda,
                           const CostModel& cost, uint32_t c_sb = 1);
// Output charge: ell_out * |C| * (B_share + B_proof).
uint64_t oracle_output_bits(uint64_t ell_out_bits, uint32_t c_live, const CostModel& cost);

class IdealOracle {
  public:
    IdealOracle(Sim& sim, const CostModel& cost, SignatureRegistry& registry)
        : sim_(sim), cost_(cost), registry_(registry) {}

    struct GenResult {
        BitString pk;           // public half, for every surviving participant
        int handle = -1;        // oracle-held secret key
        uint64_t charged = 0;   // broadcast_bits, spread over live pairs
    };

    // F_Gen: every live participant contributes lambda bits from its own
    // stream, the oracle keys off the XOR. kind "enc" gives a PKE pair, "sig"
    // a signature pair. Applies the adversary's selective-abort hook.
    GenResult f_gen(const std::vector<PartyId>& participants, uint32_t lambda, bool sig_kind,
                    const char* label);

    struct CompResult {
        BitString y;
        std::vector<BitString> effective_inputs;  // per slot, post-decryption
        std::vector<PartyId> receivers;           // live participants served
        uint64_t charged = 0;
    };

    // F_Comp: decrypts one ciphertext per slot (empty or malformed decrypts to
    // the all-zero input), evaluates f, charges the output bits, applies
    // selective abort, and returns y for delivery to every receiver.
    CompResult f_comp(int gen_handle, const std::vector<PartyId>& participants,
                      const std::vector<BitString>& slot_cts, const FunctionSpec& f,
                      const char* label);

    struct CompSignResult {
        // Per slot: (ct'_i, sigma_i); empty pair for slots denied or dead.
        std::vector<std::pair<BitString, BitString>> out;
        std::vector<BitString> effective_inputs;
        BitString sig_vk;
        PartyId designated = 0;  // lowest-indexed live participant
        bool have_designated = false;
        uint64_t charged = 0;
    };

    // F_Comp,Sign: slot_cts[i] decrypts to x_i, key_cts[i] to the symmetric
    // key k_i (missing or malformed entries default to all-zero); outputs y_i
    // encrypted under k_i and signed over [slot index || ct'_i] so a swapped
    // pair cannot verify.
    CompSignResult f_comp_sign(int enc_handle, int sig_handle,
                               const std::vector<PartyId>& participants,
                               const std::vector<BitString>& slot_cts,
                               const std::vector<BitString>& key_cts, const FunctionSpec& f,
                               const char* label);

    const CostModel& cost() const { return cost_; }
    SignatureRegistry& registry() { return registry_; }

  private:
    struct Secret {
        bool sig_kind = false;
        BitString pk, sk;
    };

    // Spread `bits` uniformly over ordered live-participant pairs (remainder
    // to the first pairs). A lone participant charges nothing: there is no
    // channel to put the bits on.
    void charge_pairs(const std::vector<PartyId>& live, uint64_t bits);
    std::vector<PartyId> live_of(const std::vector<PartyId>& participants) const;

    Sim& sim_;
    CostModel cost_;
    SignatureRegistry& registry_;
    std::vector<Secret> secrets_;
};

}  // namespace mpclab
