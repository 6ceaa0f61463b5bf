#pragma once
// Deterministic synchronous point-to-point network simulator.
//
// Execution model per round:
//   1. every live party's behavior callback runs in index order and queues
//      outgoing messages for delivery next round;
//   2. the adversary strategy (if any) may rewrite the outboxes of corrupted
//      parties, with a rushing view of this round's traffic addressed to
//      corrupted parties;
//   3. messages are delivered, metrics charged, and per-receiver budgets
//      enforced. A budget violation aborts the receiver, not the sender.
//
// There is no message loss and no reordering within a round; the only sources
// of nondeterminism are the seeded counter-based RNG streams.

#include <cassert>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpclab/bits.hpp"
#include "mpclab/cost_model.hpp"
#include "mpclab/rng.hpp"

namespace mpclab {

using PartyId = uint32_t;
using Tag = uint16_t;

enum class AbortReason : uint8_t {
    None = 0,
    Threshold,       // committee size check failed
    Equality,        // pairwise view comparison failed
    PkMismatch,      // inconsistent public key copies
    OutputMismatch,  // inconsistent protocol output copies
    Equivocation,    // conflicting rumors for one origin
    Flood,           // incoming traffic exceeded a declared budget
    Timeout,         // an expected message never arrived
    Warned,          // received an abort/warn flag from a peer
    SigReject,       // signature verification failed
    DecryptFail,     // ciphertext integrity check failed
    OracleDenied,    // functionality withheld this party's output
    RoundLimit,      // protocol hit its round bound without producing output
};

const char* abort_reason_name(AbortReason r);

struct Message {
    PartyId sender = 0;
    PartyId receiver = 0;
    Tag tag = 0;
    int32_t round = 0;  // round the message was sent; delivered at round+1
    BitString payload;
};

struct Outcome {
    bool aborted = false;
    AbortReason reason = AbortReason::None;
    int32_t abort_round = -1;
    BitString output;  // empty unless the party produced one
};

struct RunConfig {
    uint32_t n = 0;       // total parties
    uint32_t h = 0;       // guaranteed honest parties, 1 <= h <= n
    double alpha = 2.0;   // oversampling knob, >= 1
    uint32_t lambda = 8;  // statistical security parameter, >= 1
    uint32_t depth = 8;   // circuit depth driving crypto object sizes
    uint64_t seed = 1;
    CostModel cost = CostModel::defaults(8, 8);
    bool record_round_detail = false;
    // When true, failed checks abort silently instead of flooding warn flags.
    bool silent_abort = false;
    bool enforce_budgets = true;

    bool valid() const {
        return n >= 2 && h >= 1 && h <= n && alpha >= 1.0 && lambda >= 1 && depth >= 1 &&
               cost.valid();
    }
};

// Communication accounting. Pair totals are kept in a flat n*n matrix; the
// per-round breakdown is optional because it is large at gossip scale.
class CommMetrics {
  public:
    void reset(uint32_t n, bool detail) {
        n_ = n;
        detail_ = detail;
        total_ = honest_sent_ = adversary_sent_ = message_count_ = 0;
        pair_bits_.assign(size_t(n) * n, 0);
        round_detail_.clear();
    }

    void charge(PartyId s, PartyId r, uint64_t bits, int32_t round, bool sender_corrupted) {
        total_ += bits;
        (sender_corrupted ? adversary_sent_ : honest_sent_) += bits;
        ++message_count_;
        pair_bits_[size_t(s) * n_ + r] += bits;
        if (detail_) round_detail_[detail_key(s, r, round)] += bits;
    }

    uint64_t total() const { return total_; }
    uint64_t honest_sent() const { return honest_sent_; }
    uint64_t adversary_sent() const { return adversary_sent_; }
    uint64_t message_count() const { return message_count_; }
    uint64_t pair(PartyId s, PartyId r) const { return pair_bits_[size_t(s) * n_ + r]; }

    // Number of distinct counterparties party i exchanged at least one bit
    // with, in either direction.
    uint32_t locality(PartyId i) const {
        uint32_t deg = 0;
        for (PartyId j = 0; j < n_; ++j) {
            if (j == i) continue;
            if (pair(i, j) || pair(j, i)) ++deg;
        }
        return deg;
    }

    uint32_t max_locality() const {
        uint32_t m = 0;
        for (PartyId i = 0; i < n_; ++i) {
            uint32_t d = locality(i);
            if (d > m) m = d;
        }
        return m;
    }

    static uint64_t detail_key(PartyId s, PartyId r, int32_t round) {
        // n <= 4096 and rounds fit in 20 bits at every supported scale.
        return (uint64_t(uint32_t(round)) << 24) | (uint64_t(s) << 12) | r;
    }
    const std::unordered_map<uint64_t, uint64_t>& round_detail() const { return round_detail_; }

  private:
    uint32_t n_ = 0;
    bool detail_ = false;
    uint64_t total_ = 0, honest_sent_ = 0, adversary_sent_ = 0, message_count_ = 0;
    std::vector<uint64_t> pair_bits_;
    std::unordered_map<uint64_t, uint64_t> round_detail_;
};

// Per-tag traffic budgets, enforced per receiver against each (sender, tag)
// flow. A zero cap means "no limit" for that dimension.
struct BudgetRule {
    uint64_t per_round_bits = 0;
    uint64_t cumulative_bits = 0;
};

class Sim;

// Handle given to the per-party behavior callback.
class PartyCtx {
  public:
    PartyCtx(Sim& sim, PartyId id) : sim_(sim), id_(id) {}

    PartyId id() const { return id_; }
    uint32_t n() const;
    int32_t round() const;
    const RunConfig& config() const;
    RandomStream& rng();

    const std::vector<Message>& inbox() const;
    void send(PartyId to, Tag tag, BitString payload);

    // Abort now; messages already queued this round are discarded.
    void abort(AbortReason reason);
    // Abort after this round's queued messages go out (warn-then-stop).
    void abort_after_send(AbortReason reason);

    void set_output(BitString out);

  private:
    Sim& sim_;
    PartyId id_;
};

struct OracleCtx {
    const char* func = "";
    const std::vector<PartyId>& participants;
    int32_t round = 0;
};

// Adversary rewrite hook context. outboxes[k] aliases the queue of
// corrupted[k] for the current round and may be freely mutated; only
// corrupted parties' queues are exposed.
struct AdvCtx {
    Sim& sim;
    int32_t round;
    const char* step;
    const std::vector<PartyId>& corrupted;
    std::vector<std::vector<Message>*> outboxes;
    // Rushing view: this round's messages from non-corrupted senders to
    // corrupted receivers, visible before the rewrite commits.
    std::vector<const Message*> incoming_to_corrupted;
    RandomStream& rng;
};

class Strategy {
  public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;

    // Choose the corrupted set before round 0. Default: uniform among all
    // parties, size n-h.
    virtual std::vector<PartyId> choose_corrupted(uint32_t n, uint32_t h, RandomStream& env);

    // Replace corrupted parties' protocol inputs before the run.
    virtual void substitute_inputs(std::vector<BitString>& /*inputs*/,
                                   const std::vector<PartyId>& /*corrupted*/,
                                   RandomStream& /*rng*/) {}

    // Rewrite corrupted outboxes after honest proposals are queued.
    virtual void rewrite(AdvCtx& /*ctx*/) {}

    // Selective abort at a functionality call: return honest participants to
    // deny output to. Corrupted ids in the result are ignored.
    virtual std::vector<PartyId> oracle_deny(const OracleCtx& /*ctx*/, RandomStream& /*rng*/) {
        return {};
    }
};

class Sim {
  public:
    explicit Sim(const RunConfig& cfg);

    // Adversary wiring. corrupted must be sorted, unique, size <= n-h.
    void set_adversary(std::vector<PartyId> corrupted, Strategy* strategy);

    void register_tag(Tag tag, const char* name, BudgetRule rule);
    const char* tag_name(Tag tag) const;

    // Run one synchronous round. `step` is a stable label the adversary can
    // pattern-match on. behave runs for every live party in index order.
    void run_round(const char* step, const std::function<void(PartyCtx&)>& behave);

    // Charge bits for an oracle-mediated transfer (no queued message, no
    // budget check; attributed to the current round).
    void charge_virtual(PartyId from, PartyId to, uint64_t bits, int32_t round_hint = -1);

    // Consult the adversary's selective-abort hook for a functionality call;
    // aborts the denied honest participants with OracleDenied.
    void oracle_denials(const char* func, const std::vector<PartyId>& participants);

    // Mark every live party that never produced an output as aborted.
    void finalize(AbortReason reason = AbortReason::RoundLimit);

    const RunConfig& config() const { return cfg_; }
    uint32_t n() const { return cfg_.n; }
    int32_t round() const { return round_; }
    bool is_live(PartyId i) const { return !outcomes_[i].aborted; }
    bool is_corrupted(PartyId i) const { return corrupted_mask_[i] != 0; }
    const std::vector<PartyId>& corrupted() const { return corrupted_; }
    const Outcome& outcome(PartyId i) const { return outcomes_[i]; }
    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    CommMetrics& metrics() { return metrics_; }
    const CommMetrics& metrics() const { return metrics_; }

    RandomStream& party_rng(PartyId i) { return party_rng_[i]; }
    RandomStream& adversary_rng() { return adversary_rng_; }
    RandomStream& environment_rng() { return environment_rng_; }

    uint32_t live_count() const;
    std::vector<PartyId> live_parties() const;

    // Internal accessors used by PartyCtx.
    const std::vector<Message>& inbox_of(PartyId i) const { return inbox_[i]; }
    void queue_send(PartyId from, PartyId to, Tag tag, BitString payload);
    void abort_party(PartyId i, AbortReason reason, bool keep_sends);
    void set_output(PartyId i, BitString out);

  private:
    void deliver_round();

    RunConfig cfg_;
    int32_t round_ = 0;
    Strategy* strategy_ = nullptr;
    std::vector<PartyId> corrupted_;
    std::vector<uint8_t> corrupted_mask_;
    std::vector<Outcome> outcomes_;
    std::vector<uint8_t> abort_pending_;    // abort requested this round
    std::vector<uint8_t> keep_sends_;       // warn-then-abort flavor
    std::vector<std::vector<Message>> inbox_;
    std::vector<std::vector<Message>> outbox_;
    std::vector<RandomStream> party_rng_;
    RandomStream adversary_rng_;
    RandomStream environment_rng_;
    CommMetrics metrics_;

    struct TagInfo {
        std::string name;
        BudgetRule rule;
    };
    std::unordered_map<Tag, TagInfo> tags_;
    // Budget accounting per receiver: flow key = (sender, tag).
    static uint64_t flow_key(PartyId s, Tag t) { return (uint64_t(s) << 16) | t; }
    // Per-receiver budget counters keyed by (sender, tag). The round counter
    // resets lazily when a new round touches the entry; clearing maps between
    // rounds costs O(buckets) at gossip scale.
    struct FlowBits {
        uint64_t round_bits = 0;
        uint64_t total_bits = 0;
        uint32_t last_round = ~uint32_t(0);
    };
    std::vector<std::unordered_map<uint64_t, FlowBits>> flow_;
};

}  // namespace mpclab
