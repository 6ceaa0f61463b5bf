#include "mpclab/netsim.hpp"

#include <algorithm>

namespace mpclab {

const char* abort_reason_name(AbortReason r) {
    switch (r) {
        case AbortReason::None: return "none";
        case AbortReason::Threshold: return "threshold";
        case AbortReason::Equality: return "equality";
        case AbortReason::PkMismatch: return "pk_mismatch";
        case AbortReason::OutputMismatch: return "output_mismatch";
        case AbortReason::Equivocation: return "equivocation";
        case AbortReason::Flood: return "flood";
        case AbortReason::Timeout: return "timeout";
        case AbortReason::Warned: return "warned";
        case AbortReason::SigReject: return "sig_reject";
        case AbortReason::DecryptFail: return "decrypt_fail";
        case AbortReason::OracleDenied: return "oracle_denied";
        case AbortReason::RoundLimit: return "round_limit";
    }
    return "?";
}

std::vector<PartyId> Strategy::choose_corrupted(uint32_t n, uint32_t h, RandomStream& env) {
    uint32_t t = n - h;
    return env.sample_subset(n, t, /*self=*/n);  // n = exclude nothing
}

uint32_t PartyCtx::n() const { return sim_.n(); }
int32_t PartyCtx::round() const { return sim_.round(); }
const RunConfig& PartyCtx::config() const { return sim_.config(); }
RandomStream& PartyCtx::rng() { return sim_.party_rng(id_); }
const std::vector<Message>& PartyCtx::inbox() const { return sim_.inbox_of(id_); }
void PartyCtx::send(PartyId to, Tag tag, BitString payload) {
    sim_.queue_send(id_, to, tag, std::move(payload));
}
void PartyCtx::abort(AbortReason reason) { sim_.abort_party(id_, reason, /*keep_sends=*/false); }
void PartyCtx::abort_after_send(AbortReason reason) {
    sim_.abort_party(id_, reason, /*keep_sends=*/true);
}
void PartyCtx::set_output(BitString out) { sim_.set_output(id_, std::move(out)); }

Sim::Sim(const RunConfig& cfg)
    : cfg_(cfg),
      adversary_rng_(cfg.seed, adversary_stream_id(cfg.n)),
      environment_rng_(cfg.seed, environment_stream_id(cfg.n)) {
    assert(cfg.valid());
    outcomes_.assign(cfg.n, Outcome{});
    abort_pending_.assign(cfg.n, 0);
    keep_sends_.assign(cfg.n, 0);
    corrupted_mask_.assign(cfg.n, 0);
    inbox_.resize(cfg.n);
    outbox_.resize(cfg.n);
    flow_.resize(cfg.n);
    party_rng_.reserve(cfg.n);
    for (uint32_t i = 0; i < cfg.n; ++i) party_rng_.emplace_back(cfg.seed, i);
    metrics_.reset(cfg.n, cfg.record_round_detail);
}

void Sim::set_adversary(std::vector<PartyId> corrupted, Strategy* strategy) {
    assert(corrupted.size() <= cfg_.n - cfg_.h);
    assert(std::is_sorted(corrupted.begin(), corrupted.end()));
    corrupted_ = std::move(corrupted);
    strategy_ = strategy;
    std::fill(corrupted_mask_.begin(), corrupted_mask_.end(), 0);
    for (PartyId i : corrupted_) {
        assert(i < cfg_.n);
        corrupted_mask_[i] = 1;
    }
}

void Sim::register_tag(Tag tag, const char* name, BudgetRule rule) {
    tags_[tag] = TagInfo{name, rule};
}

const char* Sim::tag_name(Tag tag) const {
    auto it = tags_.find(tag);
    return it == tags_.end() ? "?" : it->second.name.c_str();
}

void Sim::queue_send(PartyId from, PartyId to, Tag tag, BitString payload) {
    assert(from < cfg_.n && to < cfg_.n);
    assert(from != to && "self-sends are not a thing on this network");
    assert(tags_.count(tag) && "send with unregistered tag");
    assert(is_live(from) || abort_pending_[from]);
    Message m;
    m.sender = from;
    m.receiver = to;
    m.tag = tag;
    m.round = round_;
    m.payload = std::move(payload);
    outbox_[from].push_back(std::move(m));
}

void Sim::abort_party(PartyId i, AbortReason reason, bool keep_sends) {
    if (outcomes_[i].aborted || abort_pending_[i]) return;
    abort_pending_[i] = 1;
    keep_sends_[i] = keep_sends ? 1 : 0;
    outcomes_[i].reason = reason;
    outcomes_[i].abort_round = round_;
}

void Sim::set_output(PartyId i, BitString out) {
    outcomes_[i].output = std::move(out);
}

void Sim::run_round(const char* step, const std::function<void(PartyCtx&)>& behave) {
    // Phase 1: honest proposals, computed for corrupted parties too so the
    // adversary starts from the honest behavior and edits it.
    for (PartyId i = 0; i < cfg_.n; ++i) {
        if (!is_live(i)) continue;
        PartyCtx ctx(*this, i);
        behave(ctx);
    }

    // Phase 2: adversary rewrite with rushing visibility.
    if (strategy_ && !corrupted_.empty()) {
        AdvCtx actx{*this, round_, step, corrupted_, {}, {}, adversary_rng_};
        actx.outboxes.reserve(corrupted_.size());
        for (PartyId c : corrupted_) actx.outboxes.push_back(&outbox_[c]);
        for (PartyId i = 0; i < cfg_.n; ++i) {
            if (corrupted_mask_[i]) continue;
            for (const Message& m : outbox_[i])
                if (corrupted_mask_[m.receiver]) actx.incoming_to_corrupted.push_back(&m);
        }
        strategy_->rewrite(actx);
    }

    deliver_round();
}

void Sim::deliver_round() {
    for (auto& ib : inbox_) ib.clear();

    for (PartyId i = 0; i < cfg_.n; ++i) {
        bool drop = abort_pending_[i] && !keep_sends_[i];
        // A party that was already dead before this round queued nothing.
        for (Message& m : outbox_[i]) {
            if (drop) continue;
            PartyId r = m.receiver;
            uint64_t bits = m.payload.size();
            metrics_.charge(i, r, bits, round_, corrupted_mask_[i] != 0);
            if (outcomes_[r].aborted || abort_pending_[r]) continue;

            if (cfg_.enforce_budgets) {
                auto it = tags_.find(m.tag);
                // Unregistered tags never pass queue_send's assert for honest
                // code paths; adversarial injection of one is a flood.
                const BudgetRule* rule = it == tags_.end() ? nullptr : &it->second.rule;
                FlowBits& fb = flow_[r][flow_key(i, m.tag)];
                if (fb.last_round != uint32_t(round_)) {
                    fb.last_round = uint32_t(round_);
                    fb.round_bits = 0;
                }
                uint64_t rb = fb.round_bits += bits;
                uint64_t tb = fb.total_bits += bits;
                bool over = rule == nullptr ||
                            (rule->per_round_bits && rb > rule->per_round_bits) ||
                            (rule->cumulative_bits && tb > rule->cumulative_bits);
                if (over) {
                    // Receiver drops the flow and aborts; the bits were still
                    // sent (and charged) by the sender.
                    abort_pending_[r] = 1;
                    keep_sends_[r] = 0;
                    outcomes_[r].reason = AbortReason::Flood;
                    outcomes_[r].abort_round = round_;
                    continue;
                }
            }
            m.round = round_;
            inbox_[r].push_back(std::move(m));
        }
        outbox_[i].clear();
    }

    // Commit pending aborts after delivery so a warn-then-abort party's last
    // messages were already sent out above.
    for (PartyId i = 0; i < cfg_.n; ++i) {
        if (abort_pending_[i]) {
            outcomes_[i].aborted = true;
            abort_pending_[i] = 0;
            keep_sends_[i] = 0;
            inbox_[i].clear();
        }
    }
    ++round_;
}

void Sim::charge_virtual(PartyId from, PartyId to, uint64_t bits, int32_t round_hint) {
    metrics_.charge(from, to, bits, round_hint >= 0 ? round_hint : round_,
                    corrupted_mask_[from] != 0);
}

void Sim::oracle_denials(const char* func, const std::vector<PartyId>& participants) {
    if (!strategy_ || corrupted_.empty()) return;
    OracleCtx octx{func, participants, round_};
    auto denied = strategy_->oracle_deny(octx, adversary_rng_);
    for (PartyId d : denied) {
        if (d >= cfg_.n || corrupted_mask_[d]) continue;
        if (std::find(participants.begin(), participants.end(), d) == participants.end()) continue;
        if (!is_live(d)) continue;
        outcomes_[d].aborted = true;
        outcomes_[d].reason = AbortReason::OracleDenied;
        outcomes_[d].abort_round = round_;
        inbox_[d].clear();
    }
}

void Sim::finalize(AbortReason reason) {
    for (PartyId i = 0; i < cfg_.n; ++i) {
        if (!outcomes_[i].aborted && outcomes_[i].output.size() == 0) {
            outcomes_[i].aborted = true;
            outcomes_[i].reason = reason;
            outcomes_[i].abort_round = round_;
        }
    }
}

uint32_t Sim::live_count() const {
    uint32_t c = 0;
    for (auto& o : outcomes_)
        if (!o.aborted) ++c;
    return c;
}

std::vector<PartyId> Sim::live_parties() const {
    std::vector<PartyId> v;
    for (PartyId i = 0; i < cfg_.n; ++i)
        if (!outcomes_[i].aborted) v.push_back(i);
    return v;
}

}  // namespace mpclab
