#pragma once
// Experiment runner behind the mpclab CLI: single runs, seed sweeps over a
// grid of n, slope fitting on the resulting CSVs, and attack campaigns.
// Everything except wallclock_ms is deterministic for a fixed invocation.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mpclab/adversary.hpp"
#include "mpclab/protocols.hpp"

namespace mpclab {

struct ExperimentSpec {
    std::string protocol = "mpc_committee";
    std::vector<uint32_t> ns = {64};  // grid over n; other knobs are scalar
    uint32_t h = 0;                   // 0: derive from h_ratio
    double h_ratio = 0.5;
    double alpha = 2.0;
    uint32_t lambda = 8;
    uint32_t depth = 8;
    uint32_t seeds = 1;     // seeds per grid point
    uint64_t seed0 = 1;     // first seed; runs use seed0 .. seed0+seeds-1
    std::string func = "xor";
    uint32_t in_bits = 8;
    uint32_t out_bits = 8;
    std::string strategy;   // empty: all-honest
    StrategyOpts sopts;
    PartyId sender = 0;
    std::string message = "10110011";  // broadcast payload, as 0/1 text
    uint32_t d_target = 3;
    // Gossip only: start a single rumor (the sender's message) instead of one
    // value per party. This is the broadcast-comparison shape.
    bool single_input = false;
    uint32_t jobs = 0;      // worker threads; 0: hardware concurrency
    bool skip_twin = false;

    uint32_t h_for(uint32_t n) const;
};

// One CSV row. The column set and order is the stable public schema.
struct RunRow {
    std::string protocol;
    uint32_t n = 0;
    uint32_t h = 0;
    double alpha = 0;
    uint32_t lambda = 0;
    uint32_t depth = 0;
    uint64_t seed = 0;
    uint64_t total_bits = 0;
    uint32_t max_locality = 0;
    uint32_t aborted_honest_count = 0;
    bool consistency_ok = true;
    uint64_t wallclock_ms = 0;
};

inline const char* kCsvHeader =
    "protocol,n,h,alpha,lambda,D,seed,total_bits,max_locality,"
    "aborted_honest_count,consistency_ok,wallclock_ms";

// Builds the per-run protocol parameters the sweep uses (deterministic
// per-party inputs, function spec, broadcast payload). Exposed so the
// acceptance suite drives runs with identical settings.
ProtocolParams params_for(const ExperimentSpec& spec, uint32_t n);
RunConfig config_for(const ExperimentSpec& spec, uint32_t n, uint64_t seed);

// Executes the full grid x seed sweep on a worker pool. Rows come back
// sorted by (n, seed) regardless of scheduling. Grid points that fail
// validation are skipped with a note on stderr.
std::vector<RunRow> run_sweep(const ExperimentSpec& spec);

void write_csv(std::ostream& os, const std::vector<RunRow>& rows);
// Parses a sweep CSV; throws std::runtime_error on any schema violation.
std::vector<RunRow> read_csv(std::istream& is);

struct FitResult {
    double slope = 0;
    double intercept = 0;   // on log2(bits) after polylog correction
    double ci_lo = 0;       // 95% confidence interval on the slope
    double ci_hi = 0;
    double r2 = 0;
    uint32_t polylog_k = 0;
    std::vector<uint32_t> ns;        // grid points, ascending
    std::vector<double> mean_bits;   // mean total_bits per point, uncorrected
    std::vector<double> residuals;   // per-point OLS residuals
};

// OLS of log2(mean total_bits / log2(n)^k) against log2(n). Needs rows from
// >= 3 distinct n. Throws std::runtime_error otherwise.
FitResult fit_rows(const std::vector<RunRow>& rows, uint32_t polylog_k);
std::string fit_to_json(const FitResult& fit);

struct WilsonInterval {
    double rate = 0;
    double lo = 0;
    double hi = 0;
};
// 95% Wilson score interval for hits/runs.
WilsonInterval wilson(uint32_t hits, uint32_t runs);

struct AttackStats {
    uint32_t runs = 0;
    uint32_t honest_abort_runs = 0;   // >= 1 honest party aborted
    uint32_t violation_runs = 0;      // consistency check failed
    uint32_t isolation_runs = 0;      // target finished with a wrong value
    WilsonInterval abort_ci;
    WilsonInterval violation_ci;
    WilsonInterval isolation_ci;
};

// Runs `spec.seeds` attacked runs at each grid n (usually one) and tallies
// outcomes. Isolation is measured against spec.sopts.target and the expected
// output of each run's family.
AttackStats run_attack(const ExperimentSpec& spec);
std::string attack_to_json(const AttackStats& st, const ExperimentSpec& spec);

}  // namespace mpclab
