#include "mpclab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace mpclab {

namespace {

// Two-sided 95% t quantiles for 1..8 degrees of freedom; beyond that the
// normal quantile is close enough for a desk-scale fit.
constexpr double kT95[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306};

double t95(uint32_t dof) {
    if (dof == 0) return 0;
    if (dof <= 8) return kT95[dof - 1];
    return 1.96;
}

bool takes_inputs(const std::string& protocol) {
    return protocol == "all_to_all_broadcast" || protocol == "all_to_all_gl" ||
           protocol == "gossip" || protocol.rfind("mpc_", 0) == 0;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

uint64_t parse_u64(const std::string& s, const char* what) {
    size_t pos = 0;
    uint64_t v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("csv: bad ") + what + " value '" + s + "'");
    }
    if (pos != s.size())
        throw std::runtime_error(std::string("csv: bad ") + what + " value '" + s + "'");
    return v;
}

double parse_f64(const std::string& s, const char* what) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("csv: bad ") + what + " value '" + s + "'");
    }
    if (pos != s.size())
        throw std::runtime_error(std::string("csv: bad ") + what + " value '" + s + "'");
    return v;
}

std::string fmt_alpha(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", a);
    return buf;
}

// Origin `sender`'s value inside a serialized gossip transcript, if heard.
bool gossip_heard(const BitString& out, uint32_t n, PartyId sender, const BitString& msg) {
    BitReader r(out);
    uint64_t count = r.u(16);
    uint32_t wi = std::max<uint32_t>(1, ceil_log2(n));
    for (uint64_t k = 0; k < count && r.ok(); ++k) {
        uint64_t origin = r.u(wi);
        BitString val = r.lp();
        if (!r.ok()) return false;
        if (origin == sender) return val == msg;
    }
    return false;
}

}  // namespace

uint32_t ExperimentSpec::h_for(uint32_t n) const {
    if (h) return h;
    uint32_t v = uint32_t(std::lround(double(n) * h_ratio));
    if (v < 1) v = 1;
    if (v > n) v = n;
    return v;
}

ProtocolParams params_for(const ExperimentSpec& spec, uint32_t n) {
    ProtocolParams p;
    p.name = spec.protocol;
    p.sender = spec.sender;
    p.d_target = spec.d_target;
    p.skip_honest_twin = spec.skip_twin;
    if (spec.protocol == "single_source_broadcast" || spec.protocol == "strawman_broadcast")
        p.message = BitString::parse(spec.message);
    if (spec.protocol.rfind("mpc_", 0) == 0)
        p.f = make_function(spec.func, spec.in_bits, spec.out_bits, spec.depth,
                            spec.protocol == "mpc_multi_output");
    if (takes_inputs(spec.protocol)) {
        p.inputs.resize(n);
        if (spec.single_input && spec.protocol == "gossip") {
            if (spec.sender < n) p.inputs[spec.sender] = BitString::parse(spec.message);
        } else {
            for (uint32_t i = 0; i < n; ++i)
                p.inputs[i] =
                    fit_width(BitString::from_u64(uint64_t(i) * 37 + 5, 64), spec.in_bits);
        }
    }
    return p;
}

RunConfig config_for(const ExperimentSpec& spec, uint32_t n, uint64_t seed) {
    RunConfig cfg;
    cfg.n = n;
    cfg.h = spec.h_for(n);
    cfg.alpha = spec.alpha;
    cfg.lambda = spec.lambda;
    cfg.depth = spec.depth;
    cfg.seed = seed;
    cfg.cost = CostModel::defaults(spec.lambda, spec.depth);
    return cfg;
}

namespace {

struct Job {
    uint32_t n;
    uint64_t seed;
};

RunRow row_of(const ExperimentSpec& spec, uint32_t n, uint64_t seed, const RunReport& rep,
              uint64_t ms) {
    RunRow row;
    row.protocol = spec.protocol;
    row.n = n;
    row.h = spec.h_for(n);
    row.alpha = spec.alpha;
    row.lambda = spec.lambda;
    row.depth = spec.depth;
    row.seed = seed;
    row.total_bits = rep.total_bits;
    row.max_locality = rep.max_locality;
    row.aborted_honest_count = rep.aborted_honest;
    row.consistency_ok = rep.consistency_ok;
    row.wallclock_ms = ms;
    return row;
}

RunReport one_run(const ExperimentSpec& spec, uint32_t n, uint64_t seed) {
    ProtocolParams p = params_for(spec, n);
    RunConfig cfg = config_for(spec, n, seed);
    std::unique_ptr<Strategy> strat;
    if (!spec.strategy.empty()) strat = make_strategy(spec.strategy, spec.sopts);
    return run_protocol(cfg, p, strat.get());
}

}  // namespace

std::vector<RunRow> run_sweep(const ExperimentSpec& spec) {
    std::vector<Job> jobs;
    for (uint32_t n : spec.ns) {
        std::string why = validate_protocol_config(config_for(spec, n, spec.seed0),
                                                   params_for(spec, n));
        if (!why.empty()) {
            std::fprintf(stderr, "sweep: skipping %s n=%u: %s\n", spec.protocol.c_str(), n,
                         why.c_str());
            continue;
        }
        for (uint32_t s = 0; s < spec.seeds; ++s) jobs.push_back({n, spec.seed0 + s});
    }

    std::vector<RunRow> rows(jobs.size());
    uint32_t workers = spec.jobs ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<uint32_t>(workers, std::max<size_t>(jobs.size(), 1));

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            auto t0 = std::chrono::steady_clock::now();
            RunReport rep = one_run(spec, jobs[k].n, jobs[k].seed);
            auto t1 = std::chrono::steady_clock::now();
            uint64_t ms =
                uint64_t(std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
            rows[k] = row_of(spec, jobs[k].n, jobs[k].seed, rep, ms);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (uint32_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Jobs were generated in (n, seed) order already; keep the contract
    // explicit in case the grid ever gains more dimensions.
    std::stable_sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
        if (a.n != b.n) return a.n < b.n;
        return a.seed < b.seed;
    });
    return rows;
}

void write_csv(std::ostream& os, const std::vector<RunRow>& rows) {
    os << kCsvHeader << "\n";
    for (const RunRow& r : rows) {
        os << r.protocol << ',' << r.n << ',' << r.h << ',' << fmt_alpha(r.alpha) << ','
           << r.lambda << ',' << r.depth << ',' << r.seed << ',' << r.total_bits << ','
           << r.max_locality << ',' << r.aborted_honest_count << ',' << (r.consistency_ok ? 1 : 0)
           << ',' << r.wallclock_ms << "\n";
    }
}

std::vector<RunRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw std::runtime_error("csv: header mismatch, expected '" + std::string(kCsvHeader) +
                                 "'");
    std::vector<RunRow> rows;
    size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() != 12)
            throw std::runtime_error("csv: line " + std::to_string(lineno) + " has " +
                                     std::to_string(f.size()) + " fields, expected 12");
        RunRow r;
        r.protocol = f[0];
        r.n = uint32_t(parse_u64(f[1], "n"));
        r.h = uint32_t(parse_u64(f[2], "h"));
        r.alpha = parse_f64(f[3], "alpha");
        r.lambda = uint32_t(parse_u64(f[4], "lambda"));
        r.depth = uint32_t(parse_u64(f[5], "D"));
        r.seed = parse_u64(f[6], "seed");
        r.total_bits = parse_u64(f[7], "total_bits");
        r.max_locality = uint32_t(parse_u64(f[8], "max_locality"));
        r.aborted_honest_count = uint32_t(parse_u64(f[9], "aborted_honest_count"));
        uint64_t ok = parse_u64(f[10], "consistency_ok");
        if (ok > 1) throw std::runtime_error("csv: consistency_ok must be 0 or 1");
        r.consistency_ok = ok == 1;
        r.wallclock_ms = parse_u64(f[11], "wallclock_ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

FitResult fit_rows(const std::vector<RunRow>& rows, uint32_t polylog_k) {
    // Group by n.
    std::vector<uint32_t> ns;
    for (const RunRow& r : rows)
        if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    if (ns.size() < 3)
        throw std::runtime_error("fit: need rows from >= 3 distinct n, got " +
                                 std::to_string(ns.size()));

    FitResult fit;
    fit.polylog_k = polylog_k;
    fit.ns = ns;
    std::vector<double> xs, ys;
    for (uint32_t n : ns) {
        double sum = 0;
        uint64_t cnt = 0;
        for (const RunRow& r : rows)
            if (r.n == n) {
                sum += double(r.total_bits);
                ++cnt;
            }
        double mean = sum / double(cnt);
        fit.mean_bits.push_back(mean);
        double lg = std::log2(double(n));
        double corrected = mean / std::pow(lg, double(polylog_k));
        if (corrected <= 0) throw std::runtime_error("fit: non-positive corrected mean");
        xs.push_back(lg);
        ys.push_back(std::log2(corrected));
    }

    size_t m = xs.size();
    double xbar = 0, ybar = 0;
    for (size_t i = 0; i < m; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= double(m);
    ybar /= double(m);
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    if (sxx == 0) throw std::runtime_error("fit: degenerate grid (all n equal)");
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;

    double sse = 0;
    for (size_t i = 0; i < m; ++i) {
        double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        fit.residuals.push_back(e);
        sse += e * e;
    }
    fit.r2 = syy == 0 ? 1.0 : 1.0 - sse / syy;
    if (m > 2) {
        double se = std::sqrt(sse / double(m - 2) / sxx);
        double t = t95(uint32_t(m - 2));
        fit.ci_lo = fit.slope - t * se;
        fit.ci_hi = fit.slope + t * se;
    } else {
        fit.ci_lo = fit.ci_hi = fit.slope;
    }
    return fit;
}

std::string fit_to_json(const FitResult& fit) {
    nlohmann::json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["ci95"] = {fit.ci_lo, fit.ci_hi};
    j["r2"] = fit.r2;
    j["polylog_k"] = fit.polylog_k;
    j["n"] = fit.ns;
    j["mean_total_bits"] = fit.mean_bits;
    j["residuals"] = fit.residuals;
    return j.dump(2);
}

WilsonInterval wilson(uint32_t hits, uint32_t runs) {
    WilsonInterval w;
    if (runs == 0) return w;
    const double z = 1.959963985;  // 97.5% normal quantile
    double n = double(runs);
    double p = double(hits) / n;
    w.rate = p;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    w.lo = std::max(0.0, center - half);
    w.hi = std::min(1.0, center + half);
    return w;
}

AttackStats run_attack(const ExperimentSpec& spec) {
    if (spec.strategy.empty()) throw std::invalid_argument("attack: --strategy is required");
    AttackStats st;
    for (uint32_t n : spec.ns) {
        ProtocolParams p = params_for(spec, n);
        std::string why = validate_protocol_config(config_for(spec, n, spec.seed0), p);
        if (!why.empty()) {
            std::fprintf(stderr, "attack: skipping %s n=%u: %s\n", spec.protocol.c_str(), n,
                         why.c_str());
            continue;
        }
        for (uint32_t s = 0; s < spec.seeds; ++s) {
            RunReport rep = one_run(spec, n, spec.seed0 + s);
            ++st.runs;
            if (rep.aborted_honest > 0) ++st.honest_abort_runs;
            if (!rep.consistency_ok) ++st.violation_runs;

            PartyId t = spec.sopts.target;
            if (t >= n) continue;
            bool t_corrupted =
                std::binary_search(rep.corrupted.begin(), rep.corrupted.end(), t);
            if (t_corrupted || rep.outcomes[t].aborted) continue;
            bool wrong = false;
            if (spec.protocol == "gossip") {
                wrong = !gossip_heard(rep.outcomes[t].output, n, spec.sender,
                                      BitString::parse(spec.message));
            } else if (rep.expected_outputs.size() == 1) {
                wrong = !(rep.outcomes[t].output == rep.expected_outputs[0]);
            } else if (rep.expected_outputs.size() > t) {
                wrong = !(rep.outcomes[t].output == rep.expected_outputs[t]);
            }
            if (wrong) ++st.isolation_runs;
        }
    }
    st.abort_ci = wilson(st.honest_abort_runs, st.runs);
    st.violation_ci = wilson(st.violation_runs, st.runs);
    st.isolation_ci = wilson(st.isolation_runs, st.runs);
    return st;
}

std::string attack_to_json(const AttackStats& st, const ExperimentSpec& spec) {
    nlohmann::json j;
    j["protocol"] = spec.protocol;
    j["strategy"] = spec.strategy;
    j["n"] = spec.ns;
    j["seeds"] = spec.seeds;
    j["runs"] = st.runs;
    auto put = [&](const char* key, uint32_t hits, const WilsonInterval& w) {
        j[key] = {{"count", hits}, {"rate", w.rate}, {"wilson95", {w.lo, w.hi}}};
    };
    put("honest_abort", st.honest_abort_runs, st.abort_ci);
    put("consistency_violation", st.violation_runs, st.violation_ci);
    put("target_isolation", st.isolation_runs, st.isolation_ci);
    return j.dump(2);
}

}  // namespace mpclab
