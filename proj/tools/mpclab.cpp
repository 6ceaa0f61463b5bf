// mpclab: experiment runner for the protocol library.
//   run              one configuration, human-readable report
//   sweep            grid x seeds -> CSV (stable schema, deterministic rows)
//   attack           strategy campaign -> JSON success rates with Wilson CIs
//   fit              sweep CSV -> log-log slope JSON
//   list-protocols   registered protocol names
//   list-strategies  registered adversary strategies
// Exit codes: 0 ok, 2 config/usage error, 3 internal invariant violation.
// Config precedence: CLI flags > --config file (flat key=value) > defaults.
// MPCLAB_SEED overrides the default base seed when --seed is not given.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "mpclab/harness.hpp"

using namespace mpclab;

namespace {

// Options shared by run/sweep/attack. Every long name doubles as a config
// file key.
void add_common(CLI::App* sub, ExperimentSpec& spec) {
    sub->set_help_flag("--help", "print help");  // frees -h for --h
    sub->add_option("--protocol", spec.protocol, "protocol name (see list-protocols)");
    sub->add_option("--n", spec.ns, "party counts, comma separated")->delimiter(',');
    sub->add_option("--h", spec.h, "honest lower bound (overrides --h-ratio)");
    sub->add_option("--h-ratio", spec.h_ratio, "h as a fraction of n (default 0.5)");
    sub->add_option("--alpha", spec.alpha, "oversampling parameter (default 2)");
    sub->add_option("--lambda", spec.lambda, "security parameter (default 8)");
    sub->add_option("--depth", spec.depth, "circuit depth for the cost model (default 8)");
    sub->add_option("--seeds", spec.seeds, "seeds per grid point (default 1)");
    sub->add_option("--seed", spec.seed0, "base seed (default 1)")->envname("MPCLAB_SEED");
    sub->add_option("--f", spec.func, "function for mpc protocols (see docs; default xor)");
    sub->add_option("--in-bits", spec.in_bits, "input width per party (default 8)");
    sub->add_option("--out-bits", spec.out_bits, "output width (default 8)");
    sub->add_option("--strategy", spec.strategy, "adversary strategy (empty: all-honest)");
    sub->add_option("--target", spec.sopts.target, "victim party for targeted strategies");
    sub->add_flag("--targeted", spec.sopts.targeted, "output_forker: tamper only --target");
    sub->add_option("--flood-factor", spec.sopts.flood_factor, "flooder payload multiple");
    sub->add_option("--sender", spec.sender, "broadcast sender (default 0)");
    sub->add_option("--message", spec.message, "broadcast payload as 0/1 text");
    sub->add_option("--d-target", spec.d_target, "strawman neighborhood size (default 3)");
    sub->add_flag("--single-input", spec.single_input,
                  "gossip: only --sender starts a rumor (broadcast comparison)");
    sub->add_option("--jobs", spec.jobs, "worker threads (default: hardware)");
    sub->add_flag("--skip-twin", spec.skip_twin, "skip the all-honest twin run");
    sub->set_config("--config", "", "flat key=value config file");
}

int do_run(const ExperimentSpec& spec) {
    uint32_t n = spec.ns.empty() ? 64 : spec.ns.front();
    ProtocolParams p = params_for(spec, n);
    RunConfig cfg = config_for(spec, n, spec.seed0);
    std::string why = validate_protocol_config(cfg, p);
    if (!why.empty()) {
        std::cerr << "config error: " << why << "\n";
        return 2;
    }
    std::unique_ptr<Strategy> strat;
    if (!spec.strategy.empty()) strat = make_strategy(spec.strategy, spec.sopts);
    RunReport rep = run_protocol(cfg, p, strat.get());

    std::cout << "protocol          " << spec.protocol << "\n"
              << "n / h             " << n << " / " << cfg.h << "\n"
              << "alpha / lambda /D " << cfg.alpha << " / " << cfg.lambda << " / " << cfg.depth
              << "\n"
              << "seed              " << cfg.seed << "\n"
              << "strategy          " << (spec.strategy.empty() ? "(none)" : spec.strategy)
              << "\n"
              << "total_bits        " << rep.total_bits << "\n"
              << "honest_bits       " << rep.honest_bits << "\n"
              << "adversary_bits    " << rep.adversary_bits << "\n"
              << "messages          " << rep.message_count << "\n"
              << "max_locality      " << rep.max_locality << "\n"
              << "rounds            " << rep.rounds << "\n";
    if (rep.committee_size) std::cout << "committee_size    " << rep.committee_size << "\n";
    if (rep.degraded) std::cout << "degraded          sampling clipped at p=1\n";
    std::cout << "live honest       " << rep.live_honest << "\n"
              << "aborted honest    " << rep.aborted_honest << "\n";
    std::map<std::string, uint32_t> reasons;
    for (PartyId i = 0; i < n; ++i)
        if (rep.outcomes[i].aborted) ++reasons[abort_reason_name(rep.outcomes[i].reason)];
    for (const auto& [r, c] : reasons) std::cout << "  abort " << r << "  x" << c << "\n";
    if (!spec.strategy.empty())
        std::cout << "twin total_bits   " << rep.twin_total_bits << "\n"
                  << "twin max_locality " << rep.twin_max_locality << "\n";
    std::cout << "consistency_ok    " << (rep.consistency_ok ? "true" : "false") << "\n";
    return 0;
}

int do_sweep(const ExperimentSpec& spec, const std::string& out_path) {
    std::vector<RunRow> rows = run_sweep(spec);
    if (out_path.empty() || out_path == "-") {
        write_csv(std::cout, rows);
    } else {
        std::ofstream os(out_path);
        if (!os) {
            std::cerr << "cannot open " << out_path << " for writing\n";
            return 2;
        }
        write_csv(os, rows);
        std::cerr << "wrote " << rows.size() << " rows to " << out_path << "\n";
    }
    return 0;
}

int do_attack(const ExperimentSpec& spec) {
    AttackStats st = run_attack(spec);
    std::cout << attack_to_json(st, spec) << "\n";
    return 0;
}

int do_fit(const std::string& input, uint32_t polylog_k, const std::string& out_path) {
    std::ifstream is(input);
    if (!is) {
        std::cerr << "cannot open " << input << "\n";
        return 2;
    }
    FitResult fit = fit_rows(read_csv(is), polylog_k);
    std::string json = fit_to_json(fit);
    if (out_path.empty() || out_path == "-") {
        std::cout << json << "\n";
    } else {
        std::ofstream os(out_path);
        if (!os) {
            std::cerr << "cannot open " << out_path << " for writing\n";
            return 2;
        }
        os << json << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic MPC protocol experiments"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    std::string out_path;
    std::string fit_input;
    uint32_t polylog_k = 1;

    CLI::App* run = app.add_subcommand("run", "execute one configuration and print a report");
    add_common(run, spec);

    CLI::App* sweep = app.add_subcommand("sweep", "grid x seeds, write CSV");
    add_common(sweep, spec);
    sweep->add_option("--out", out_path, "CSV path ('-' or empty: stdout)");

    CLI::App* attack = app.add_subcommand("attack", "strategy campaign, print JSON stats");
    add_common(attack, spec);

    CLI::App* fit = app.add_subcommand("fit", "OLS slope on a sweep CSV, print JSON");
    fit->add_option("--input", fit_input, "sweep CSV path")->required();
    fit->add_option("--polylog-k", polylog_k, "divide bits by log2(n)^k before fitting");
    fit->add_option("--out", out_path, "JSON path ('-' or empty: stdout)");
    fit->set_config("--config", "", "flat key=value config file");

    CLI::App* lp = app.add_subcommand("list-protocols", "print registered protocols");
    CLI::App* ls = app.add_subcommand("list-strategies", "print registered strategies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (lp->parsed()) {
            for (const auto& name : protocol_names()) std::cout << name << "\n";
            return 0;
        }
        if (ls->parsed()) {
            for (const auto& name : strategy_names()) std::cout << name << "\n";
            return 0;
        }
        if (run->parsed()) return do_run(spec);
        if (sweep->parsed()) return do_sweep(spec, out_path);
        if (attack->parsed()) return do_attack(spec);
        if (fit->parsed()) return do_fit(fit_input, polylog_k, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
