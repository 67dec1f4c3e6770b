// Command-line front end: case generation, single solves, parameter sweeps,
// model-size audits, loop-count reports and solution validation.

#include "opsf/bench.hpp"
#include "opsf/casegen.hpp"
#include "opsf/radiality.hpp"
#include "opsf/validator.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace opsf;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

Network load_case(const std::string& network_file, int copies, std::uint64_t seed,
                  double risk_variance) {
    if (!network_file.empty()) return parse_network(network_file);
    CaseSpec spec;
    spec.copies = copies;
    spec.seed = seed;
    spec.risk_variance = risk_variance;
    return build_multicopy_case(spec);
}

void print_notes(const Network& net, const BlockPartition& part) {
    for (const auto& note : structural_notes(net, part)) std::cout << "note: " << note << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal power shut-off solver and radiality-formulation benchmark"};
    app.require_subcommand(1);

    std::string backend_name = "highs";
    double time_limit = 300.0;
    int workers = 1;
    std::string out_dir = ".";
    app.add_option("--backend", backend_name, "MILP backend name")->capture_default_str();
    app.add_option("--time-limit", time_limit, "per-solve time limit in seconds")
        ->capture_default_str();
    double mip_gap = 0.0;
    app.add_option("--mip-gap", mip_gap, "relative MIP gap (0 proves optimality)")
        ->capture_default_str();
    app.add_option("--workers", workers, "parallel sweep workers")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory for sweep artifacts")
        ->capture_default_str();

    // gen-case
    auto* gen = app.add_subcommand("gen-case", "generate a multi-copy test case");
    int gen_copies = 1;
    std::uint64_t gen_seed = 1;
    double gen_variance = 0.25;
    std::string gen_out = "case.json";
    gen->add_option("--copies", gen_copies, "number of feeder copies")->capture_default_str();
    gen->add_option("--seed", gen_seed, "risk-profile seed")->capture_default_str();
    gen->add_option("--risk-variance", gen_variance, "per-line risk variance")
        ->capture_default_str();
    gen->add_option("--out", gen_out, "output file")->capture_default_str();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve one shut-off instance");
    std::string solve_network;
    int solve_copies = 1;
    std::uint64_t solve_seed = 1;
    std::string formulation = "abstracted-pc";
    double alpha = 0.5;
    double gamma = 1e-6;
    int max_iter = 1000;
    std::size_t max_cycles = 1000000;
    double max_enum_seconds = 600.0;
    bool no_certificate = false;
    std::string solve_out;
    solve_cmd->add_option("--network", solve_network, "network JSON file (otherwise generated)");
    solve_cmd->add_option("--copies", solve_copies, "copies when generating")->capture_default_str();
    solve_cmd->add_option("--seed", solve_seed, "seed when generating")->capture_default_str();
    solve_cmd
        ->add_option("--formulation", formulation,
                     "original-pc | abstracted-pc | naive-loop | iterative-loop")
        ->capture_default_str();
    solve_cmd->add_option("--alpha", alpha, "risk/load trade-off in [0,1]")->capture_default_str();
    solve_cmd->add_option("--gamma", gamma, "switch penalty (iterative only)")
        ->capture_default_str();
    solve_cmd->add_option("--max-iter", max_iter, "iteration cap (iterative only)")
        ->capture_default_str();
    solve_cmd->add_option("--max-cycles", max_cycles, "loop enumeration cap")
        ->capture_default_str();
    solve_cmd->add_option("--max-enum-seconds", max_enum_seconds, "loop enumeration time cap")
        ->capture_default_str();
    solve_cmd->add_flag("--no-gamma-certificate", no_certificate,
                        "report the penalized optimum instead of re-optimizing at gamma=0");
    solve_cmd->add_option("--out", solve_out, "write the solution JSON here");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "alpha/seed sweep across strategies");
    int sweep_copies = 1;
    std::vector<double> sweep_alphas;
    std::vector<std::uint64_t> sweep_seeds;
    std::vector<std::string> sweep_strategies;
    double sweep_gamma = 1e-6;
    sweep_cmd->add_option("--copies", sweep_copies, "copies per case")->capture_default_str();
    sweep_cmd->add_option("--alphas", sweep_alphas, "alpha values (default 0..1 step 0.1)");
    sweep_cmd->add_option("--seeds", sweep_seeds, "seeds (default 1..10)");
    sweep_cmd->add_option("--strategies", sweep_strategies,
                          "subset of the four formulations (default all)");
    sweep_cmd->add_option("--gamma", sweep_gamma, "switch penalty for iterative-loop")
        ->capture_default_str();

    // audit-sizes
    auto* audit_cmd = app.add_subcommand("audit-sizes", "radiality model-size audit");
    std::vector<int> audit_copies = {1, 2, 4};
    audit_cmd->add_option("--copies", audit_copies, "copy counts to audit")->capture_default_str();

    // report-loops
    auto* loops_cmd = app.add_subcommand("report-loops", "loop counts per case");
    std::vector<int> loops_copies = {1, 2};
    std::size_t loops_max_cycles = 1000000;
    double loops_max_seconds = 600.0;
    loops_cmd->add_option("--copies", loops_copies, "copy counts")->capture_default_str();
    loops_cmd->add_option("--max-cycles", loops_max_cycles, "enumeration cap")
        ->capture_default_str();
    loops_cmd->add_option("--max-enum-seconds", loops_max_seconds, "enumeration time cap")
        ->capture_default_str();

    // validate
    auto* val_cmd = app.add_subcommand("validate", "check a solution file against a network");
    std::string val_network, val_solution;
    val_cmd->add_option("--network", val_network, "network JSON file")->required();
    val_cmd->add_option("--solution", val_solution, "solution JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            CaseSpec spec;
            spec.copies = gen_copies;
            spec.seed = gen_seed;
            spec.risk_variance = gen_variance;
            Network net = build_multicopy_case(spec);
            write_network(net, gen_out);
            BlockPartition part = compute_load_blocks(net);
            NetworkStats st = network_stats(net, part);
            std::cout << "wrote " << gen_out << ": " << st.n_nodes << " nodes, " << st.n_lines
                      << " lines, " << st.n_switches << " switches, " << st.n_blocks
                      << " blocks, " << st.n_substations << " substation(s)\n";
            print_notes(net, part);
            return 0;
        }

        if (solve_cmd->parsed()) {
            Network net = load_case(solve_network, solve_copies, solve_seed, 0.25);
            RadialityStrategy strategy;
            strategy.kind = strategy_from_string(formulation);
            strategy.gamma = gamma;
            strategy.max_iter = max_iter;
            strategy.caps = {max_cycles, max_enum_seconds};
            strategy.gamma_free_certificate = !no_certificate;
            OpsfConfig cfg;
            cfg.alpha = alpha;
            SolveOptions options;
            options.time_limit_s = time_limit;
            options.mip_gap = mip_gap;
            auto backend = make_backend(backend_name);
            Solution sol = solve_with_strategy(net, cfg, strategy, *backend, options);

            BlockPartition part = compute_load_blocks(net);
            AbstractNetwork abs_net = build_abstract_network(net, part);
            OpsfConfig check_cfg = cfg;
            check_cfg.gamma = sol.gamma;
            ValidationReport report = check_solution(net, part, abs_net, sol, check_cfg);

            std::cout << "strategy " << sol.meta.strategy << ", objective " << sol.objective_value
                      << " (risk term " << sol.risk_term() << ", load term " << sol.load_term()
                      << ", penalty " << sol.penalty_term() << ")\n"
                      << "energized blocks " << sol.energized_blocks.size() << "/"
                      << part.blocks.size() << ", closed switches " << sol.closed_switches.size()
                      << "/" << net.switch_count() << ", solve " << sol.meta.solve_seconds
                      << " s\n";
            if (strategy.kind == StrategyKind::iterative_loop)
                std::cout << "iterations " << sol.meta.iterations << ", loops generated "
                          << sol.meta.loops_generated << "\n";
            std::cout << "validator: " << (report.clean() ? "clean" : "violations found") << "\n";
            if (!solve_out.empty()) write_solution(sol, solve_out);
            return report.clean() ? 0 : 1;
        }

        if (sweep_cmd->parsed()) {
            SweepSpec spec;
            spec.copies = sweep_copies;
            if (!sweep_alphas.empty()) spec.alphas = sweep_alphas;
            if (!sweep_seeds.empty()) spec.seeds = sweep_seeds;
            if (!sweep_strategies.empty()) {
                spec.strategies.clear();
                for (const auto& s : sweep_strategies)
                    spec.strategies.push_back(strategy_from_string(s));
            }
            spec.gamma = sweep_gamma;
            spec.time_limit_s = time_limit;
            spec.mip_gap = mip_gap;
            spec.workers = workers;
            spec.backend = backend_name;
            SweepResult result = run_sweep(spec);

            CaseSpec cs;
            cs.copies = spec.copies;
            cs.seed = spec.seeds.front();
            std::uint64_t case_hash = content_hash(network_to_json(build_multicopy_case(cs)));

            fs::path dir(out_dir);
            write_file(dir / "sweep.csv", sweep_records_csv(result.records));
            write_file(dir / "sweep_meta.json", sweep_sidecar_json(spec, result, case_hash));

            std::cout << "records: " << result.records.size() << "\n";
            for (const auto& t : result.timings)
                std::cout << t.strategy << " alpha=" << t.alpha << " median " << t.median_s
                          << " s, min " << t.min_s << " s, max " << t.max_s << " s\n";
            std::cout << "equivalence max relative gap: " << result.max_equivalence_gap << "\n";
            if (!result.all_validated) {
                std::cerr << "hard check failed: some optimal solutions did not validate\n";
                return 1;
            }
            if (!result.equivalence_ok) {
                std::cerr << "hard check failed: strategies disagree beyond 1e-6\n";
                return 1;
            }
            return 0;
        }

        if (audit_cmd->parsed()) {
            auto rows = audit_model_sizes(audit_copies);
            std::cout << size_audit_csv(rows);
            std::cout << "predicted counts equal built counts for every case\n";
            return 0;
        }

        if (loops_cmd->parsed()) {
            auto rows = report_loops(loops_copies, {loops_max_cycles, loops_max_seconds});
            std::cout << loop_report_csv(rows);
            return 0;
        }

        if (val_cmd->parsed()) {
            Network net = parse_network(val_network);
            Solution sol = read_solution(val_solution);
            BlockPartition part = compute_load_blocks(net);
            AbstractNetwork abs_net = build_abstract_network(net, part);
            OpsfConfig cfg;
            cfg.alpha = sol.alpha;
            cfg.gamma = sol.gamma;
            ValidationReport report = check_solution(net, part, abs_net, sol, cfg);
            std::cout << report_to_json(report);
            print_notes(net, part);
            return report.clean() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
