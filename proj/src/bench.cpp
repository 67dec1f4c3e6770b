#include "opsf/bench.hpp"

#include "opsf/validator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace opsf {

namespace {

struct Cell {
    StrategyKind strategy;
    double alpha;
    std::uint64_t seed;
};

SweepRecord run_cell(const Network& net, const Cell& cell, const SweepSpec& spec,
                     MilpBackend& backend) {
    SweepRecord rec;
    rec.strategy = to_string(cell.strategy);
    rec.alpha = cell.alpha;
    rec.seed = cell.seed;

    OpsfConfig cfg;
    cfg.alpha = cell.alpha;

    RadialityStrategy strategy;
    strategy.kind = cell.strategy;
    strategy.gamma = spec.gamma;
    strategy.max_iter = spec.max_iter;
    strategy.caps = spec.caps;

    SolveOptions options;
    options.time_limit_s = spec.time_limit_s;
    options.mip_gap = spec.mip_gap;

    try {
        Solution sol = solve_with_strategy(net, cfg, strategy, backend, options);
        rec.status = "optimal";
        rec.objective = sol.objective_value;
        rec.risk_served = sol.risk_served;
        rec.load_served = sol.load_served;
        rec.solve_seconds = sol.meta.solve_seconds;
        rec.iterations = sol.meta.iterations;
        rec.loops_generated = sol.meta.loops_generated;
        rec.model_constraints = sol.meta.model_constraints;
        rec.model_binaries = sol.meta.model_binaries;
        rec.model_continuous = sol.meta.model_continuous;

        BlockPartition part = compute_load_blocks(net);
        AbstractNetwork abs_net = build_abstract_network(net, part);
        OpsfConfig check_cfg = cfg;
        check_cfg.gamma = sol.gamma;
        rec.validator_clean = check_solution(net, part, abs_net, sol, check_cfg).clean();
    } catch (const EnumerationIntractable& e) {
        rec.status = std::string("enumeration-intractable");
    } catch (const IterationLimitError& e) {
        rec.status = std::string("iteration-limit");
    } catch (const SolveError& e) {
        rec.status = std::string("error:") + e.what();
    }
    return rec;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    // Cases depend only on the seed; build one network per seed up front.
    std::map<std::uint64_t, Network> cases;
    for (auto seed : spec.seeds) {
        CaseSpec cs;
        cs.copies = spec.copies;
        cs.seed = seed;
        cases.emplace(seed, build_multicopy_case(cs));
    }

    std::vector<Cell> cells;
    for (const auto& strategy : spec.strategies)
        for (double alpha : spec.alphas)
            for (auto seed : spec.seeds) cells.push_back({strategy, alpha, seed});

    SweepResult result;
    result.records.resize(cells.size());

    int workers = std::max(1, spec.workers);
    std::atomic<std::size_t> next{0};
    auto drain = [&]() {
        auto backend = make_backend(spec.backend);
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            result.records[i] = run_cell(cases.at(cells[i].seed), cells[i], spec, *backend);
        }
    };
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(drain);
        for (auto& t : pool) t.join();
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) {
                  return std::tie(a.strategy, a.alpha, a.seed) <
                         std::tie(b.strategy, b.alpha, b.seed);
              });

    // Per (strategy, alpha) timing summaries over seeds.
    std::map<std::pair<std::string, double>, std::vector<double>> times;
    for (const auto& r : result.records)
        if (r.status == "optimal") times[{r.strategy, r.alpha}].push_back(r.solve_seconds);
    for (auto& [key, v] : times) {
        std::sort(v.begin(), v.end());
        TimingSummary t;
        t.strategy = key.first;
        t.alpha = key.second;
        t.min_s = v.front();
        t.max_s = v.back();
        t.median_s = v.size() % 2 == 1 ? v[v.size() / 2]
                                       : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        result.timings.push_back(t);
    }

    // Hard checks: every recorded solution validated, and all strategies that
    // proved optimality on a cell agree on the risk/load objective.
    for (const auto& r : result.records)
        if (r.status == "optimal" && !r.validator_clean) result.all_validated = false;

    std::map<std::pair<double, std::uint64_t>, std::vector<const SweepRecord*>> by_cell;
    for (const auto& r : result.records)
        if (r.status == "optimal") by_cell[{r.alpha, r.seed}].push_back(&r);
    for (const auto& [key, recs] : by_cell) {
        for (std::size_t i = 0; i < recs.size(); ++i) {
            for (std::size_t j = i + 1; j < recs.size(); ++j) {
                double oi = (1.0 - recs[i]->alpha) * recs[i]->risk_served -
                            recs[i]->alpha * recs[i]->load_served;
                double oj = (1.0 - recs[j]->alpha) * recs[j]->risk_served -
                            recs[j]->alpha * recs[j]->load_served;
                double rel = std::abs(oi - oj) / std::max(1.0, std::max(std::abs(oi), std::abs(oj)));
                result.max_equivalence_gap = std::max(result.max_equivalence_gap, rel);
            }
        }
    }
    result.equivalence_ok = result.max_equivalence_gap <= 1e-6;
    return result;
}

std::string sweep_records_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream os;
    os << "strategy,alpha,seed,status,objective,risk_served,load_served,solve_seconds,"
          "iterations,loops_generated,model_constraints,model_binaries,model_continuous,"
          "validator_clean\n";
    os.precision(12);
    for (const auto& r : records) {
        os << r.strategy << ',' << r.alpha << ',' << r.seed << ',' << r.status << ','
           << r.objective << ',' << r.risk_served << ',' << r.load_served << ','
           << r.solve_seconds << ',' << r.iterations << ',' << r.loops_generated << ','
           << r.model_constraints << ',' << r.model_binaries << ',' << r.model_continuous << ','
           << (r.validator_clean ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string sweep_sidecar_json(const SweepSpec& spec, const SweepResult& result,
                               std::uint64_t case_fingerprint) {
    nlohmann::ordered_json doc;
    doc["copies"] = spec.copies;
    doc["alphas"] = spec.alphas;
    doc["seeds"] = spec.seeds;
    nlohmann::ordered_json strategies = nlohmann::ordered_json::array();
    for (const auto& s : spec.strategies) strategies.push_back(to_string(s));
    doc["strategies"] = strategies;
    doc["gamma"] = spec.gamma;
    doc["max_iter"] = spec.max_iter;
    doc["time_limit_s"] = spec.time_limit_s;
    doc["backend"] = spec.backend;
    std::ostringstream hash;
    hash << std::hex << case_fingerprint;
    doc["case_content_hash"] = hash.str();
    doc["records"] = result.records.size();
    doc["equivalence_ok"] = result.equivalence_ok;
    doc["max_equivalence_gap"] = result.max_equivalence_gap;
    doc["all_validated"] = result.all_validated;
    return doc.dump(2) + "\n";
}

std::vector<SizeAuditRow> audit_model_sizes(const std::vector<int>& copies_list,
                                            std::uint64_t seed) {
    std::vector<SizeAuditRow> rows;
    for (int copies : copies_list) {
        CaseSpec cs;
        cs.copies = copies;
        cs.seed = seed;
        Network net = build_multicopy_case(cs);
        BlockPartition part = compute_load_blocks(net);
        AbstractNetwork abs_net = build_abstract_network(net, part);

        SizeAuditRow row;
        row.copies = copies;
        row.stats = network_stats(net, part);
        row.predicted_original =
            predict_radiality_model_size(RadialityFormulation::original_pc, row.stats);
        row.predicted_abstracted =
            predict_radiality_model_size(RadialityFormulation::abstracted_pc, row.stats);

        OpsfConfig cfg;
        {
            auto [model, vars] = build_opsf(net, part, abs_net, cfg);
            std::size_t before = model.constraint_count();
            PcVars pc = add_original_parent_child(model, net, part, vars);
            std::size_t tagged = model.count_tag_prefix("eq4");
            if (tagged != model.constraint_count() - before)
                throw ModelError("original parent-child rows missing the eq4 tag");
            row.built_original = pc.added_size(tagged);
        }
        {
            auto [model, vars] = build_opsf(net, part, abs_net, cfg);
            std::size_t before = model.constraint_count();
            PcVars pc = add_abstracted_parent_child(model, abs_net, vars);
            std::size_t tagged = model.count_tag_prefix("eq5");
            if (tagged != model.constraint_count() - before)
                throw ModelError("abstracted parent-child rows missing the eq5 tag");
            row.built_abstracted = pc.added_size(tagged);
        }

        if (row.predicted_original != row.built_original)
            throw ModelError("size audit mismatch for tag prefix eq4 on copies=" +
                             std::to_string(copies));
        if (row.predicted_abstracted != row.built_abstracted)
            throw ModelError("size audit mismatch for tag prefix eq5 on copies=" +
                             std::to_string(copies));
        rows.push_back(row);
    }
    return rows;
}

std::string size_audit_csv(const std::vector<SizeAuditRow>& rows) {
    std::ostringstream os;
    os << "copies,nodes,lines,switches,blocks,substations,"
          "orig_constraints,orig_binaries,orig_continuous,"
          "abs_constraints,abs_binaries,abs_continuous,predicted_equals_built\n";
    for (const auto& r : rows) {
        os << r.copies << ',' << r.stats.n_nodes << ',' << r.stats.n_lines << ','
           << r.stats.n_switches << ',' << r.stats.n_blocks << ',' << r.stats.n_substations << ','
           << r.built_original.constraints << ',' << r.built_original.binaries << ','
           << r.built_original.continuous << ',' << r.built_abstracted.constraints << ','
           << r.built_abstracted.binaries << ',' << r.built_abstracted.continuous << ','
           << (r.ok() ? 1 : 0) << '\n';
    }
    return os.str();
}

std::vector<LoopReportRow> report_loops(const std::vector<int>& copies_list, const EnumCaps& caps,
                                        std::uint64_t seed) {
    std::vector<LoopReportRow> rows;
    for (int copies : copies_list) {
        CaseSpec cs;
        cs.copies = copies;
        cs.seed = seed;
        Network net = build_multicopy_case(cs);
        BlockPartition part = compute_load_blocks(net);
        AbstractNetwork abs_net = build_abstract_network(net, part);
        CycleEnumeration e = enumerate_simple_cycles(abs_net, caps);

        LoopReportRow row;
        row.copies = copies;
        row.blocks = abs_net.block_nodes.size();
        row.switches = abs_net.switched_edges.size();
        row.loops = e.cycles.size();
        row.complete = e.complete;
        row.seconds = e.seconds;
        rows.push_back(row);
    }
    return rows;
}

std::string loop_report_csv(const std::vector<LoopReportRow>& rows) {
    std::ostringstream os;
    os << "copies,blocks,switches,loops,complete,seconds\n";
    for (const auto& r : rows) {
        os << r.copies << ',' << r.blocks << ',' << r.switches << ',' << r.loops_display() << ','
           << (r.complete ? 1 : 0) << ',' << r.seconds << '\n';
    }
    return os.str();
}

std::uint64_t content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace opsf
