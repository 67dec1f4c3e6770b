#include "opsf/radiality.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace opsf {

std::string to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::original_pc: return "original-pc";
        case StrategyKind::abstracted_pc: return "abstracted-pc";
        case StrategyKind::naive_loop: return "naive-loop";
        case StrategyKind::iterative_loop: return "iterative-loop";
    }
    return "unknown";
}

StrategyKind strategy_from_string(const std::string& name) {
    if (name == "original-pc" || name == "original_pc") return StrategyKind::original_pc;
    if (name == "abstracted-pc" || name == "abstracted_pc") return StrategyKind::abstracted_pc;
    if (name == "naive-loop" || name == "naive_loop") return StrategyKind::naive_loop;
    if (name == "iterative-loop" || name == "iterative_loop") return StrategyKind::iterative_loop;
    throw std::invalid_argument("unknown radiality formulation '" + name + "'");
}

// Both parent-child blocks share the same shape. Edges carry one parent
// binary per direction and a nonnegative virtual-flow pair; every vertex
// carries a virtual-source parent binary. The virtual flow into a vertex is
// kept as an expression (its conservation row doubles as the nonnegativity
// side of the virtual-line capacity), which keeps the constraint and variable
// counts at the documented closed forms.
namespace {

struct PcEdge {
    LineId line;
    std::string u; // vertex keys: node ids (original) or block ids (abstracted)
    std::string v;
    bool switched = true;
};

struct PcGraphSpec {
    std::vector<std::string> vertices;               // sorted
    std::vector<PcEdge> edges;                       // sorted by line id
    std::map<std::string, VarHandle> vertex_z;       // energization per vertex
    std::map<std::string, VarHandle> vertex_sub_z;   // rooted vertices (substations)
    std::map<LineId, VarHandle> switch_vars;
    double flow_cap = 0.0;
    const char* tag4b;
    const char* tag4c;
    const char* tag4d; // may be unused (abstracted graphs have no fixed edges)
    const char* tag4e;
    const char* tag4f;
    const char* tag4g;
    const char* tag4h;
    const char* tag4i;
    const char* prefix;
};

PcVars add_parent_child(MilpModel& model, const PcGraphSpec& g) {
    PcVars pc;
    struct EdgeVars {
        VarHandle beta_uv; // u is parent of v
        VarHandle beta_vu;
        VarHandle flow_pos; // net virtual flow u -> v is flow_pos - flow_neg
        VarHandle flow_neg;
    };
    std::map<LineId, EdgeVars> evars;
    std::map<std::string, VarHandle>& beta_virtual = pc.beta_virtual;

    for (const auto& e : g.edges) {
        EdgeVars ev;
        ev.beta_uv = model.add_binary(std::string(g.prefix) + "beta:" + e.line + ":fwd");
        ev.beta_vu = model.add_binary(std::string(g.prefix) + "beta:" + e.line + ":rev");
        ev.flow_pos = model.add_variable(VarKind::continuous, 0, g.flow_cap,
                                         std::string(g.prefix) + "vf:" + e.line + ":pos");
        ev.flow_neg = model.add_variable(VarKind::continuous, 0, g.flow_cap,
                                         std::string(g.prefix) + "vf:" + e.line + ":neg");
        pc.binaries.push_back(ev.beta_uv);
        pc.binaries.push_back(ev.beta_vu);
        pc.continuous.push_back(ev.flow_pos);
        pc.continuous.push_back(ev.flow_neg);
        pc.beta_fwd.emplace(e.line, ev.beta_uv);
        pc.beta_rev.emplace(e.line, ev.beta_vu);
        pc.flow_pos.emplace(e.line, ev.flow_pos);
        pc.flow_neg.emplace(e.line, ev.flow_neg);
        evars.emplace(e.line, ev);
    }
    for (const auto& vtx : g.vertices) {
        VarHandle bv = model.add_binary(std::string(g.prefix) + "beta:virtual:" + vtx);
        beta_virtual.emplace(vtx, bv);
        pc.binaries.push_back(bv);
    }

    // Virtual source as parent of every substation vertex iff energized.
    for (const auto& [vtx, z] : g.vertex_sub_z)
        model.add_constraint(LinExpr().add(beta_virtual.at(vtx), 1).add(z, -1), Sense::eq, 0,
                             std::string(g.tag4b) + vtx);

    // Single parent per energized vertex, none when de-energized.
    for (const auto& vtx : g.vertices) {
        LinExpr parents;
        for (const auto& e : g.edges) {
            if (e.v == vtx) parents.add(evars.at(e.line).beta_uv, 1);
            if (e.u == vtx) parents.add(evars.at(e.line).beta_vu, 1);
        }
        parents.add(beta_virtual.at(vtx), 1);
        parents.add(g.vertex_z.at(vtx), -1);
        model.add_constraint(std::move(parents), Sense::eq, 0, std::string(g.tag4c) + vtx);
    }

    // Edge activity ties the parent pair to the line status: the block's z on
    // fixed lines, the switch variable on switched lines.
    for (const auto& e : g.edges) {
        const auto& ev = evars.at(e.line);
        LinExpr pair_sum;
        pair_sum.add(ev.beta_uv, 1).add(ev.beta_vu, 1);
        if (e.switched) {
            pair_sum.add(g.switch_vars.at(e.line), -1);
            model.add_constraint(std::move(pair_sum), Sense::eq, 0, std::string(g.tag4e) + e.line);
        } else {
            pair_sum.add(g.vertex_z.at(e.u), -1);
            model.add_constraint(std::move(pair_sum), Sense::eq, 0, std::string(g.tag4d) + e.line);
        }
    }

    // Virtual flow from the source to vertex n, written as the conservation
    // expression E_n = z_n - (net inflow). E_n >= 0 and E_n <= cap * beta_Vn.
    for (const auto& vtx : g.vertices) {
        LinExpr inflow; // net virtual flow arriving at vtx over real edges
        for (const auto& e : g.edges) {
            const auto& ev = evars.at(e.line);
            if (e.v == vtx) inflow.add(ev.flow_pos, 1).add(ev.flow_neg, -1);
            if (e.u == vtx) inflow.add(ev.flow_pos, -1).add(ev.flow_neg, 1);
        }
        LinExpr lower = LinExpr().add(g.vertex_z.at(vtx), 1);
        for (const auto& t : inflow.terms()) lower.add(t.var, -t.coef);
        LinExpr upper = lower;
        model.add_constraint(std::move(lower), Sense::ge, 0, std::string(g.tag4f) + vtx);
        upper.add(beta_virtual.at(vtx), -g.flow_cap);
        model.add_constraint(std::move(upper), Sense::le, 0, std::string(g.tag4g) + vtx);
    }

    // Flow caps: plain on fixed lines, gated by the switch on switched lines.
    for (const auto& e : g.edges) {
        const auto& ev = evars.at(e.line);
        if (e.switched) {
            model.add_constraint(LinExpr().add(ev.flow_pos, 1).add(g.switch_vars.at(e.line),
                                                                   -g.flow_cap),
                                 Sense::le, 0, std::string(g.tag4i) + e.line + ":pos");
            model.add_constraint(LinExpr().add(ev.flow_neg, 1).add(g.switch_vars.at(e.line),
                                                                   -g.flow_cap),
                                 Sense::le, 0, std::string(g.tag4i) + e.line + ":neg");
        } else {
            model.add_constraint(LinExpr().add(ev.flow_pos, 1).add(ev.flow_neg, 1), Sense::le,
                                 g.flow_cap, std::string(g.tag4h) + e.line);
        }
    }
    return pc;
}

} // namespace

PcVars add_original_parent_child(MilpModel& model, const Network& net, const BlockPartition& part,
                                 const OpsfVars& vars) {
    PcGraphSpec g;
    for (const auto& [id, n] : net.nodes) {
        g.vertices.push_back(id);
        g.vertex_z.emplace(id, vars.z.at(part.node_to_block.at(id)));
        if (n.is_substation) g.vertex_sub_z.emplace(id, vars.z.at(part.node_to_block.at(id)));
    }
    for (const auto& [id, l] : net.lines) {
        g.edges.push_back({id, l.from, l.to, l.is_switch});
    }
    g.switch_vars = vars.s;
    g.flow_cap = static_cast<double>(net.nodes.size());
    g.tag4b = "eq4b:node=";
    g.tag4c = "eq4c:node=";
    g.tag4d = "eq4d:line=";
    g.tag4e = "eq4e:line=";
    g.tag4f = "eq4f:node=";
    g.tag4g = "eq4g:node=";
    g.tag4h = "eq4h:line=";
    g.tag4i = "eq4i:line=";
    g.prefix = "opc:";
    return add_parent_child(model, g);
}

PcVars add_abstracted_parent_child(MilpModel& model, const AbstractNetwork& abs_net,
                                   const OpsfVars& vars) {
    PcGraphSpec g;
    for (const auto& b : abs_net.block_nodes) {
        g.vertices.push_back(b);
        g.vertex_z.emplace(b, vars.z.at(b));
    }
    for (const auto& b : abs_net.substation_blocks) g.vertex_sub_z.emplace(b, vars.z.at(b));
    std::vector<SwitchedEdge> edges = abs_net.switched_edges;
    std::sort(edges.begin(), edges.end(),
              [](const SwitchedEdge& a, const SwitchedEdge& b) { return a.line < b.line; });
    for (const auto& e : edges) g.edges.push_back({e.line, e.m, e.n, true});
    g.switch_vars = vars.s;
    g.flow_cap = static_cast<double>(abs_net.block_nodes.size());
    g.tag4b = "eq5b:block=";
    g.tag4c = "eq5c:block=";
    g.tag4d = "eq5d-unused:";
    g.tag4e = "eq5d:edge=";
    g.tag4f = "eq5e:block=";
    g.tag4g = "eq5f:block=";
    g.tag4h = "eq5h-unused:";
    g.tag4i = "eq5g:edge=";
    g.prefix = "apc:";
    return add_parent_child(model, g);
}

int add_loop_constraints(MilpModel& model, const std::vector<Cycle>& loops, const OpsfVars& vars) {
    std::size_t next = model.count_tag_prefix("eq6:");
    int added = 0;
    for (const auto& loop : loops) {
        LinExpr lhs;
        for (const auto& lid : loop.edges) {
            auto it = vars.s.find(lid);
            if (it == vars.s.end())
                throw ModelError("loop references unknown switch '" + lid + "'");
            lhs.add(it->second, 1);
        }
        model.add_constraint(std::move(lhs), Sense::le,
                             static_cast<double>(loop.edges.size()) - 1.0,
                             "eq6:loop=" + std::to_string(next++));
        ++added;
    }
    return added;
}

namespace {

LinExpr shutoff_objective(const BlockPartition& part, const OpsfVars& vars, double alpha,
                          double gamma) {
    LinExpr obj;
    for (const auto& [b, risk] : part.block_risk) {
        double coef = (1.0 - alpha) * risk - alpha * part.block_load.at(b);
        if (coef != 0.0) obj.add(vars.z.at(b), coef);
    }
    if (gamma > 0.0)
        for (const auto& [id, s] : vars.s) obj.add(s, gamma);
    return obj;
}

// MIP engines admit a small integrality slack which big-M and gating rows
// amplify into visible flows on open switches. Pin every binary at its
// rounded value and re-solve the LP so the reported continuous point is
// clean. The objective touches binaries only, so its value is unchanged.
SolveResult polish_binaries(MilpModel& model, const SolveResult& incumbent, MilpBackend& backend,
                            const SolveOptions& options) {
    if (!incumbent.has_values()) return incumbent;
    for (const auto& v : model.variables()) {
        if (v.kind != VarKind::binary) continue;
        double r = std::round(incumbent.value(v));
        model.set_bounds(v, r, r);
    }
    try {
        SolveResult polished = solve(model, backend, options);
        if (polished.status == SolveStatus::optimal) {
            polished.solve_seconds += incumbent.solve_seconds;
            polished.gap = incumbent.gap;
            return polished;
        }
    } catch (const SolveError&) {
        // fall through to the raw incumbent
    }
    return incumbent;
}

void fill_model_meta(Solution& sol, const MilpModel& model) {
    sol.meta.model_constraints = model.constraint_count();
    sol.meta.model_binaries = model.binary_count();
    sol.meta.model_continuous = model.continuous_count();
}

} // namespace

Solution solve_naive_loop_based(const Network& net, const BlockPartition& part,
                                const AbstractNetwork& abs_net, const OpsfConfig& cfg,
                                MilpBackend& backend, const EnumCaps& caps,
                                const SolveOptions& options) {
    OpsfConfig base_cfg = cfg;
    base_cfg.gamma = 0.0;
    auto [model, vars] = build_opsf(net, part, abs_net, base_cfg);

    CycleEnumeration enumeration = enumerate_simple_cycles(abs_net, caps);
    if (!enumeration.complete) {
        std::ostringstream msg;
        msg << "loop enumeration intractable under caps (found " << enumeration.cycles.size()
            << "+ cycles in " << enumeration.seconds << " s)";
        throw EnumerationIntractable(msg.str());
    }
    add_loop_constraints(model, enumeration.cycles, vars);

    SolveResult result = solve(model, backend, options);
    if (result.status != SolveStatus::optimal)
        throw SolveError("naive loop-based solve ended with status " + to_string(result.status));
    result = polish_binaries(model, result, backend, options);
    Solution sol = extract_solution(result, vars, net, part);
    sol.meta.strategy = to_string(StrategyKind::naive_loop);
    sol.meta.backend = backend.name();
    fill_model_meta(sol, model);
    return sol;
}

std::pair<Solution, IterativeTrace> solve_iterative_loop_based(
    const Network& net, const BlockPartition& part, const AbstractNetwork& abs_net,
    const OpsfConfig& cfg, MilpBackend& backend, int max_iter, const EnumCaps& caps,
    const SolveOptions& options, bool gamma_free_certificate) {
    if (!(cfg.gamma > 0.0))
        throw ModelError("iterative loop-based strategy requires gamma > 0");
    if (max_iter < 1) throw ModelError("max_iter must be at least 1");

    auto [model, vars] = build_opsf(net, part, abs_net, cfg);
    IterativeTrace trace;
    std::set<Cycle> generated;
    bool penalty_free = false;

    for (int k = 1; k <= max_iter; ++k) {
        auto t0 = std::chrono::steady_clock::now();
        SolveResult result = solve(model, backend, options);
        if (result.status != SolveStatus::optimal)
            throw SolveError("iterative loop-based iteration " + std::to_string(k) +
                             " ended with status " + to_string(result.status));

        std::set<LineId> closed;
        for (const auto& [id, s] : vars.s)
            if (result.value(s) >= 0.5) closed.insert(id);
        std::vector<Cycle> observed = cycles_in_topology(abs_net, closed, caps);

        std::vector<Cycle> fresh;
        for (const auto& c : observed)
            if (!generated.count(c)) fresh.push_back(c);

        IterationRecord rec;
        rec.iteration = k;
        rec.loops_found = static_cast<int>(fresh.size());
        rec.objective = result.objective_value;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.penalty_free = penalty_free;
        trace.iterations.push_back(rec);

        if (observed.empty()) {
            if (gamma_free_certificate && !penalty_free) {
                // Re-optimize without the switch penalty, keeping every
                // generated loop row, so the reported optimum is for the
                // risk/load objective itself.
                penalty_free = true;
                model.set_objective(shutoff_objective(part, vars, cfg.alpha, 0.0));
                continue;
            }
            OpsfVars report_vars = vars;
            report_vars.gamma = penalty_free ? 0.0 : cfg.gamma;
            result = polish_binaries(model, result, backend, options);
            Solution sol = extract_solution(result, report_vars, net, part);
            sol.meta.strategy = to_string(StrategyKind::iterative_loop);
            sol.meta.backend = backend.name();
            sol.meta.iterations = k;
            sol.meta.loops_generated = trace.total_loops_generated;
            fill_model_meta(sol, model);
            return {std::move(sol), std::move(trace)};
        }

        add_loop_constraints(model, fresh, vars);
        trace.total_loops_generated += static_cast<int>(fresh.size());
    }
    throw IterationLimitError("iterative loop-based strategy exhausted " +
                                  std::to_string(max_iter) + " iterations with loops remaining",
                              trace);
}

Solution solve_with_strategy(const Network& net, const OpsfConfig& cfg,
                             const RadialityStrategy& strategy, MilpBackend& backend,
                             const SolveOptions& options) {
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork abs_net = build_abstract_network(net, part);

    OpsfConfig run_cfg = cfg;
    if (strategy.kind != StrategyKind::iterative_loop) run_cfg.gamma = 0.0;

    switch (strategy.kind) {
        case StrategyKind::original_pc:
        case StrategyKind::abstracted_pc: {
            auto [model, vars] = build_opsf(net, part, abs_net, run_cfg);
            if (strategy.kind == StrategyKind::original_pc)
                add_original_parent_child(model, net, part, vars);
            else
                add_abstracted_parent_child(model, abs_net, vars);
            SolveResult result = solve(model, backend, options);
            if (result.status != SolveStatus::optimal)
                throw SolveError(to_string(strategy.kind) + " solve ended with status " +
                                 to_string(result.status));
            result = polish_binaries(model, result, backend, options);
            Solution sol = extract_solution(result, vars, net, part);
            sol.meta.strategy = to_string(strategy.kind);
            sol.meta.backend = backend.name();
            fill_model_meta(sol, model);
            return sol;
        }
        case StrategyKind::naive_loop:
            return solve_naive_loop_based(net, part, abs_net, run_cfg, backend, strategy.caps,
                                          options);
        case StrategyKind::iterative_loop: {
            run_cfg.gamma = strategy.gamma;
            auto [sol, trace] =
                solve_iterative_loop_based(net, part, abs_net, run_cfg, backend, strategy.max_iter,
                                           strategy.caps, options, strategy.gamma_free_certificate);
            return sol;
        }
    }
    throw ModelError("unknown strategy kind");
}

} // namespace opsf
