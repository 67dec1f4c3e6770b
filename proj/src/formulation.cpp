#include "opsf/formulation.hpp"

#include <algorithm>
#include <cmath>

namespace opsf {

namespace {

struct SystemBounds {
    double p_interface = 0.0; // covers worst-case injection and absorption
    double q_interface = 0.0;
};

// Finite stand-in for the unbounded bulk-grid interface: total demand plus
// the largest possible shunt draw plus total DG capacity (the interface may
// have to absorb everything the DG fleet can push in a lossless model).
SystemBounds interface_bounds(const Network& net) {
    double wmax = 0.0;
    for (const auto& [id, n] : net.nodes) wmax = std::max(wmax, n.vmax * n.vmax);

    SystemBounds b;
    for (const auto& [id, d] : net.loads) {
        b.p_interface += d.pd;
        b.q_interface += d.qd;
    }
    for (const auto& [id, h] : net.shunts) {
        b.p_interface += std::abs(h.g) * wmax;
        b.q_interface += std::abs(h.b) * wmax;
    }
    for (const auto& [id, g] : net.generators) {
        if (g.is_substation_interface) continue;
        b.p_interface += std::max(std::abs(g.pmin), std::abs(g.pmax));
        b.q_interface += std::max(std::abs(g.qmin), std::abs(g.qmax));
    }
    b.p_interface = std::max(b.p_interface, 1.0);
    b.q_interface = std::max(b.q_interface, 1.0);
    return b;
}

double line_big_m(const Network& net, const Line& l, const OpsfConfig& cfg) {
    if (cfg.big_m_policy == OpsfConfig::BigMPolicy::fixed) return cfg.big_m_value;
    const Node& a = net.node(l.from);
    const Node& b = net.node(l.to);
    double whi = std::max(a.vmax * a.vmax, b.vmax * b.vmax);
    double wlo = std::min(a.vmin * a.vmin, b.vmin * b.vmin);
    // Smallest constant that relaxes the voltage-drop pair over all feasible
    // voltages and flows on this line.
    return (whi - wlo) + 2.0 * (std::abs(l.r) * l.pmax + std::abs(l.x) * l.qmax);
}

} // namespace

std::pair<MilpModel, OpsfVars> build_opsf(const Network& net, const BlockPartition& part,
                                          const AbstractNetwork& abs_net, const OpsfConfig& cfg) {
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
        throw ModelError("alpha must lie in [0, 1], got " + std::to_string(cfg.alpha));
    if (cfg.gamma < 0.0) throw ModelError("gamma must be nonnegative");
    auto violations = validate_internal_radiality(net, part);
    if (!violations.empty())
        throw ModelError("partition not internally radial: " + violations.front().message);

    MilpModel model;
    OpsfVars vars;
    vars.alpha = cfg.alpha;
    vars.gamma = cfg.gamma;

    for (const auto& [b, blk] : part.blocks) vars.z[b] = model.add_binary("z:" + b);
    for (const auto& [id, l] : net.lines)
        if (l.is_switch) vars.s[id] = model.add_binary("s:" + id);
    for (const auto& [id, n] : net.nodes)
        vars.w[id] = model.add_variable(VarKind::continuous, n.vmin * n.vmin, n.vmax * n.vmax,
                                        "w:" + id);
    for (const auto& [id, l] : net.lines) {
        vars.p[id] = model.add_variable(VarKind::continuous, -l.pmax, l.pmax, "p:" + id);
        vars.q[id] = model.add_variable(VarKind::continuous, -l.qmax, l.qmax, "q:" + id);
    }

    SystemBounds sys = interface_bounds(net);
    for (const auto& [id, g] : net.generators) {
        double plo = g.is_substation_interface ? -sys.p_interface : std::min(g.pmin, 0.0);
        double phi = g.is_substation_interface ? sys.p_interface : std::max(g.pmax, 0.0);
        double qlo = g.is_substation_interface ? -sys.q_interface : std::min(g.qmin, 0.0);
        double qhi = g.is_substation_interface ? sys.q_interface : std::max(g.qmax, 0.0);
        vars.pg[id] = model.add_variable(VarKind::continuous, plo, phi, "pg:" + id);
        vars.qg[id] = model.add_variable(VarKind::continuous, qlo, qhi, "qg:" + id);
    }

    // z*w products for shunt-bearing nodes (exact for a binary z).
    for (const auto& [id, n] : net.nodes) {
        if (n.shunts.empty()) continue;
        double wlo = n.vmin * n.vmin;
        double whi = n.vmax * n.vmax;
        VarHandle zw = model.add_variable(VarKind::continuous, 0.0, whi, "zw:" + id);
        vars.w_gated[id] = zw;
        const VarHandle& z = vars.z.at(part.node_to_block.at(id));
        const VarHandle& w = vars.w.at(id);
        model.add_constraint(LinExpr().add(zw, 1).add(z, -whi), Sense::le, 0, "mcc:ub:" + id);
        model.add_constraint(LinExpr().add(zw, 1).add(z, -wlo), Sense::ge, 0, "mcc:lb:" + id);
        model.add_constraint(LinExpr().add(zw, 1).add(w, -1).add(z, -wlo), Sense::le, -wlo,
                             "mcc:tie-hi:" + id);
        model.add_constraint(LinExpr().add(zw, 1).add(w, -1).add(z, -whi), Sense::ge, -whi,
                             "mcc:tie-lo:" + id);
    }

    // Nodal active/reactive balance with energization gating.
    for (const auto& [id, n] : net.nodes) {
        const VarHandle& z = vars.z.at(part.node_to_block.at(id));
        LinExpr pbal, qbal;
        for (const auto& [lid, l] : net.lines) {
            if (l.from == id) {
                pbal.add(vars.p.at(lid), 1);
                qbal.add(vars.q.at(lid), 1);
            } else if (l.to == id) {
                pbal.add(vars.p.at(lid), -1);
                qbal.add(vars.q.at(lid), -1);
            }
        }
        for (const auto& gid : n.generators) {
            pbal.add(vars.pg.at(gid), -1);
            qbal.add(vars.qg.at(gid), -1);
        }
        double pd = 0.0, qd = 0.0;
        for (const auto& did : n.loads) {
            pd += net.loads.at(did).pd;
            qd += net.loads.at(did).qd;
        }
        if (pd != 0.0) pbal.add(z, pd);
        if (qd != 0.0) qbal.add(z, qd);
        for (const auto& hid : n.shunts) {
            const Shunt& h = net.shunts.at(hid);
            if (h.g != 0.0) pbal.add(vars.w_gated.at(id), h.g);
            if (h.b != 0.0) qbal.add(vars.w_gated.at(id), h.b);
        }
        model.add_constraint(std::move(pbal), Sense::eq, 0, "eq3a:node=" + id);
        model.add_constraint(std::move(qbal), Sense::eq, 0, "eq3b:node=" + id);
    }

    // LinDistFlow voltage-drop pairs: equality when the line is live, relaxed
    // by big-M otherwise. Internal lines are gated by their block's z,
    // switched lines by s.
    for (const auto& [id, l] : net.lines) {
        double M = line_big_m(net, l, cfg);
        const VarHandle& wi = vars.w.at(l.from);
        const VarHandle& wj = vars.w.at(l.to);
        VarHandle gate = l.is_switch ? vars.s.at(id) : vars.z.at(part.node_to_block.at(l.from));
        const char* hi_tag = l.is_switch ? "eq3e:line=" : "eq3c:line=";
        const char* lo_tag = l.is_switch ? "eq3f:line=" : "eq3d:line=";
        LinExpr drop;
        drop.add(wj, 1).add(wi, -1).add(vars.p.at(id), 2.0 * l.r).add(vars.q.at(id), 2.0 * l.x);
        LinExpr hi = drop;
        hi.add(gate, M);
        model.add_constraint(std::move(hi), Sense::le, M, hi_tag + id);
        LinExpr lo = std::move(drop);
        lo.add(gate, -M);
        model.add_constraint(std::move(lo), Sense::ge, -M, lo_tag + id);
    }

    // Flow limits gated by z (internal) or s (switched).
    for (const auto& [id, l] : net.lines) {
        VarHandle gate = l.is_switch ? vars.s.at(id) : vars.z.at(part.node_to_block.at(l.from));
        model.add_constraint(LinExpr().add(vars.p.at(id), 1).add(gate, -l.pmax), Sense::le, 0,
                             "lim:p-hi:" + id);
        model.add_constraint(LinExpr().add(vars.p.at(id), 1).add(gate, l.pmax), Sense::ge, 0,
                             "lim:p-lo:" + id);
        model.add_constraint(LinExpr().add(vars.q.at(id), 1).add(gate, -l.qmax), Sense::le, 0,
                             "lim:q-hi:" + id);
        model.add_constraint(LinExpr().add(vars.q.at(id), 1).add(gate, l.qmax), Sense::ge, 0,
                             "lim:q-lo:" + id);
    }

    // Generation limits gated by the block's z.
    for (const auto& [id, g] : net.generators) {
        const VarHandle& z = vars.z.at(part.node_to_block.at(g.node));
        double plo = g.is_substation_interface ? -sys.p_interface : g.pmin;
        double phi = g.is_substation_interface ? sys.p_interface : g.pmax;
        double qlo = g.is_substation_interface ? -sys.q_interface : g.qmin;
        double qhi = g.is_substation_interface ? sys.q_interface : g.qmax;
        model.add_constraint(LinExpr().add(vars.pg.at(id), 1).add(z, -phi), Sense::le, 0,
                             "lim:pg-hi:" + id);
        model.add_constraint(LinExpr().add(vars.pg.at(id), 1).add(z, -plo), Sense::ge, 0,
                             "lim:pg-lo:" + id);
        model.add_constraint(LinExpr().add(vars.qg.at(id), 1).add(z, -qhi), Sense::le, 0,
                             "lim:qg-hi:" + id);
        model.add_constraint(LinExpr().add(vars.qg.at(id), 1).add(z, -qlo), Sense::ge, 0,
                             "lim:qg-lo:" + id);
    }

    // Isolation: a closed switch forces equal energization on both sides.
    for (const auto& e : abs_net.switched_edges) {
        const VarHandle& s = vars.s.at(e.line);
        const VarHandle& zm = vars.z.at(e.m);
        const VarHandle& zn = vars.z.at(e.n);
        model.add_constraint(LinExpr().add(zm, 1).add(s, -1).add(zn, -1), Sense::ge, -1,
                             "eq1:m:" + e.line);
        model.add_constraint(LinExpr().add(zn, 1).add(s, -1).add(zm, -1), Sense::ge, -1,
                             "eq1:n:" + e.line);
    }

    LinExpr objective;
    for (const auto& [b, blk] : part.blocks) {
        double coef = (1.0 - cfg.alpha) * part.block_risk.at(b) - cfg.alpha * part.block_load.at(b);
        if (coef != 0.0) objective.add(vars.z.at(b), coef);
    }
    if (cfg.gamma > 0.0)
        for (const auto& [id, s] : vars.s) objective.add(s, cfg.gamma);
    model.set_objective(std::move(objective));

    return {std::move(model), std::move(vars)};
}

ModelSize predict_radiality_model_size(RadialityFormulation f, const NetworkStats& st) {
    ModelSize size;
    if (f == RadialityFormulation::original_pc) {
        size.constraints = 3 * st.n_nodes + 2 * st.n_lines + st.n_switches + st.n_substations;
        size.binaries = 2 * st.n_lines + st.n_nodes;
        size.continuous = 2 * st.n_lines;
    } else {
        size.constraints = 3 * st.n_blocks + 3 * st.n_switches + st.n_substations;
        size.binaries = 2 * st.n_switches + st.n_blocks;
        size.continuous = 2 * st.n_switches;
    }
    return size;
}

Solution extract_solution(const SolveResult& result, const OpsfVars& vars, const Network& net,
                          const BlockPartition& part) {
    if (result.status != SolveStatus::optimal)
        throw SolveError("cannot extract a solution from a non-optimal result (status " +
                         to_string(result.status) + ")");

    Solution sol;
    sol.alpha = vars.alpha;
    sol.gamma = vars.gamma;
    sol.objective_value = result.objective_value;
    sol.meta.gap = result.gap;
    sol.meta.solve_seconds = result.solve_seconds;

    for (const auto& [b, z] : vars.z)
        if (result.value(z) >= 0.5) sol.energized_blocks.insert(b);
    for (const auto& [id, s] : vars.s)
        if (result.value(s) >= 0.5) sol.closed_switches.insert(id);
    for (const auto& [id, w] : vars.w) sol.w[id] = result.value(w);
    for (const auto& [id, p] : vars.p) sol.p[id] = result.value(p);
    for (const auto& [id, q] : vars.q) sol.q[id] = result.value(q);
    for (const auto& [id, pg] : vars.pg) sol.pg[id] = result.value(pg);
    for (const auto& [id, qg] : vars.qg) sol.qg[id] = result.value(qg);

    for (const auto& b : sol.energized_blocks) {
        sol.risk_served += part.block_risk.at(b);
        sol.load_served += part.block_load.at(b);
    }
    (void)net;
    return sol;
}

} // namespace opsf
