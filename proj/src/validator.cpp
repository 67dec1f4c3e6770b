#include "opsf/validator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace opsf {

RadialityCheck check_radiality(const AbstractNetwork& abs_net, const std::set<LineId>& closed) {
    std::set<LineId> known;
    for (const auto& e : abs_net.switched_edges) known.insert(e.line);
    for (const auto& id : closed)
        if (!known.count(id)) throw NetworkError("closed edge '" + id + "' is not a switched line");

    // Union-find over blocks; the first edge that joins an already-connected
    // pair proves a cycle, and the cycle enumerator provides a witness.
    std::map<BlockId, BlockId> parent;
    for (const auto& b : abs_net.block_nodes) parent[b] = b;
    std::function<BlockId(const BlockId&)> find = [&](const BlockId& a) -> BlockId {
        if (parent.at(a) == a) return a;
        BlockId r = find(parent.at(a));
        parent[a] = r;
        return r;
    };
    for (const auto& e : abs_net.switched_edges) {
        if (!closed.count(e.line)) continue;
        BlockId rm = find(e.m), rn = find(e.n);
        if (rm == rn) {
            RadialityCheck rc;
            rc.radial = false;
            auto cycles = cycles_in_topology(abs_net, closed);
            if (!cycles.empty()) rc.witness = cycles.front();
            return rc;
        }
        parent[rm] = rn;
    }
    return {};
}

namespace {

struct Checker {
    ValidationReport& report;
    void fail(const std::string& check, const std::string& element, const std::string& message) {
        report.violations.push_back({check, element, message});
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

} // namespace

ValidationReport check_solution(const Network& net, const BlockPartition& part,
                                const AbstractNetwork& abs_net, const Solution& sol,
                                const OpsfConfig& cfg) {
    ValidationReport report;
    Checker c{report};
    const double tol = kValidatorTol;

    auto z_of_node = [&](const NodeId& n) { return sol.energized(part.node_to_block.at(n)); };

    // Radiality of the closed switched-edge subgraph, plus the standing
    // requirement that blocks are internally radial.
    RadialityCheck rc = check_radiality(abs_net, sol.closed_switches);
    report.radial = rc.radial;
    if (!rc.radial) {
        std::string loop;
        if (rc.witness)
            for (const auto& e : rc.witness->edges) loop += (loop.empty() ? "" : ",") + e;
        c.fail("radiality", loop, "closed switches contain a loop");
    }
    for (const auto& v : validate_internal_radiality(net, part)) {
        report.radial = false;
        c.fail("radiality", v.block, v.message);
    }

    // Isolation: both sides of a closed switch share one energization status.
    report.isolation_ok = true;
    for (const auto& e : abs_net.switched_edges) {
        if (!sol.closed(e.line)) continue;
        if (sol.energized(e.m) != sol.energized(e.n)) {
            report.isolation_ok = false;
            c.fail("isolation", e.line,
                   "closed switch joins an energized and a de-energized block");
        }
    }

    // Gating: no flow on open switches or inside de-energized blocks, flows
    // within limits, generators silent in de-energized blocks.
    report.flow_gating_ok = true;
    for (const auto& [id, l] : net.lines) {
        double p = sol.p.at(id);
        double q = sol.q.at(id);
        bool live = l.is_switch ? sol.closed(id) : z_of_node(l.from);
        double pcap = live ? l.pmax : 0.0;
        double qcap = live ? l.qmax : 0.0;
        if (std::abs(p) > pcap + tol || std::abs(q) > qcap + tol) {
            report.flow_gating_ok = false;
            c.fail("gating", id,
                   live ? "flow exceeds line limit" : "flow on a de-energized or open line");
        }
    }
    for (const auto& [id, g] : net.generators) {
        if (z_of_node(g.node)) continue;
        if (std::abs(sol.pg.at(id)) > tol || std::abs(sol.qg.at(id)) > tol) {
            report.flow_gating_ok = false;
            c.fail("gating", id, "generator output in a de-energized block");
        }
    }

    // Voltage bounds everywhere; voltage-drop equality on live lines.
    report.voltage_ok = true;
    for (const auto& [id, n] : net.nodes) {
        double w = sol.w.at(id);
        if (w < n.vmin * n.vmin - tol || w > n.vmax * n.vmax + tol) {
            report.voltage_ok = false;
            c.fail("voltage", id, "squared voltage out of bounds: " + fmt(w));
        }
    }
    for (const auto& [id, l] : net.lines) {
        bool live = l.is_switch ? sol.closed(id) : z_of_node(l.from);
        if (!live) continue;
        double resid = sol.w.at(l.to) - sol.w.at(l.from) +
                       2.0 * (l.r * sol.p.at(id) + l.x * sol.q.at(id));
        if (std::abs(resid) > tol) {
            report.voltage_ok = false;
            c.fail("voltage", id, "voltage-drop residual " + fmt(resid));
        }
    }

    // Nodal balance with the extracted statuses treated as constants.
    report.balance_residual_max = 0.0;
    for (const auto& [id, n] : net.nodes) {
        double z = z_of_node(id) ? 1.0 : 0.0;
        double presid = 0.0, qresid = 0.0;
        for (const auto& [lid, l] : net.lines) {
            if (l.from == id) {
                presid += sol.p.at(lid);
                qresid += sol.q.at(lid);
            } else if (l.to == id) {
                presid -= sol.p.at(lid);
                qresid -= sol.q.at(lid);
            }
        }
        for (const auto& gid : n.generators) {
            presid -= sol.pg.at(gid);
            qresid -= sol.qg.at(gid);
        }
        for (const auto& did : n.loads) {
            presid += z * net.loads.at(did).pd;
            qresid += z * net.loads.at(did).qd;
        }
        for (const auto& hid : n.shunts) {
            const Shunt& h = net.shunts.at(hid);
            presid += z * h.g * sol.w.at(id);
            qresid += z * h.b * sol.w.at(id);
        }
        double worst = std::max(std::abs(presid), std::abs(qresid));
        report.balance_residual_max = std::max(report.balance_residual_max, worst);
        if (worst > tol) c.fail("balance", id, "nodal balance residual " + fmt(worst));
    }

    // Objective recomputation from energization statuses alone.
    double risk = 0.0, load = 0.0;
    for (const auto& b : sol.energized_blocks) {
        risk += part.block_risk.at(b);
        load += part.block_load.at(b);
    }
    report.recomputed_objective =
        (1.0 - cfg.alpha) * risk - cfg.alpha * load +
        cfg.gamma * static_cast<double>(sol.closed_switches.size());
    double denom = std::max(1.0, std::abs(sol.objective_value));
    if (std::abs(report.recomputed_objective - sol.objective_value) / denom > tol)
        c.fail("objective", "",
               "reported " + fmt(sol.objective_value) + " vs recomputed " +
                   fmt(report.recomputed_objective));

    return report;
}

std::string report_to_json(const ValidationReport& report) {
    nlohmann::ordered_json doc;
    doc["radial"] = report.radial;
    doc["isolation_ok"] = report.isolation_ok;
    doc["flow_gating_ok"] = report.flow_gating_ok;
    doc["voltage_ok"] = report.voltage_ok;
    doc["balance_residual_max"] = report.balance_residual_max;
    doc["recomputed_objective"] = report.recomputed_objective;
    doc["violations"] = nlohmann::ordered_json::array();
    for (const auto& f : report.violations)
        doc["violations"].push_back({{"check", f.check}, {"element", f.element}, {"message", f.message}});
    doc["clean"] = report.clean();
    return doc.dump(2) + "\n";
}

} // namespace opsf
