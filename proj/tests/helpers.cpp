#include "helpers.hpp"

#include "opsf/validator.hpp"

#include <functional>
#include <map>

namespace opsf::test {

namespace {

bool closed_forest(const AbstractNetwork& abs_net, const std::set<LineId>& closed) {
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
        if (rm == rn) return false;
        parent[rm] = rn;
    }
    return true;
}

} // namespace

std::optional<ConfigOracleResult> enumerate_configurations(const Network& net, double alpha,
                                                           MilpBackend& backend) {
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork abs_net = build_abstract_network(net, part);

    std::vector<BlockId> blocks;
    for (const auto& [b, blk] : part.blocks) blocks.push_back(b);
    std::vector<LineId> switches;
    for (const auto& [id, l] : net.lines)
        if (l.is_switch) switches.push_back(id);
    if (blocks.size() > 8 || switches.size() > 10)
        throw std::runtime_error("configuration oracle limited to 8 blocks / 10 switches");

    OpsfConfig cfg;
    cfg.alpha = alpha;

    ConfigOracleResult best;
    bool any = false;
    for (std::uint32_t zmask = 0; zmask < (1u << blocks.size()); ++zmask) {
        std::set<BlockId> on;
        for (std::size_t i = 0; i < blocks.size(); ++i)
            if (zmask & (1u << i)) on.insert(blocks[i]);

        for (std::uint32_t smask = 0; smask < (1u << switches.size()); ++smask) {
            std::set<LineId> closed;
            for (std::size_t i = 0; i < switches.size(); ++i)
                if (smask & (1u << i)) closed.insert(switches[i]);

            bool isolated = true;
            for (const auto& e : abs_net.switched_edges)
                if (closed.count(e.line) && on.count(e.m) != on.count(e.n)) isolated = false;
            if (!isolated) continue;
            if (!closed_forest(abs_net, closed)) continue;

            // Physics feasibility for the pinned configuration.
            auto [model, vars] = build_opsf(net, part, abs_net, cfg);
            for (const auto& [b, z] : vars.z) {
                double v = on.count(b) ? 1.0 : 0.0;
                model.set_bounds(z, v, v);
            }
            for (const auto& [id, s] : vars.s) {
                double v = closed.count(id) ? 1.0 : 0.0;
                model.set_bounds(s, v, v);
            }
            SolveResult r = solve(model, backend, {});
            if (r.status != SolveStatus::optimal) continue;

            double load = 0.0, risk = 0.0;
            for (const auto& b : on) {
                load += part.block_load.at(b);
                risk += part.block_risk.at(b);
            }
            double objective = (1.0 - alpha) * risk - alpha * load;
            if (!any || objective < best.best_objective) best.best_objective = objective;
            best.max_load_served = std::max(best.max_load_served, load);
            ++best.feasible_configs;
            any = true;
        }
    }
    if (!any) return std::nullopt;
    return best;
}

Network small_loopy_network() {
    NetBuilder b;
    // Five two-node blocks: a* holds the substation, e* a DG unit.
    for (const char* p : {"a", "b", "c", "d", "e"}) {
        b.node(std::string(p) + "1", std::string(p) == "a");
        b.node(std::string(p) + "2");
    }
    b.line("la", "a1", "a2", false, 2.0);
    b.line("lb", "b1", "b2", false, 3.0);
    b.line("lc", "c1", "c2", false, 1.5);
    b.line("ld", "d1", "d2", false, 4.0);
    b.line("le", "e1", "e2", false, 2.5);

    // Six switches, three simple cycles in the block graph.
    b.line("s_ab", "a2", "b1", true);
    b.line("s_bc", "b2", "c1", true);
    b.line("s_ac", "a2", "c1", true);
    b.line("s_cd", "c2", "d1", true);
    b.line("s_de", "d2", "e1", true);
    b.line("s_be", "b2", "e2", true);

    b.load("da", "a2", 0.10, 0.03);
    b.load("db", "b2", 0.20, 0.06);
    b.load("dc", "c2", 0.15, 0.05);
    b.load("dd", "d2", 0.25, 0.08);
    b.load("de", "e2", 0.12, 0.04);

    b.gen("g_sub", "a1", -999, 999, -999, 999, true);
    b.gen("g_dg", "e1", 0.0, 0.45, -0.2, 0.2);
    return b.build();
}

} // namespace opsf::test
