#pragma once

#include "opsf/casegen.hpp"
#include "opsf/formulation.hpp"
#include "opsf/milp.hpp"
#include "opsf/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opsf::test {

// Compact builder for hand-made networks in tests.
class NetBuilder {
  public:
    NetBuilder& node(const NodeId& id, bool substation = false, double vmin = 0.9,
                     double vmax = 1.1) {
        Node n;
        n.id = id;
        n.is_substation = substation;
        n.vmin = vmin;
        n.vmax = vmax;
        net_.nodes.emplace(id, n);
        return *this;
    }

    NetBuilder& line(const LineId& id, const NodeId& from, const NodeId& to, bool is_switch,
                     double risk = 0.0, double r = 0.01, double x = 0.02, double pmax = 10.0,
                     double qmax = 10.0) {
        Line l;
        l.id = id;
        l.from = from;
        l.to = to;
        l.is_switch = is_switch;
        l.risk = is_switch ? 0.0 : risk;
        l.r = r;
        l.x = x;
        l.pmax = pmax;
        l.qmax = qmax;
        net_.lines.emplace(id, l);
        return *this;
    }

    NetBuilder& load(const LoadId& id, const NodeId& node, double pd, double qd = 0.0) {
        Load d{id, node, pd, qd};
        net_.loads.emplace(id, d);
        net_.nodes.at(node).loads.push_back(id);
        return *this;
    }

    NetBuilder& gen(const GenId& id, const NodeId& node, double pmin, double pmax, double qmin,
                    double qmax, bool interface_gen = false) {
        Generator g{id, node, pmin, pmax, qmin, qmax, interface_gen};
        net_.generators.emplace(id, g);
        net_.nodes.at(node).generators.push_back(id);
        return *this;
    }

    NetBuilder& shunt(const ShuntId& id, const NodeId& node, double g, double b) {
        Shunt h{id, node, g, b};
        net_.shunts.emplace(id, h);
        net_.nodes.at(node).shunts.push_back(id);
        return *this;
    }

    Network build(bool validate = true) {
        if (validate) validate_network(net_);
        return net_;
    }

  private:
    Network net_;
};

// Exhaustive oracle over all (z, s) configurations: isolation, radiality and
// LP physics feasibility checked independently of any radiality formulation.
struct ConfigOracleResult {
    double best_objective = 0.0; // min of eq-2 objective over feasible configs
    double max_load_served = 0.0;
    int feasible_configs = 0;
};

std::optional<ConfigOracleResult> enumerate_configurations(const Network& net, double alpha,
                                                           MilpBackend& backend);

// Small instance used across tests: 5 multi-node blocks with strictly
// positive risks, 6 switches forming 3 abstract cycles, substation plus DG.
Network small_loopy_network();

} // namespace opsf::test
