#pragma once

#include "opsf/cycles.hpp"
#include "opsf/formulation.hpp"
#include "opsf/network.hpp"
#include "opsf/solution.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace opsf {

struct Finding {
    std::string check; // "radiality", "isolation", "gating", "voltage", "balance", "objective"
    std::string element;
    std::string message;
};

struct ValidationReport {
    bool radial = false;
    bool isolation_ok = false;
    bool flow_gating_ok = false;
    bool voltage_ok = false;
    double balance_residual_max = 0.0;
    double recomputed_objective = 0.0;
    std::vector<Finding> violations;

    bool clean() const { return violations.empty(); }
};

struct RadialityCheck {
    bool radial = true;
    std::optional<Cycle> witness;
};

// True iff the subgraph of closed switched edges is a forest; otherwise one
// witness cycle is returned.
RadialityCheck check_radiality(const AbstractNetwork& abs_net, const std::set<LineId>& closed);

// Formulation-blind admissibility check. Works from (z, s, p, q, w, pg, qg)
// only, so it can falsify a buggy radiality formulation rather than trust it.
ValidationReport check_solution(const Network& net, const BlockPartition& part,
                                const AbstractNetwork& abs_net, const Solution& sol,
                                const OpsfConfig& cfg);

std::string report_to_json(const ValidationReport& report);

constexpr double kValidatorTol = 1e-6;

} // namespace opsf
