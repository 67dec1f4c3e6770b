#pragma once

#include "opsf/network.hpp"

#include <map>
#include <set>
#include <string>

namespace opsf {

struct SolutionMeta {
    std::string strategy;
    std::string backend;
    std::string status = "optimal";
    double solve_seconds = 0.0;
    double gap = 0.0;
    int iterations = 0;       // iterative strategy only
    int loops_generated = 0;  // iterative strategy only
    std::size_t model_constraints = 0;
    std::size_t model_binaries = 0;
    std::size_t model_continuous = 0;
};

struct Solution {
    std::set<BlockId> energized_blocks;
    std::set<LineId> closed_switches;
    std::map<NodeId, double> w;
    std::map<LineId, double> p;
    std::map<LineId, double> q;
    std::map<GenId, double> pg;
    std::map<GenId, double> qg;

    double objective_value = 0.0;
    double alpha = 0.5;
    double gamma = 0.0;
    double risk_served = 0.0; // sum of R_b over energized blocks
    double load_served = 0.0; // sum of D_b over energized blocks

    SolutionMeta meta;

    bool energized(const BlockId& b) const { return energized_blocks.count(b) > 0; }
    bool closed(const LineId& l) const { return closed_switches.count(l) > 0; }

    double risk_term() const { return (1.0 - alpha) * risk_served; }
    double load_term() const { return -alpha * load_served; }
    double penalty_term() const { return gamma * static_cast<double>(closed_switches.size()); }
};

std::string solution_to_json(const Solution& sol);
Solution solution_from_json_string(const std::string& text);
Solution read_solution(const std::string& path);
void write_solution(const Solution& sol, const std::string& path);

} // namespace opsf
