#pragma once

#include "opsf/milp.hpp"
#include "opsf/network.hpp"
#include "opsf/solution.hpp"

#include <map>
#include <utility>

namespace opsf {

struct OpsfConfig {
    // Trade-off between risk minimization (0) and load served (1).
    double alpha = 0.5;
    // Penalty on closed switches; 0 unless the iterative loop-based strategy runs.
    double gamma = 0.0;

    enum class BigMPolicy { per_line_derived, fixed };
    BigMPolicy big_m_policy = BigMPolicy::per_line_derived;
    double big_m_value = 0.0; // used when policy is fixed
};

// Handles of the shut-off model's decision variables.
struct OpsfVars {
    std::map<BlockId, VarHandle> z;  // block energization
    std::map<LineId, VarHandle> s;   // switch closed/open
    std::map<NodeId, VarHandle> w;   // squared voltage magnitude
    std::map<LineId, VarHandle> p;   // sending-end active flow, from -> to
    std::map<LineId, VarHandle> q;   // sending-end reactive flow
    std::map<GenId, VarHandle> pg;
    std::map<GenId, VarHandle> qg;
    // z*w product for nodes carrying shunts (exact linearization; z binary).
    std::map<NodeId, VarHandle> w_gated;

    double alpha = 0.5;
    double gamma = 0.0;

    // Directional read of the single per-line flow variable: +1 when reading
    // from the stored 'from' side, -1 from the 'to' side (lossless lines).
    static double orientation_sign(const Line& line, const NodeId& sending) {
        return sending == line.from ? 1.0 : -1.0;
    }
};

// Builds the shut-off model: objective, nodal balance, voltage-drop pairs,
// voltage/generation/flow limits and switch isolation. Radiality constraints
// are added separately by the chosen strategy.
// Throws ModelError if alpha is out of range or the partition has internally
// non-radial blocks.
std::pair<MilpModel, OpsfVars> build_opsf(const Network& net, const BlockPartition& part,
                                          const AbstractNetwork& abs_net, const OpsfConfig& cfg);

enum class RadialityFormulation { original_pc, abstracted_pc };

struct ModelSize {
    std::size_t constraints = 0;
    std::size_t binaries = 0;
    std::size_t continuous = 0;

    bool operator==(const ModelSize&) const = default;
};

// Closed-form size of the radiality constraint block:
//   original:   3N + 2L + S + NS rows, 2L + N binaries, 2L continuous
//   abstracted: 3B + 3S + NS rows,     2S + B binaries, 2S continuous
ModelSize predict_radiality_model_size(RadialityFormulation f, const NetworkStats& stats);

// Turns an optimal result into a Solution (binaries rounded at 0.5, objective
// split into risk/load/penalty terms). Throws SolveError on non-optimal input.
Solution extract_solution(const SolveResult& result, const OpsfVars& vars, const Network& net,
                          const BlockPartition& part);

} // namespace opsf
