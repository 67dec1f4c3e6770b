#pragma once

#include "opsf/cycles.hpp"
#include "opsf/formulation.hpp"
#include "opsf/milp.hpp"
#include "opsf/network.hpp"
#include "opsf/solution.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opsf {

enum class StrategyKind { original_pc, abstracted_pc, naive_loop, iterative_loop };

std::string to_string(StrategyKind k);
StrategyKind strategy_from_string(const std::string& name);

struct RadialityStrategy {
    StrategyKind kind = StrategyKind::abstracted_pc;
    double gamma = 1e-6; // iterative loop-based only
    int max_iter = 1000;
    EnumCaps caps;
    // After the penalized iteration converges, keep generating constraints at
    // gamma = 0 until loop-free, so the returned optimum is for the
    // unpenalized objective. Disable to reproduce the raw penalized variant.
    bool gamma_free_certificate = true;
};

// Variables added by a parent-child radiality block. Vertices are node ids
// for the original formulation and block ids for the abstracted one.
struct PcVars {
    std::map<LineId, VarHandle> beta_fwd; // 'from' endpoint is the parent
    std::map<LineId, VarHandle> beta_rev;
    std::map<std::string, VarHandle> beta_virtual; // virtual source as parent
    // Net virtual flow along a line is flow_pos - flow_neg.
    std::map<LineId, VarHandle> flow_pos;
    std::map<LineId, VarHandle> flow_neg;

    std::vector<VarHandle> binaries; // flat views for size audits
    std::vector<VarHandle> continuous;

    ModelSize added_size(std::size_t tagged_rows) const {
        return {tagged_rows, binaries.size(), continuous.size()};
    }
};

// Node-level parent-child constraints (rows tagged "eq4*"). Adds two parent
// binaries per line, one virtual-source parent binary per node and a
// nonnegative flow pair per line.
PcVars add_original_parent_child(MilpModel& model, const Network& net, const BlockPartition& part,
                                 const OpsfVars& vars);

// Block-level variant over the abstract network (rows tagged "eq5*").
PcVars add_abstracted_parent_child(MilpModel& model, const AbstractNetwork& abs_net,
                                   const OpsfVars& vars);

// One row per cycle: sum of its switches <= |cycle| - 1, tagged "eq6:loop=i".
// Throws ModelError when a cycle references an unknown switch.
int add_loop_constraints(MilpModel& model, const std::vector<Cycle>& loops, const OpsfVars& vars);

class EnumerationIntractable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct IterationRecord {
    int iteration = 0;
    int loops_found = 0;
    double objective = 0.0;
    double seconds = 0.0;
    bool penalty_free = false; // certificate phase
};

struct IterativeTrace {
    std::vector<IterationRecord> iterations;
    int total_loops_generated = 0;
};

class IterationLimitError : public std::runtime_error {
  public:
    IterationLimitError(const std::string& msg, IterativeTrace trace)
        : std::runtime_error(msg), trace(std::move(trace)) {}
    IterativeTrace trace;
};

Solution solve_naive_loop_based(const Network& net, const BlockPartition& part,
                                const AbstractNetwork& abs_net, const OpsfConfig& cfg,
                                MilpBackend& backend, const EnumCaps& caps = {},
                                const SolveOptions& options = {});

std::pair<Solution, IterativeTrace> solve_iterative_loop_based(
    const Network& net, const BlockPartition& part, const AbstractNetwork& abs_net,
    const OpsfConfig& cfg, MilpBackend& backend, int max_iter = 1000, const EnumCaps& caps = {},
    const SolveOptions& options = {}, bool gamma_free_certificate = true);

// Uniform entry point: computes the partition and abstraction, dispatches on
// the strategy (gamma forced to 0 for non-iterative kinds) and fills in the
// solution metadata.
Solution solve_with_strategy(const Network& net, const OpsfConfig& cfg,
                             const RadialityStrategy& strategy, MilpBackend& backend,
                             const SolveOptions& options = {});

} // namespace opsf
