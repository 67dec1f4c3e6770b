#pragma once

#include "opsf/casegen.hpp"
#include "opsf/cycles.hpp"
#include "opsf/formulation.hpp"
#include "opsf/radiality.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace opsf {

struct SweepSpec {
    std::vector<double> alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<StrategyKind> strategies = {StrategyKind::original_pc, StrategyKind::abstracted_pc,
                                            StrategyKind::naive_loop, StrategyKind::iterative_loop};
    int copies = 1;
    double gamma = 1e-6;
    int max_iter = 1000;
    EnumCaps caps;
    double time_limit_s = 300.0;
    double mip_gap = 0.0;
    int workers = 1;
    std::string backend = "highs";
};

struct SweepRecord {
    std::string strategy;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::string status; // "optimal", "infeasible", "limit", "error:<msg>"
    double objective = 0.0;
    double risk_served = 0.0;
    double load_served = 0.0;
    double solve_seconds = 0.0;
    int iterations = 0;
    int loops_generated = 0;
    std::size_t model_constraints = 0;
    std::size_t model_binaries = 0;
    std::size_t model_continuous = 0;
    bool validator_clean = false;
};

struct TimingSummary {
    std::string strategy;
    double alpha = 0.0;
    double median_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
};

struct SweepResult {
    std::vector<SweepRecord> records; // sorted by (strategy, alpha, seed)
    std::vector<TimingSummary> timings;
    // Largest relative disagreement of the risk/load objective between
    // strategies that proved optimality on the same (alpha, seed) cell.
    double max_equivalence_gap = 0.0;
    bool equivalence_ok = true;
    bool all_validated = true;
};

SweepResult run_sweep(const SweepSpec& spec);

std::string sweep_records_csv(const std::vector<SweepRecord>& records);
std::string sweep_sidecar_json(const SweepSpec& spec, const SweepResult& result,
                               std::uint64_t case_fingerprint);

struct SizeAuditRow {
    int copies = 0;
    NetworkStats stats;
    ModelSize predicted_original;
    ModelSize built_original;
    ModelSize predicted_abstracted;
    ModelSize built_abstracted;

    bool ok() const {
        return predicted_original == built_original && predicted_abstracted == built_abstracted;
    }
};

// Builds each case, adds both parent-child blocks to fresh shut-off models
// and compares tag-audited counts against the closed forms.
// Throws ModelError naming the first mismatching formulation.
std::vector<SizeAuditRow> audit_model_sizes(const std::vector<int>& copies_list,
                                            std::uint64_t seed = 1);

std::string size_audit_csv(const std::vector<SizeAuditRow>& rows);

struct LoopReportRow {
    int copies = 0;
    std::size_t blocks = 0;
    std::size_t switches = 0;
    std::size_t loops = 0;
    bool complete = true;
    double seconds = 0.0;

    std::string loops_display() const {
        return std::to_string(loops) + (complete ? "" : "+");
    }
};

std::vector<LoopReportRow> report_loops(const std::vector<int>& copies_list,
                                        const EnumCaps& caps = {}, std::uint64_t seed = 1);

std::string loop_report_csv(const std::vector<LoopReportRow>& rows);

// FNV-1a over file/string content; recorded in sweep sidecars so a sweep can
// be tied to the exact case data it ran on.
std::uint64_t content_hash(const std::string& text);

} // namespace opsf
