#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "opsf/solution.hpp"
#include "opsf/validator.hpp"

using namespace opsf;
using test::NetBuilder;

namespace {

// Two single-node blocks behind one switch, no loads. The all-ones voltage
// profile with zero flows is physically consistent for any (z, s) pair that
// respects isolation.
Network two_island_net() {
    NetBuilder b;
    b.node("a", true).node("b");
    b.line("sw", "a", "b", true);
    b.gen("g", "a", -999, 999, -999, 999, true);
    return b.build();
}

Solution quiet_solution(const Network& net, double alpha) {
    Solution sol;
    sol.alpha = alpha;
    sol.gamma = 0.0;
    for (const auto& [id, n] : net.nodes) sol.w[id] = 1.0;
    for (const auto& [id, l] : net.lines) {
        sol.p[id] = 0.0;
        sol.q[id] = 0.0;
    }
    for (const auto& [id, g] : net.generators) {
        sol.pg[id] = 0.0;
        sol.qg[id] = 0.0;
    }
    return sol;
}

} // namespace

TEST_CASE("radiality check on closed switch subgraphs") {
    Network net = NetBuilder()
                      .node("a", true)
                      .node("b")
                      .node("c")
                      .line("s_ab", "a", "b", true)
                      .line("s_bc", "b", "c", true)
                      .line("s_ac", "a", "c", true)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);

    CHECK(check_radiality(g, {"s_ab", "s_bc"}).radial);
    auto full = check_radiality(g, {"s_ab", "s_bc", "s_ac"});
    CHECK(!full.radial);
    REQUIRE(full.witness.has_value());
    CHECK(full.witness->edges.size() == 3);
    CHECK_THROWS_AS(check_radiality(g, {"nope"}), NetworkError);
}

TEST_CASE("parallel closed switches are a loop") {
    Network net = NetBuilder()
                      .node("a", true)
                      .node("b")
                      .line("s1", "a", "b", true)
                      .line("s2", "a", "b", true)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    CHECK(check_radiality(g, {"s1"}).radial);
    auto both = check_radiality(g, {"s1", "s2"});
    CHECK(!both.radial);
    REQUIRE(both.witness.has_value());
    CHECK(both.witness->edges == std::vector<LineId>{"s1", "s2"});
}

TEST_CASE("an all-off solution validates cleanly with objective zero") {
    Network net = two_island_net();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    Solution sol = quiet_solution(net, 0.5);
    OpsfConfig cfg;
    cfg.alpha = 0.5;
    ValidationReport report = check_solution(net, part, g, sol, cfg);
    CHECK(report.clean());
    CHECK(report.radial);
    CHECK(report.recomputed_objective == 0.0);
    CHECK(report.balance_residual_max == 0.0);
}

TEST_CASE("a closed switch between unequal statuses is an isolation breach") {
    Network net = two_island_net();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    Solution sol = quiet_solution(net, 0.5);
    sol.energized_blocks = {"a"};
    sol.closed_switches = {"sw"};
    OpsfConfig cfg;
    cfg.alpha = 0.5;
    ValidationReport report = check_solution(net, part, g, sol, cfg);
    CHECK(!report.isolation_ok);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].check == "isolation");
    CHECK(report.violations[0].element == "sw");
}

TEST_CASE("flow on an open switch or in a dark block is a gating breach") {
    Network net = two_island_net();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    OpsfConfig cfg;
    cfg.alpha = 0.5;

    Solution sol = quiet_solution(net, 0.5);
    sol.p["sw"] = 0.5; // open switch carrying active power
    ValidationReport report = check_solution(net, part, g, sol, cfg);
    CHECK(!report.flow_gating_ok);

    Solution sol2 = quiet_solution(net, 0.5);
    sol2.pg["g"] = 0.3; // generator output in a de-energized block
    ValidationReport report2 = check_solution(net, part, g, sol2, cfg);
    CHECK(!report2.flow_gating_ok);
}

TEST_CASE("objective mismatches are reported") {
    Network net = two_island_net();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    Solution sol = quiet_solution(net, 0.5);
    sol.objective_value = 123.0;
    OpsfConfig cfg;
    cfg.alpha = 0.5;
    ValidationReport report = check_solution(net, part, g, sol, cfg);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].check == "objective");
}

TEST_CASE("voltage-drop residuals on live lines are enforced") {
    NetBuilder b;
    b.node("a", true).node("z");
    b.line("l", "a", "z", false, 1.0, 0.01, 0.02);
    b.gen("g", "a", -999, 999, -999, 999, true);
    Network net = b.build();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    OpsfConfig cfg;
    cfg.alpha = 0.0;

    Solution sol = quiet_solution(net, 0.0);
    sol.energized_blocks = {"a"};
    sol.w["z"] = 1.01; // live internal line must satisfy the drop equality
    sol.objective_value = 1.0;
    ValidationReport report = check_solution(net, part, g, sol, cfg);
    CHECK(!report.voltage_ok);

    sol.w["z"] = 1.0;
    ValidationReport clean = check_solution(net, part, g, sol, cfg);
    CHECK(clean.voltage_ok);
    CHECK(clean.clean());
}

TEST_CASE("validation reports serialize with their findings") {
    Network net = two_island_net();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    Solution sol = quiet_solution(net, 0.5);
    sol.energized_blocks = {"a"};
    sol.closed_switches = {"sw"};
    OpsfConfig cfg;
    cfg.alpha = 0.5;
    std::string text = report_to_json(check_solution(net, part, g, sol, cfg));
    CHECK(text.find("\"isolation\"") != std::string::npos);
    CHECK(text.find("\"clean\": false") != std::string::npos);
}

TEST_CASE("solution JSON round trip") {
    Network net = two_island_net();
    Solution sol = quiet_solution(net, 0.5);
    sol.energized_blocks = {"a", "b"};
    sol.closed_switches = {"sw"};
    sol.objective_value = -1.25;
    sol.risk_served = 0.5;
    sol.load_served = 3.0;
    sol.meta.strategy = "abstracted-pc";
    sol.meta.iterations = 2;
    Solution back = solution_from_json_string(solution_to_json(sol));
    CHECK(back.energized_blocks == sol.energized_blocks);
    CHECK(back.closed_switches == sol.closed_switches);
    CHECK(back.objective_value == sol.objective_value);
    CHECK(back.w == sol.w);
    CHECK(back.meta.strategy == "abstracted-pc");
    CHECK(back.meta.iterations == 2);
}
