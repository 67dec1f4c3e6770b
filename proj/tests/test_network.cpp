#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "opsf/casegen.hpp"
#include "opsf/network.hpp"

using namespace opsf;
using test::NetBuilder;

namespace {

const char* kMinimalNet = R"({
  "base_mva": 1.0,
  "nodes": [
    {"id": "a", "is_substation": true, "vmin": 0.9, "vmax": 1.1},
    {"id": "b", "is_substation": false, "vmin": 0.9, "vmax": 1.1}
  ],
  "lines": [
    {"id": "l1", "from": "a", "to": "b", "r": 0.01, "x": 0.02,
     "pmax": 1.0, "qmax": 1.0, "is_switch": false, "risk": 0.5}
  ],
  "generators": [], "loads": [], "shunts": []
})";

} // namespace

TEST_CASE("parse: minimal two-node network") {
    Network net = parse_network_string(kMinimalNet);
    CHECK(net.nodes.size() == 2);
    CHECK(net.lines.size() == 1);
    CHECK(net.node("a").is_substation);
    CHECK(net.line("l1").risk == 0.5);
}

TEST_CASE("parse: dangling reference names the offending line") {
    std::string bad = kMinimalNet;
    bad.replace(bad.find("\"to\": \"b\""), 9, "\"to\": \"z\"");
    CHECK_THROWS_WITH_AS(parse_network_string(bad), doctest::Contains("line 'l1'"), NetworkError);
}

TEST_CASE("parse: disconnected full graph is rejected") {
    NetBuilder b;
    b.node("a", true).node("b").node("c").node("d");
    b.line("l1", "a", "b", false);
    b.line("l2", "c", "d", false);
    CHECK_THROWS_WITH_AS(b.build(), doctest::Contains("disconnected"), NetworkError);
}

TEST_CASE("parse: switch with nonzero risk is rejected") {
    std::string bad = kMinimalNet;
    bad.replace(bad.find("\"is_switch\": false"), 18, "\"is_switch\": true ");
    CHECK_THROWS_WITH_AS(parse_network_string(bad), doctest::Contains("zero risk"), NetworkError);
}

TEST_CASE("blocks: path without switches forms one block") {
    Network net = NetBuilder()
                      .node("a", true)
                      .node("b")
                      .node("c")
                      .line("l1", "a", "b", false)
                      .line("l2", "b", "c", false)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    CHECK(part.blocks.size() == 1);
    CHECK(part.blocks.begin()->second.nodes == std::vector<NodeId>{"a", "b", "c"});
}

TEST_CASE("blocks: one switch splits one component") {
    Network net = NetBuilder()
                      .node("a", true)
                      .node("b")
                      .node("c")
                      .line("l1", "a", "b", true)
                      .line("l2", "b", "c", false)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    REQUIRE(part.blocks.size() == 2);
    CHECK(part.node_to_block.at("a") == "a");
    CHECK(part.node_to_block.at("b") == "b");
    CHECK(part.node_to_block.at("c") == "b");
}

TEST_CASE("blocks: block id is the smallest contained node id") {
    Network net = NetBuilder()
                      .node("x9", true)
                      .node("x2")
                      .node("x5")
                      .line("l1", "x9", "x2", false)
                      .line("l2", "x2", "x5", false)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    REQUIRE(part.blocks.size() == 1);
    CHECK(part.blocks.begin()->first == "x2");
}

TEST_CASE("blocks: a switch internal to a block is a structural error") {
    NetBuilder b;
    b.node("a", true).node("b").node("c");
    b.line("l1", "a", "b", false);
    b.line("l2", "b", "c", false);
    b.line("sw", "a", "c", true); // both endpoints in the same internal component
    Network net = b.build(false);
    CHECK_THROWS_WITH_AS(compute_load_blocks(net), doctest::Contains("sw"), NetworkError);
}

TEST_CASE("blocks: risk and load aggregates") {
    Network net = NetBuilder()
                      .node("a", true)
                      .node("b")
                      .node("c")
                      .line("l1", "a", "b", false, 2.5)
                      .line("l2", "b", "c", false, 1.5)
                      .load("d1", "b", 0.4)
                      .load("d2", "c", 0.6)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    CHECK(part.block_risk.at("a") == 4.0);
    CHECK(part.block_load.at("a") == doctest::Approx(1.0));
}

TEST_CASE("abstract: single switch joins two blocks") {
    Network net = NetBuilder()
                      .node("a", true)
                      .node("b")
                      .line("sw", "a", "b", true)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    CHECK(g.block_nodes.size() == 2);
    CHECK(g.switched_edges.size() == 1);
    CHECK(g.substation_blocks == std::set<BlockId>{"a"});
}

TEST_CASE("abstract: parallel switches stay distinct edges") {
    Network net = NetBuilder()
                      .node("a", true)
                      .node("b")
                      .line("sw1", "a", "b", true)
                      .line("sw2", "a", "b", true)
                      .build();
    BlockPartition part = compute_load_blocks(net);
    AbstractNetwork g = build_abstract_network(net, part);
    CHECK(g.block_nodes.size() == 2);
    REQUIRE(g.switched_edges.size() == 2);
    CHECK(g.switched_edges[0].line != g.switched_edges[1].line);
}

TEST_CASE("internal radiality: star block passes, triangle block fails") {
    Network star = NetBuilder()
                       .node("a", true)
                       .node("b")
                       .node("c")
                       .node("d")
                       .line("l1", "a", "b", false)
                       .line("l2", "a", "c", false)
                       .line("l3", "a", "d", false)
                       .build();
    BlockPartition part = compute_load_blocks(star);
    CHECK(validate_internal_radiality(star, part).empty());

    NetBuilder tri;
    tri.node("a", true).node("b").node("c");
    tri.line("l1", "a", "b", false).line("l2", "b", "c", false).line("l3", "a", "c", false);
    Network cyc = tri.build(false);
    BlockPartition cpart = compute_load_blocks(cyc);
    auto violations = validate_internal_radiality(cyc, cpart);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].block == "a");
}

TEST_CASE("generated case: stats, round trip and partition invariants") {
    CaseSpec spec;
    spec.copies = 1;
    spec.seed = 3;
    Network net = build_multicopy_case(spec);

    std::string text = network_to_json(net);
    Network reparsed = parse_network_string(text);
    CHECK(network_to_json(reparsed) == text);

    BlockPartition part = compute_load_blocks(net);
    NetworkStats st = network_stats(net, part);
    CHECK(st.n_nodes == 71);
    CHECK(st.n_lines == 72);
    CHECK(st.n_switches == 11);
    CHECK(st.n_substations == 1);
    // The single-node boundary stub is a block of its own: 61 internal
    // lines over 71 nodes make ten components.
    CHECK(st.n_blocks == 10);
    CHECK(validate_internal_radiality(net, part).empty());

    // Partition soundness and abstraction fidelity.
    std::size_t switched_seen = 0;
    for (const auto& [id, l] : net.lines) {
        if (l.is_switch) {
            CHECK(part.node_to_block.at(l.from) != part.node_to_block.at(l.to));
            ++switched_seen;
        } else {
            CHECK(part.node_to_block.at(l.from) == part.node_to_block.at(l.to));
        }
    }
    AbstractNetwork g = build_abstract_network(net, part);
    CHECK(g.switched_edges.size() == switched_seen);
    CHECK(g.block_nodes.size() == part.blocks.size());
    CHECK(g.substation_blocks.size() == 1);

    // Recomputing aggregates from scratch matches the stored values exactly.
    for (const auto& [b, blk] : part.blocks) {
        double risk = 0.0;
        for (const auto& lid : blk.internal_lines) risk += net.line(lid).risk;
        CHECK(part.block_risk.at(b) == risk);
    }

    auto notes = structural_notes(net, part);
    CHECK(!notes.empty()); // the boundary stub is flagged
}

TEST_CASE("generated case: deterministic bytes for equal seeds") {
    CaseSpec spec;
    spec.copies = 2;
    spec.seed = 7;
    Network a = build_multicopy_case(spec);
    Network b = build_multicopy_case(spec);
    CHECK(network_to_json(a) == network_to_json(b));

    spec.seed = 8;
    Network c = build_multicopy_case(spec);
    CHECK(network_to_json(a) != network_to_json(c));
}
