#pragma once

#include "opsf/network.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace opsf {

// A simple cycle in the abstract block graph, stored in canonical form:
// the lexicographically smallest rotation/reflection of the edge-id
// sequence. blocks[i] and blocks[(i+1) % k] are the endpoints of edges[i].
// Two parallel switched lines between the same pair of blocks form a valid
// cycle of length 2.
struct Cycle {
    std::vector<LineId> edges;
    std::vector<BlockId> blocks;

    bool operator==(const Cycle& other) const { return edges == other.edges; }
    bool operator<(const Cycle& other) const { return edges < other.edges; }
};

// Rewrites an arbitrary rotation/reflection into the canonical form.
Cycle canonical_cycle(const Cycle& c);

struct EnumCaps {
    std::size_t max_cycles = 1000000;
    double max_seconds = 600.0;
};

struct CycleEnumeration {
    std::vector<Cycle> cycles; // sorted canonical forms
    bool complete = true;      // false when a cap stopped the search early
    double seconds = 0.0;
};

// All simple cycles of the abstract multigraph (rooted DFS with a canonical
// dedup set). When a cap triggers, the partial list is returned with
// complete = false.
CycleEnumeration enumerate_simple_cycles(const AbstractNetwork& g, const EnumCaps& caps = {});

// All simple cycles of the subgraph induced by the closed switched lines;
// empty iff the closed subgraph is a forest.
// Throws NetworkError on an unknown edge id.
std::vector<Cycle> cycles_in_topology(const AbstractNetwork& g, const std::set<LineId>& closed,
                                      const EnumCaps& caps = {});

// Independent oracle: exhaustive scan of all edge subsets, accepting exactly
// the connected 2-regular ones. Requires |edges| <= 20.
std::vector<Cycle> brute_force_cycles(const AbstractNetwork& g);
int count_cycles_brute_force(const AbstractNetwork& g);

} // namespace opsf
