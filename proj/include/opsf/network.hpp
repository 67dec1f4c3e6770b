#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace opsf {

using NodeId = std::string;
using LineId = std::string;
using GenId = std::string;
using LoadId = std::string;
using ShuntId = std::string;

// A block is identified by the smallest node id it contains, so that block
// ids are reproducible across runs and independent of traversal order.
using BlockId = std::string;

class NetworkError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Node {
    NodeId id;
    bool is_substation = false;
    double vmin = 0.9;
    double vmax = 1.1;
    std::vector<LoadId> loads;
    std::vector<GenId> generators;
    std::vector<ShuntId> shunts;
};

struct Line {
    LineId id;
    NodeId from;
    NodeId to;
    double r = 0.0;
    double x = 0.0;
    double pmax = 0.0;
    double qmax = 0.0;
    bool is_switch = false;
    double risk = 0.0;
};

struct Generator {
    GenId id;
    NodeId node;
    double pmin = 0.0;
    double pmax = 0.0;
    double qmin = 0.0;
    double qmax = 0.0;
    // Interface to the bulk grid; power limits are treated as unbounded and
    // replaced by a finite system-wide bound when building the MILP.
    bool is_substation_interface = false;
};

struct Load {
    LoadId id;
    NodeId node;
    double pd = 0.0;
    double qd = 0.0;
};

struct Shunt {
    ShuntId id;
    NodeId node;
    double g = 0.0;
    double b = 0.0;
};

struct Network {
    double base_mva = 1.0;
    std::map<NodeId, Node> nodes;
    std::map<LineId, Line> lines;
    std::map<GenId, Generator> generators;
    std::map<LoadId, Load> loads;
    std::map<ShuntId, Shunt> shunts;

    const Node& node(const NodeId& id) const;
    const Line& line(const LineId& id) const;

    std::vector<NodeId> substation_nodes() const;
    std::size_t switch_count() const;
};

struct Block {
    std::vector<NodeId> nodes;
    std::vector<LineId> internal_lines;
};

struct BlockPartition {
    std::map<NodeId, BlockId> node_to_block;
    std::map<BlockId, Block> blocks;
    std::map<BlockId, double> block_risk;
    std::map<BlockId, double> block_load;
};

struct SwitchedEdge {
    LineId line;
    BlockId m;
    BlockId n;
};

struct AbstractNetwork {
    std::set<BlockId> block_nodes;
    std::vector<SwitchedEdge> switched_edges; // one entry per switched line, parallel edges kept
    std::set<BlockId> substation_blocks;
};

struct RadialityViolation {
    BlockId block;
    std::string message;
};

struct NetworkStats {
    std::size_t n_nodes = 0;
    std::size_t n_lines = 0;
    std::size_t n_switches = 0;
    std::size_t n_blocks = 0;
    std::size_t n_substations = 0;
};

// Reads and fully validates a network document (see README for the schema).
// Throws NetworkError naming the offending element on schema violations,
// dangling references, a disconnected full graph, or a switch whose
// endpoints fall in the same load block.
Network parse_network(const std::string& path);
Network parse_network_string(const std::string& text);
std::string network_to_json(const Network& net);
void write_network(const Network& net, const std::string& path);

// Structural validation shared by parse_network; usable on programmatically
// built networks as well.
void validate_network(const Network& net);

// Connected components of the graph with all switched lines removed.
// Throws NetworkError if a switched line is internal to a resulting block.
BlockPartition compute_load_blocks(const Network& net);

AbstractNetwork build_abstract_network(const Network& net, const BlockPartition& part);

// Empty iff every block's internal-line subgraph is a tree.
std::vector<RadialityViolation> validate_internal_radiality(const Network& net,
                                                            const BlockPartition& part);

// Informational flags (single-node blocks, blocks without load). These are
// not errors; they are surfaced in CLI output.
std::vector<std::string> structural_notes(const Network& net, const BlockPartition& part);

NetworkStats network_stats(const Network& net, const BlockPartition& part);

} // namespace opsf
