#include "opsf/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace opsf {

using json = nlohmann::ordered_json;

const Node& Network::node(const NodeId& id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw NetworkError("unknown node '" + id + "'");
    return it->second;
}

const Line& Network::line(const LineId& id) const {
    auto it = lines.find(id);
    if (it == lines.end()) throw NetworkError("unknown line '" + id + "'");
    return it->second;
}

std::vector<NodeId> Network::substation_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes)
        if (n.is_substation) out.push_back(id);
    return out;
}

std::size_t Network::switch_count() const {
    std::size_t c = 0;
    for (const auto& [id, l] : lines)
        if (l.is_switch) ++c;
    return c;
}

namespace {

std::string id_field(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key))
        throw NetworkError(context + ": missing field '" + key + "'");
    const json& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw NetworkError(context + ": field '" + key + "' must be a string or integer id");
}

double num_field(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw NetworkError(context + ": missing or non-numeric field '" + key + "'");
    return j.at(key).get<double>();
}

bool bool_field(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_boolean())
        throw NetworkError(context + ": missing or non-boolean field '" + key + "'");
    return j.at(key).get<bool>();
}

// Union-find over node ids.
class DisjointSets {
  public:
    explicit DisjointSets(const std::map<NodeId, Node>& nodes) {
        for (const auto& [id, n] : nodes) parent_[id] = id;
    }
    const NodeId& find(const NodeId& a) {
        NodeId& p = parent_.at(a);
        if (p == a) return p;
        p = find(p);
        return p;
    }
    bool unite(const NodeId& a, const NodeId& b) {
        NodeId ra = find(a), rb = find(b);
        if (ra == rb) return false;
        // Keep the smaller id as the representative so block ids are stable.
        if (rb < ra) std::swap(ra, rb);
        parent_[rb] = ra;
        return true;
    }

  private:
    std::map<NodeId, NodeId> parent_;
};

} // namespace

void validate_network(const Network& net) {
    if (net.nodes.empty()) throw NetworkError("network has no nodes");
    if (!(net.base_mva > 0)) throw NetworkError("base_mva must be positive");

    std::size_t substations = 0;
    for (const auto& [id, n] : net.nodes) {
        if (!(n.vmin > 0)) throw NetworkError("node '" + id + "': vmin must be positive");
        if (!(n.vmin <= n.vmax)) throw NetworkError("node '" + id + "': vmin exceeds vmax");
        if (n.is_substation) ++substations;
    }
    if (substations == 0) throw NetworkError("network has no substation node");

    for (const auto& [id, l] : net.lines) {
        if (!net.nodes.count(l.from))
            throw NetworkError("line '" + id + "': dangling reference to node '" + l.from + "'");
        if (!net.nodes.count(l.to))
            throw NetworkError("line '" + id + "': dangling reference to node '" + l.to + "'");
        if (l.from == l.to) throw NetworkError("line '" + id + "': endpoints coincide");
        if (l.pmax < 0 || l.qmax < 0) throw NetworkError("line '" + id + "': negative flow limit");
        if (l.risk < 0) throw NetworkError("line '" + id + "': negative risk");
        if (l.is_switch && l.risk != 0.0)
            throw NetworkError("line '" + id + "': switched lines must carry zero risk");
    }
    for (const auto& [id, g] : net.generators) {
        if (!net.nodes.count(g.node))
            throw NetworkError("generator '" + id + "': dangling reference to node '" + g.node + "'");
        if (g.pmin > g.pmax || g.qmin > g.qmax)
            throw NetworkError("generator '" + id + "': inverted power limits");
    }
    for (const auto& [id, d] : net.loads) {
        if (!net.nodes.count(d.node))
            throw NetworkError("load '" + id + "': dangling reference to node '" + d.node + "'");
        if (d.pd < 0 || d.qd < 0) throw NetworkError("load '" + id + "': negative demand");
    }
    for (const auto& [id, h] : net.shunts) {
        if (!net.nodes.count(h.node))
            throw NetworkError("shunt '" + id + "': dangling reference to node '" + h.node + "'");
    }

    // The full graph (all lines, switches included) must be connected.
    if (net.nodes.size() > 1) {
        DisjointSets dsu(net.nodes);
        std::size_t components = net.nodes.size();
        for (const auto& [id, l] : net.lines)
            if (dsu.unite(l.from, l.to)) --components;
        if (components != 1) {
            const NodeId& root = dsu.find(net.nodes.begin()->first);
            for (const auto& [id, n] : net.nodes) {
                if (dsu.find(id) != root)
                    throw NetworkError("full line graph is disconnected: node '" + id +
                                       "' is unreachable from '" + net.nodes.begin()->first + "'");
            }
        }
    }

    // A switch internal to a load block can never operate radially when
    // closed; reject it here rather than in the formulations.
    compute_load_blocks(net);
}

BlockPartition compute_load_blocks(const Network& net) {
    DisjointSets dsu(net.nodes);
    for (const auto& [id, l] : net.lines)
        if (!l.is_switch) dsu.unite(l.from, l.to);

    BlockPartition part;
    for (const auto& [id, n] : net.nodes) {
        BlockId b = dsu.find(id);
        part.node_to_block[id] = b;
        part.blocks[b].nodes.push_back(id);
    }
    for (auto& [b, blk] : part.blocks) std::sort(blk.nodes.begin(), blk.nodes.end());

    for (const auto& [id, l] : net.lines) {
        if (l.is_switch) {
            if (part.node_to_block.at(l.from) == part.node_to_block.at(l.to))
                throw NetworkError("switched line '" + id +
                                   "' is internal to a load block; closed operation can never be radial");
        } else {
            part.blocks.at(part.node_to_block.at(l.from)).internal_lines.push_back(id);
        }
    }

    for (auto& [b, blk] : part.blocks) {
        std::sort(blk.internal_lines.begin(), blk.internal_lines.end());
        double risk = 0.0;
        for (const auto& lid : blk.internal_lines) risk += net.line(lid).risk;
        double load = 0.0;
        for (const auto& nid : blk.nodes)
            for (const auto& did : net.node(nid).loads) load += net.loads.at(did).pd;
        part.block_risk[b] = risk;
        part.block_load[b] = load;
    }
    return part;
}

AbstractNetwork build_abstract_network(const Network& net, const BlockPartition& part) {
    AbstractNetwork g;
    for (const auto& [b, blk] : part.blocks) g.block_nodes.insert(b);
    for (const auto& [id, l] : net.lines) {
        if (!l.is_switch) continue;
        g.switched_edges.push_back({id, part.node_to_block.at(l.from), part.node_to_block.at(l.to)});
    }
    for (const auto& [id, n] : net.nodes)
        if (n.is_substation) g.substation_blocks.insert(part.node_to_block.at(id));
    return g;
}

std::vector<RadialityViolation> validate_internal_radiality(const Network& net,
                                                            const BlockPartition& part) {
    std::vector<RadialityViolation> out;
    for (const auto& [b, blk] : part.blocks) {
        // Blocks are connected by construction, so tree <=> |E| = |V| - 1.
        if (blk.internal_lines.size() + 1 != blk.nodes.size()) {
            std::ostringstream msg;
            msg << "block '" << b << "' is not internally radial: " << blk.nodes.size()
                << " nodes but " << blk.internal_lines.size() << " internal lines";
            out.push_back({b, msg.str()});
        }
    }
    (void)net;
    return out;
}

std::vector<std::string> structural_notes(const Network& net, const BlockPartition& part) {
    std::vector<std::string> notes;
    for (const auto& [b, blk] : part.blocks) {
        if (blk.nodes.size() == 1)
            notes.push_back("block '" + b + "' is a single switch-bounded node");
        if (part.block_load.at(b) == 0.0)
            notes.push_back("block '" + b + "' carries no load");
    }
    (void)net;
    return notes;
}

NetworkStats network_stats(const Network& net, const BlockPartition& part) {
    NetworkStats s;
    s.n_nodes = net.nodes.size();
    s.n_lines = net.lines.size();
    s.n_switches = net.switch_count();
    s.n_blocks = part.blocks.size();
    s.n_substations = net.substation_nodes().size();
    return s;
}

namespace {

Network network_from_json(const json& doc) {
    Network net;
    if (!doc.is_object()) throw NetworkError("document root must be an object");
    net.base_mva = doc.contains("base_mva") ? num_field(doc, "base_mva", "document") : 1.0;

    for (const char* key : {"nodes", "lines", "generators", "loads", "shunts"}) {
        if (!doc.contains(key) || !doc.at(key).is_array())
            throw NetworkError(std::string("document: missing array '") + key + "'");
    }

    for (const auto& j : doc.at("nodes")) {
        Node n;
        n.id = id_field(j, "id", "node");
        n.is_substation = bool_field(j, "is_substation", "node '" + n.id + "'");
        n.vmin = num_field(j, "vmin", "node '" + n.id + "'");
        n.vmax = num_field(j, "vmax", "node '" + n.id + "'");
        if (!net.nodes.emplace(n.id, n).second)
            throw NetworkError("duplicate node id '" + n.id + "'");
    }
    for (const auto& j : doc.at("lines")) {
        Line l;
        l.id = id_field(j, "id", "line");
        const std::string ctx = "line '" + l.id + "'";
        l.from = id_field(j, "from", ctx);
        l.to = id_field(j, "to", ctx);
        l.r = num_field(j, "r", ctx);
        l.x = num_field(j, "x", ctx);
        l.pmax = num_field(j, "pmax", ctx);
        l.qmax = num_field(j, "qmax", ctx);
        l.is_switch = bool_field(j, "is_switch", ctx);
        l.risk = num_field(j, "risk", ctx);
        if (!net.lines.emplace(l.id, l).second)
            throw NetworkError("duplicate line id '" + l.id + "'");
    }
    for (const auto& j : doc.at("generators")) {
        Generator g;
        g.id = id_field(j, "id", "generator");
        const std::string ctx = "generator '" + g.id + "'";
        g.node = id_field(j, "node", ctx);
        g.pmin = num_field(j, "pmin", ctx);
        g.pmax = num_field(j, "pmax", ctx);
        g.qmin = num_field(j, "qmin", ctx);
        g.qmax = num_field(j, "qmax", ctx);
        g.is_substation_interface = bool_field(j, "is_substation_interface", ctx);
        if (!net.generators.emplace(g.id, g).second)
            throw NetworkError("duplicate generator id '" + g.id + "'");
    }
    for (const auto& j : doc.at("loads")) {
        Load d;
        d.id = id_field(j, "id", "load");
        const std::string ctx = "load '" + d.id + "'";
        d.node = id_field(j, "node", ctx);
        d.pd = num_field(j, "pd", ctx);
        d.qd = num_field(j, "qd", ctx);
        if (!net.loads.emplace(d.id, d).second)
            throw NetworkError("duplicate load id '" + d.id + "'");
    }
    for (const auto& j : doc.at("shunts")) {
        Shunt h;
        h.id = id_field(j, "id", "shunt");
        const std::string ctx = "shunt '" + h.id + "'";
        h.node = id_field(j, "node", ctx);
        h.g = num_field(j, "g", ctx);
        h.b = num_field(j, "b", ctx);
        if (!net.shunts.emplace(h.id, h).second)
            throw NetworkError("duplicate shunt id '" + h.id + "'");
    }

    // Attach element lists to their nodes (derived, kept sorted by id).
    for (const auto& [id, d] : net.loads)
        if (net.nodes.count(d.node)) net.nodes.at(d.node).loads.push_back(id);
    for (const auto& [id, g] : net.generators)
        if (net.nodes.count(g.node)) net.nodes.at(g.node).generators.push_back(id);
    for (const auto& [id, h] : net.shunts)
        if (net.nodes.count(h.node)) net.nodes.at(h.node).shunts.push_back(id);

    validate_network(net);
    return net;
}

} // namespace

Network parse_network_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw NetworkError(std::string("invalid JSON: ") + e.what());
    }
    return network_from_json(doc);
}

Network parse_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open network file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network_string(buf.str());
}

std::string network_to_json(const Network& net) {
    json doc;
    doc["base_mva"] = net.base_mva;
    doc["nodes"] = json::array();
    for (const auto& [id, n] : net.nodes)
        doc["nodes"].push_back({{"id", n.id},
                                {"is_substation", n.is_substation},
                                {"vmin", n.vmin},
                                {"vmax", n.vmax}});
    doc["lines"] = json::array();
    for (const auto& [id, l] : net.lines)
        doc["lines"].push_back({{"id", l.id},
                                {"from", l.from},
                                {"to", l.to},
                                {"r", l.r},
                                {"x", l.x},
                                {"pmax", l.pmax},
                                {"qmax", l.qmax},
                                {"is_switch", l.is_switch},
                                {"risk", l.risk}});
    doc["generators"] = json::array();
    for (const auto& [id, g] : net.generators)
        doc["generators"].push_back({{"id", g.id},
                                     {"node", g.node},
                                     {"pmin", g.pmin},
                                     {"pmax", g.pmax},
                                     {"qmin", g.qmin},
                                     {"qmax", g.qmax},
                                     {"is_substation_interface", g.is_substation_interface}});
    doc["loads"] = json::array();
    for (const auto& [id, d] : net.loads)
        doc["loads"].push_back({{"id", d.id}, {"node", d.node}, {"pd", d.pd}, {"qd", d.qd}});
    doc["shunts"] = json::array();
    for (const auto& [id, h] : net.shunts)
        doc["shunts"].push_back({{"id", h.id}, {"node", h.node}, {"g", h.g}, {"b", h.b}});
    return doc.dump(2) + "\n";
}

void write_network(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NetworkError("cannot write network file '" + path + "'");
    out << network_to_json(net);
}

} // namespace opsf
