#include "opsf/casegen.hpp"

#include "opsf/rng.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace opsf {

namespace {

std::string pad3(int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%03d", i);
    return buf;
}

std::string pad2(int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", i);
    return buf;
}

struct BaseBuilder {
    Network net;
    int next_internal = 0;

    void add_node(int idx, bool substation = false) {
        Node n;
        n.id = "n" + pad3(idx);
        n.is_substation = substation;
        n.vmin = 0.94;
        n.vmax = 1.06;
        net.nodes.emplace(n.id, n);
    }

    void internal_line(int from, int to, int ordinal) {
        Line l;
        l.id = "ln" + pad3(next_internal++);
        l.from = "n" + pad3(from);
        l.to = "n" + pad3(to);
        l.r = 2.0e-5 + 0.5e-5 * (ordinal % 8);
        l.x = 2.0 * l.r;
        l.pmax = 400.0;
        l.qmax = 150.0;
        l.is_switch = false;
        l.risk = 1.0; // placeholder; profiles are sampled per seed
        net.lines.emplace(l.id, l);
    }

    void switch_line(int idx, int from, int to) {
        Line l;
        l.id = "sw" + pad2(idx);
        l.from = "n" + pad3(from);
        l.to = "n" + pad3(to);
        l.r = 1.0e-5;
        l.x = 2.0e-5;
        l.pmax = 300.0;
        l.qmax = 120.0;
        l.is_switch = true;
        l.risk = 0.0;
        net.lines.emplace(l.id, l);
    }

    // Internal topology of a block: node i hangs off node i/2 (block-local
    // ordinals), giving a branchy tree rather than a bare path.
    void add_block(int first, int count) {
        for (int i = 0; i < count; ++i) add_node(first + i, first + i == 0);
        for (int i = 1; i < count; ++i) internal_line(first + i / 2, first + i, first + i);
    }

    // Loads are sized so block demand is commensurate with sampled block
    // risk (1..10 per line), spreading energization flips across the whole
    // alpha range instead of collapsing them at the extremes.
    void add_load(int node_idx) {
        Load d;
        d.id = "d_n" + pad3(node_idx);
        d.node = "n" + pad3(node_idx);
        d.pd = 2.0 + 0.5 * (node_idx % 9);
        d.qd = 0.35 * d.pd;
        net.loads.emplace(d.id, d);
        net.nodes.at(d.node).loads.push_back(d.id);
    }

    void add_generator(const std::string& id, int node_idx, double pmin, double pmax, double qmin,
                       double qmax, bool interface_gen) {
        Generator g;
        g.id = id;
        g.node = "n" + pad3(node_idx);
        g.pmin = pmin;
        g.pmax = pmax;
        g.qmin = qmin;
        g.qmax = qmax;
        g.is_substation_interface = interface_gen;
        net.generators.emplace(g.id, g);
        net.nodes.at(g.node).generators.push_back(g.id);
    }

    void add_shunt(const std::string& id, int node_idx, double g, double b) {
        Shunt h;
        h.id = id;
        h.node = "n" + pad3(node_idx);
        h.g = g;
        h.b = b;
        net.shunts.emplace(h.id, h);
        net.nodes.at(h.node).shunts.push_back(h.id);
    }
};

} // namespace

Network bundled_base_network() {
    BaseBuilder b;
    b.net.base_mva = 1.0;

    // 10 load blocks over 71 nodes; the last one is the single-node boundary
    // stub that mimics an interconnection to a neighboring feeder.
    b.add_block(0, 10);  // substation block, n000-n009
    b.add_block(10, 9);  // n010-n018
    b.add_block(19, 8);  // n019-n026
    b.add_block(27, 8);  // n027-n034
    b.add_block(35, 7);  // n035-n041, boundary stub side
    b.add_block(42, 7);  // n042-n048
    b.add_block(49, 7);  // n049-n055
    b.add_block(56, 6);  // n056-n061
    b.add_block(62, 8);  // n062-n069
    b.add_block(70, 1);  // n070, boundary stub

    // Switched lines; the first five close two overlapping cycles in the
    // block graph, giving exactly three simple loops.
    b.switch_line(0, 3, 10);
    b.switch_line(1, 14, 19);
    b.switch_line(2, 22, 27);
    b.switch_line(3, 6, 23);
    b.switch_line(4, 9, 31);
    b.switch_line(5, 30, 35);
    b.switch_line(6, 5, 42);
    b.switch_line(7, 45, 49);
    b.switch_line(8, 52, 56);
    b.switch_line(9, 47, 62);
    b.switch_line(10, 65, 70);

    // Boundary stubs and the substation carry no load.
    for (int i = 1; i <= 69; ++i)
        if (i != 35) b.add_load(i);

    // Bulk-grid interface at the substation; limits are placeholders and are
    // replaced by a finite system-wide bound when the MILP is built.
    b.add_generator("g_sub", 0, -999.0, 999.0, -999.0, 999.0, true);
    // DG at the unjoined boundary stubs, mimicking a neighboring system.
    b.add_generator("g_n070", 70, 0.0, 30.0, -12.0, 12.0, false);
    b.add_generator("g_n035", 35, 0.0, 25.0, -10.0, 10.0, false);
    // Interior DG enabling islanded operation.
    b.add_generator("g_n061", 61, 0.0, 12.0, -5.0, 5.0, false);
    b.add_generator("g_n034", 34, 0.0, 15.0, -6.0, 6.0, false);

    b.add_shunt("h_n021", 21, 0.002, 0.015);
    b.add_shunt("h_n051", 51, 0.0, -0.020);

    validate_network(b.net);
    return b.net;
}

BoundaryStubs bundled_base_stubs() { return {"n070", "n035"}; }

namespace {

Network prefixed_copy(const Network& base, const std::string& prefix) {
    Network out;
    out.base_mva = base.base_mva;
    for (const auto& [id, n] : base.nodes) {
        Node c = n;
        c.id = prefix + n.id;
        c.loads.clear();
        c.generators.clear();
        c.shunts.clear();
        out.nodes.emplace(c.id, c);
    }
    for (const auto& [id, l] : base.lines) {
        Line c = l;
        c.id = prefix + l.id;
        c.from = prefix + l.from;
        c.to = prefix + l.to;
        out.lines.emplace(c.id, c);
    }
    for (const auto& [id, g] : base.generators) {
        Generator c = g;
        c.id = prefix + g.id;
        c.node = prefix + g.node;
        out.generators.emplace(c.id, c);
        out.nodes.at(c.node).generators.push_back(c.id);
    }
    for (const auto& [id, d] : base.loads) {
        Load c = d;
        c.id = prefix + d.id;
        c.node = prefix + d.node;
        out.loads.emplace(c.id, c);
        out.nodes.at(c.node).loads.push_back(c.id);
    }
    for (const auto& [id, h] : base.shunts) {
        Shunt c = h;
        c.id = prefix + h.id;
        c.node = prefix + h.node;
        out.shunts.emplace(c.id, c);
        out.nodes.at(c.node).shunts.push_back(c.id);
    }
    return out;
}

void remove_generator_at(Network& net, const NodeId& node) {
    auto& gens = net.nodes.at(node).generators;
    for (const auto& gid : gens) net.generators.erase(gid);
    gens.clear();
}

} // namespace

Network build_multicopy_case(const CaseSpec& spec) {
    if (spec.copies < 1) throw std::invalid_argument("copies must be at least 1");
    if (spec.risk_variance < 0) throw std::invalid_argument("risk_variance must be nonnegative");

    const Network base = spec.base ? *spec.base : bundled_base_network();
    const BoundaryStubs stubs = bundled_base_stubs();

    Network net;
    net.base_mva = base.base_mva;
    for (int k = 1; k <= spec.copies; ++k) {
        std::string prefix = "c" + std::to_string(k) + "_";
        Network copy = prefixed_copy(base, prefix);
        if (k > 1) {
            // Only the first copy keeps a bulk-grid substation; the other
            // copies' interfaces become ordinary DG units.
            for (auto& [id, n] : copy.nodes) n.is_substation = false;
            for (auto& [id, g] : copy.generators) {
                if (g.is_substation_interface) {
                    g.is_substation_interface = false;
                    g.pmin = 0.0;
                    g.pmax = 150.0;
                    g.qmin = -60.0;
                    g.qmax = 60.0;
                }
            }
        }
        net.nodes.insert(copy.nodes.begin(), copy.nodes.end());
        net.lines.insert(copy.lines.begin(), copy.lines.end());
        net.generators.insert(copy.generators.begin(), copy.generators.end());
        net.loads.insert(copy.loads.begin(), copy.loads.end());
        net.shunts.insert(copy.shunts.begin(), copy.shunts.end());
    }

    // Chain the copies through boundary switched lines. A joined stub no
    // longer represents an interconnection, so its mimic DG is dropped.
    for (int k = 1; k < spec.copies; ++k) {
        std::string from = "c" + std::to_string(k) + "_" + stubs.out_stub;
        std::string to = "c" + std::to_string(k + 1) + "_" + stubs.in_stub;
        Line j;
        j.id = "jsw" + pad2(k);
        j.from = from;
        j.to = to;
        j.r = 1.0e-5;
        j.x = 2.0e-5;
        j.pmax = 300.0;
        j.qmax = 120.0;
        j.is_switch = true;
        j.risk = 0.0;
        net.lines.emplace(j.id, j);
        remove_generator_at(net, from);
        remove_generator_at(net, to);
    }

    validate_network(net);
    BlockPartition part = compute_load_blocks(net);
    sample_risk_profile(net, part, spec.seed, spec.risk_variance);
    return net;
}

void sample_risk_profile(Network& net, const BlockPartition& part, std::uint64_t seed,
                         double variance) {
    if (variance < 0) throw std::invalid_argument("variance must be nonnegative");
    const double sigma = std::sqrt(variance);

    SplitMix64 master(seed);
    for (const auto& [b, blk] : part.blocks) {
        SplitMix64 block_stream(master.next());
        double block_risk = block_stream.uniform(1.0, 10.0);
        for (const auto& lid : blk.internal_lines) {
            SplitMix64 line_stream(block_stream.next());
            double risk = block_risk + sigma * line_stream.normal01();
            net.lines.at(lid).risk = std::max(0.0, risk);
        }
    }
    for (auto& [id, l] : net.lines)
        if (l.is_switch) l.risk = 0.0;
}

} // namespace opsf
