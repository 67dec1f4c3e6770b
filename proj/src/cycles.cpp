#include "opsf/cycles.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

namespace opsf {

namespace {

struct DenseGraph {
    std::vector<BlockId> vertex_ids; // sorted
    std::map<BlockId, int> vertex_index;
    struct Edge {
        LineId id;
        int u;
        int v;
    };
    std::vector<Edge> edges;                             // sorted by line id
    std::vector<std::vector<std::pair<int, int>>> adj;   // vertex -> (edge idx, other vertex)
};

DenseGraph densify(const AbstractNetwork& g) {
    DenseGraph d;
    d.vertex_ids.assign(g.block_nodes.begin(), g.block_nodes.end());
    for (std::size_t i = 0; i < d.vertex_ids.size(); ++i)
        d.vertex_index[d.vertex_ids[i]] = static_cast<int>(i);

    std::vector<SwitchedEdge> edges = g.switched_edges;
    std::sort(edges.begin(), edges.end(),
              [](const SwitchedEdge& a, const SwitchedEdge& b) { return a.line < b.line; });
    d.adj.resize(d.vertex_ids.size());
    for (const auto& e : edges) {
        auto mu = d.vertex_index.find(e.m);
        auto nu = d.vertex_index.find(e.n);
        if (mu == d.vertex_index.end() || nu == d.vertex_index.end())
            throw NetworkError("switched edge '" + e.line + "' references an unknown block");
        int idx = static_cast<int>(d.edges.size());
        d.edges.push_back({e.line, mu->second, nu->second});
        d.adj[static_cast<std::size_t>(mu->second)].push_back({idx, nu->second});
        d.adj[static_cast<std::size_t>(nu->second)].push_back({idx, mu->second});
    }
    return d;
}

Cycle cycle_from_walk(const DenseGraph& d, const std::vector<int>& edge_seq,
                      const std::vector<int>& vertex_seq) {
    Cycle c;
    for (int e : edge_seq) c.edges.push_back(d.edges[static_cast<std::size_t>(e)].id);
    for (int v : vertex_seq) c.blocks.push_back(d.vertex_ids[static_cast<std::size_t>(v)]);
    return canonical_cycle(c);
}

class CycleSearch {
  public:
    CycleSearch(const DenseGraph& d, const EnumCaps& caps)
        : d_(d), caps_(caps), start_(std::chrono::steady_clock::now()) {}

    // DFS rooted at each vertex in ascending order; only vertices larger than
    // the root may appear inside a path, so each cycle is discovered at its
    // smallest vertex (once per direction; the canonical set deduplicates).
    bool run(std::set<Cycle>& out) {
        out_ = &out;
        visited_.assign(d_.adj.size(), false);
        for (int r = 0; r < static_cast<int>(d_.adj.size()); ++r) {
            root_ = r;
            if (!extend(r)) return false;
        }
        return true;
    }

  private:
    bool capped() {
        if (out_->size() >= caps_.max_cycles) return true;
        if (++steps_ % 1024 == 0) {
            double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            if (elapsed > caps_.max_seconds) return true;
        }
        return false;
    }

    bool extend(int v) {
        visited_[static_cast<std::size_t>(v)] = true;
        vertex_path_.push_back(v);
        bool ok = true;
        for (const auto& [e, u] : d_.adj[static_cast<std::size_t>(v)]) {
            if (capped()) {
                ok = false;
                break;
            }
            if (u == root_) {
                // A closing edge; a 2-cycle must close over a distinct
                // parallel edge, longer cycles over any edge back to the root.
                if (!edge_path_.empty() && (edge_path_.size() >= 2 || e != edge_path_.front())) {
                    edge_path_.push_back(e);
                    out_->insert(cycle_from_walk(d_, edge_path_, vertex_path_));
                    edge_path_.pop_back();
                }
            } else if (u > root_ && !visited_[static_cast<std::size_t>(u)]) {
                edge_path_.push_back(e);
                if (!extend(u)) ok = false;
                edge_path_.pop_back();
                if (!ok) break;
            }
        }
        vertex_path_.pop_back();
        visited_[static_cast<std::size_t>(v)] = false;
        return ok;
    }

    const DenseGraph& d_;
    EnumCaps caps_;
    std::chrono::steady_clock::time_point start_;
    std::set<Cycle>* out_ = nullptr;
    std::vector<bool> visited_;
    std::vector<int> edge_path_;
    std::vector<int> vertex_path_;
    int root_ = 0;
    std::size_t steps_ = 0;
};

} // namespace

Cycle canonical_cycle(const Cycle& c) {
    const std::size_t k = c.edges.size();
    if (k < 2 || c.blocks.size() != k)
        throw NetworkError("cycle must have >= 2 edges and one block per edge");

    Cycle best;
    auto consider = [&best](const std::vector<LineId>& edges, const std::vector<BlockId>& blocks) {
        if (best.edges.empty() || edges < best.edges) {
            best.edges = edges;
            best.blocks = blocks;
        }
    };

    std::vector<LineId> rev_edges(k);
    std::vector<BlockId> rev_blocks(k);
    for (std::size_t i = 0; i < k; ++i) {
        rev_edges[i] = c.edges[k - 1 - i];
        rev_blocks[i] = c.blocks[(k - i) % k];
    }

    std::vector<LineId> cand_e(k);
    std::vector<BlockId> cand_b(k);
    for (std::size_t rot = 0; rot < k; ++rot) {
        for (std::size_t i = 0; i < k; ++i) {
            cand_e[i] = c.edges[(rot + i) % k];
            cand_b[i] = c.blocks[(rot + i) % k];
        }
        consider(cand_e, cand_b);
        for (std::size_t i = 0; i < k; ++i) {
            cand_e[i] = rev_edges[(rot + i) % k];
            cand_b[i] = rev_blocks[(rot + i) % k];
        }
        consider(cand_e, cand_b);
    }
    return best;
}

CycleEnumeration enumerate_simple_cycles(const AbstractNetwork& g, const EnumCaps& caps) {
    auto t0 = std::chrono::steady_clock::now();
    DenseGraph d = densify(g);
    std::set<Cycle> found;
    CycleSearch search(d, caps);
    CycleEnumeration result;
    result.complete = search.run(found);
    result.cycles.assign(found.begin(), found.end());
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::vector<Cycle> cycles_in_topology(const AbstractNetwork& g, const std::set<LineId>& closed,
                                      const EnumCaps& caps) {
    std::set<LineId> known;
    for (const auto& e : g.switched_edges) known.insert(e.line);
    for (const auto& id : closed)
        if (!known.count(id)) throw NetworkError("closed edge '" + id + "' is not a switched line");

    AbstractNetwork sub;
    sub.block_nodes = g.block_nodes;
    sub.substation_blocks = g.substation_blocks;
    for (const auto& e : g.switched_edges)
        if (closed.count(e.line)) sub.switched_edges.push_back(e);
    return enumerate_simple_cycles(sub, caps).cycles;
}

std::vector<Cycle> brute_force_cycles(const AbstractNetwork& g) {
    DenseGraph d = densify(g);
    const std::size_t m = d.edges.size();
    if (m > 20) throw NetworkError("brute-force cycle oracle is limited to 20 edges");

    std::set<Cycle> found;
    std::vector<int> degree(d.adj.size());
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        if (__builtin_popcount(mask) < 2) continue;

        std::fill(degree.begin(), degree.end(), 0);
        bool regular = true;
        for (std::size_t e = 0; e < m && regular; ++e) {
            if (!(mask & (1u << e))) continue;
            if (++degree[static_cast<std::size_t>(d.edges[e].u)] > 2) regular = false;
            if (++degree[static_cast<std::size_t>(d.edges[e].v)] > 2) regular = false;
        }
        if (!regular) continue;
        for (std::size_t v = 0; v < degree.size() && regular; ++v)
            if (degree[v] == 1) regular = false;
        if (!regular) continue;

        // Walk the subset from its first edge; a single simple cycle uses
        // every selected edge in one closed 2-regular walk.
        std::size_t first = 0;
        while (!(mask & (1u << first))) ++first;
        int start = d.edges[first].u;
        std::vector<int> edge_seq, vertex_seq;
        std::vector<bool> used(m, false);
        int at = start;
        bool walkable = true;
        while (true) {
            vertex_seq.push_back(at);
            int next_edge = -1;
            for (const auto& [e, u] : d.adj[static_cast<std::size_t>(at)]) {
                if ((mask & (1u << e)) && !used[static_cast<std::size_t>(e)]) {
                    next_edge = e;
                    at = u;
                    break;
                }
            }
            if (next_edge < 0) {
                walkable = false;
                break;
            }
            used[static_cast<std::size_t>(next_edge)] = true;
            edge_seq.push_back(next_edge);
            if (at == start) break;
        }
        if (!walkable || edge_seq.size() != static_cast<std::size_t>(__builtin_popcount(mask)))
            continue; // disconnected union of cycles
        found.insert(cycle_from_walk(d, edge_seq, vertex_seq));
    }
    return {found.begin(), found.end()};
}

int count_cycles_brute_force(const AbstractNetwork& g) {
    return static_cast<int>(brute_force_cycles(g).size());
}

} // namespace opsf
