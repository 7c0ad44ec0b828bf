#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "frustra/matching.hpp"

namespace frustra {

/// Undirected graph with positive edge weights. Vertices 0..vertex_count-1.
class WeightedGraph {
public:
    struct Edge {
        int u = 0;
        int v = 0;
        double w = 0.0;
    };

    WeightedGraph() = default;
    explicit WeightedGraph(int vertex_count) : adj_(vertex_count) {}

    int vertex_count() const { return static_cast<int>(adj_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(int id) const { return edges_[id]; }
    const std::vector<Edge>& edges() const { return edges_; }

    int add_edge(int u, int v, double w) {
        if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count() || u == v)
            throw std::invalid_argument("WeightedGraph: bad edge endpoints");
        if (!(w > 0.0))
            throw std::invalid_argument("WeightedGraph: weights must be positive");
        const int id = edge_count();
        edges_.push_back({u, v, w});
        adj_[u].push_back(id);
        adj_[v].push_back(id);
        return id;
    }

    const std::vector<int>& incident(int v) const { return adj_[v]; }
    int other(int edge_id, int v) const {
        const Edge& e = edges_[edge_id];
        return e.u == v ? e.v : e.u;
    }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

/// Shortest-path closure over a terminal set: pairwise distances plus the
/// predecessor structure needed to rebuild each path.
struct MetricClosure {
    std::vector<int> terminals;
    std::vector<std::vector<double>> dist;        // [s][v] over all vertices
    std::vector<std::vector<int>> parent_edge;    // [s][v], -1 at source
    int tie_warnings = 0;

    double terminal_distance(int a, int b) const { return dist[a][terminals[b]]; }

    /// Edge ids along the shortest path from terminals[a] to vertex v.
    std::vector<int> path_edges(const WeightedGraph& g, int a, int v) const {
        std::vector<int> out;
        int cur = v;
        while (parent_edge[a][cur] != -1) {
            const int e = parent_edge[a][cur];
            out.push_back(e);
            cur = g.other(e, cur);
        }
        return out;
    }
};

/// Label-setting shortest paths from every terminal. Ties within 1e-12 are
/// broken toward the smaller predecessor edge id and counted.
inline MetricClosure metric_closure(const WeightedGraph& g, const std::vector<int>& terminals) {
    if (terminals.size() % 2 != 0)
        throw std::invalid_argument("metric_closure: a T-join needs an even terminal set");
    MetricClosure mc;
    mc.terminals = terminals;
    const int nv = g.vertex_count();
    const double inf = std::numeric_limits<double>::infinity();
    constexpr double tie_eps = 1e-12;

    for (std::size_t s = 0; s < terminals.size(); ++s) {
        std::vector<double> dist(nv, inf);
        std::vector<int> parent(nv, -1);
        std::vector<char> done(nv, 0);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        dist[terminals[s]] = 0.0;
        pq.push({0.0, terminals[s]});
        while (!pq.empty()) {
            const auto [d, v] = pq.top();
            pq.pop();
            if (done[v]) continue;
            done[v] = 1;
            for (int e : g.incident(v)) {
                const int u = g.other(e, v);
                if (done[u]) continue;
                const double nd = d + g.edge(e).w;
                if (nd < dist[u] - tie_eps) {
                    dist[u] = nd;
                    parent[u] = e;
                    pq.push({nd, u});
                } else if (std::fabs(nd - dist[u]) <= tie_eps && parent[u] != -1) {
                    ++mc.tie_warnings;
                    // keep dist, prefer the smaller edge id
                    if (e < parent[u]) parent[u] = e;
                }
            }
        }
        for (int t : terminals)
            if (!done[t])
                throw std::invalid_argument("metric_closure: graph is not connected");
        mc.dist.push_back(std::move(dist));
        mc.parent_edge.push_back(std::move(parent));
    }
    return mc;
}

struct TJoinSolution {
    enum class Mode { Exact, Oracle };
    std::vector<int> edges; // sorted edge ids
    double weight = 0.0;
    Mode mode = Mode::Exact;
    int tie_warnings = 0;
};

/// True iff the odd-degree vertex set of A equals T exactly.
inline bool validate_tjoin(const WeightedGraph& g, const std::vector<int>& T,
                           const std::vector<int>& A) {
    std::vector<char> odd(g.vertex_count(), 0);
    for (int e : A) {
        odd[g.edge(e).u] ^= 1;
        odd[g.edge(e).v] ^= 1;
    }
    std::vector<char> want(g.vertex_count(), 0);
    for (int t : T) want[t] ^= 1;
    return odd == want;
}

/// Minimum-weight T-join via the classic reduction: shortest-path closure on
/// T, minimum-weight perfect matching, then the symmetric difference of the
/// matched paths. Positive weights make the matched paths edge-disjoint, so
/// the result's weight equals the matching weight.
inline TJoinSolution min_tjoin(const WeightedGraph& g, const std::vector<int>& T) {
    TJoinSolution sol;
    sol.mode = TJoinSolution::Mode::Exact;
    if (T.size() % 2 != 0)
        throw std::invalid_argument("min_tjoin: |T| must be even");
    if (T.empty()) return sol;

    const MetricClosure mc = metric_closure(g, T);
    sol.tie_warnings = mc.tie_warnings;

    const int nt = static_cast<int>(T.size());
    std::vector<MatchingEdge> closure_edges;
    closure_edges.reserve(static_cast<std::size_t>(nt) * (nt - 1) / 2);
    for (int a = 0; a < nt; ++a)
        for (int b = a + 1; b < nt; ++b)
            closure_edges.push_back({a, b, mc.terminal_distance(a, b)});

    const PerfectMatching pm = min_weight_perfect_matching(nt, closure_edges);

    std::vector<char> in(g.edge_count(), 0);
    for (const auto& [a, b] : pm.pairs)
        for (int e : mc.path_edges(g, a, mc.terminals[b]))
            in[e] ^= 1;

    for (int e = 0; e < g.edge_count(); ++e) {
        if (in[e]) {
            sol.edges.push_back(e);
            sol.weight += g.edge(e).w;
        }
    }
    return sol;
}

/// Exhaustive minimum over all edge subsets with the T parity condition.
/// Gray-code walk keeps the parity state O(1) per step; candidate weights
/// are recomputed exactly. Refuses graphs with more than 24 edges.
inline TJoinSolution brute_force_tjoin(const WeightedGraph& g, const std::vector<int>& T) {
    constexpr int kMaxEdges = 24;
    if (g.edge_count() > kMaxEdges)
        throw std::invalid_argument("brute_force_tjoin: refusing > " +
                                    std::to_string(kMaxEdges) + " edges");
    if (g.vertex_count() > 64)
        throw std::invalid_argument("brute_force_tjoin: refusing > 64 vertices");
    if (T.size() % 2 != 0)
        throw std::invalid_argument("brute_force_tjoin: |T| must be even");

    const int ne = g.edge_count();
    std::vector<std::uint64_t> flip(ne);
    for (int e = 0; e < ne; ++e)
        flip[e] = (1ULL << g.edge(e).u) | (1ULL << g.edge(e).v);
    std::uint64_t target = 0;
    for (int t : T) target ^= 1ULL << t;

    const double inf = std::numeric_limits<double>::infinity();
    double best_weight = inf;
    std::uint32_t best_set = 0;
    bool found = false;

    std::uint64_t parity = 0;
    std::uint32_t subset = 0;
    const std::uint64_t total = 1ULL << ne;
    for (std::uint64_t s = 0;; ++s) {
        if (parity == target) {
            double w = 0.0;
            for (std::uint32_t bits = subset; bits; bits &= bits - 1)
                w += g.edge(__builtin_ctz(bits)).w;
            if (!found || w < best_weight) {
                best_weight = w;
                best_set = subset;
                found = true;
            }
        }
        if (s + 1 == total) break;
        const int e = __builtin_ctzll(s + 1); // Gray-code flip position
        subset ^= 1U << e;
        parity ^= flip[e];
    }

    if (!found)
        throw std::runtime_error("brute_force_tjoin: no T-join exists (graph disconnected?)");

    TJoinSolution sol;
    sol.mode = TJoinSolution::Mode::Oracle;
    sol.weight = best_weight;
    for (std::uint32_t bits = best_set; bits; bits &= bits - 1)
        sol.edges.push_back(__builtin_ctz(bits));
    return sol;
}

} // namespace frustra
