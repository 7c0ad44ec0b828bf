#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "frustra/instance.hpp"
#include "frustra/lattice.hpp"
#include "frustra/tjoin.hpp"

namespace frustra {

/// Spin assignment, +-1 per vertex id. The global flip represents the same
/// groundstate pair; anchor-positive representatives are canonical.
struct SpinState {
    std::vector<std::int8_t> spin;
};

inline double energy(const StripLattice& lattice, const CouplingAssignment& J,
                     const SpinState& sigma) {
    double e = 0.0;
    for (int id = 0; id < lattice.edge_count(); ++id) {
        const auto [a, b] = lattice.edge_endpoints(id);
        e -= J.values[id] * sigma.spin[lattice.vertex_id(a)] * sigma.spin[lattice.vertex_id(b)];
    }
    return e;
}

/// Edges with J_ij * s_i * s_j < 0.
inline std::vector<int> dissatisfied_set(const StripLattice& lattice,
                                         const CouplingAssignment& J,
                                         const SpinState& sigma) {
    std::vector<int> dis;
    for (int id = 0; id < lattice.edge_count(); ++id) {
        const auto [a, b] = lattice.edge_endpoints(id);
        if (J.values[id] * sigma.spin[lattice.vertex_id(a)] *
                sigma.spin[lattice.vertex_id(b)] < 0.0)
            dis.push_back(id);
    }
    return dis;
}

inline int count_negative_boundary(const StripLattice& lattice, const CouplingAssignment& J) {
    int neg = 0;
    for (int e : lattice.boundary_cycle_edges())
        if (J.values[e] < 0.0) ++neg;
    return neg;
}

/// The boundary edge sacrificed when the negative count is odd: minimal |J|,
/// ties to the smaller edge id. -1 in the even case.
inline int sacrificed_boundary_edge(const StripLattice& lattice, const CouplingAssignment& J) {
    if (count_negative_boundary(lattice, J) % 2 == 0) return -1;
    int best = -1;
    for (int e : lattice.boundary_cycle_edges()) {
        if (best == -1 || std::fabs(J.values[e]) < std::fabs(J.values[best]) ||
            (std::fabs(J.values[e]) == std::fabs(J.values[best]) && e < best))
            best = e;
    }
    return best;
}

/// Boundary spins fixed by walking the boundary cycle from the
/// lexicographically first boundary vertex (-k,-n), anchored at +1 and
/// satisfying every boundary edge; with an odd number of negative boundary
/// couplings the minimum-|J| edge is left dissatisfied. Non-boundary entries
/// are 0.
inline SpinState boundary_condition_spins(const StripLattice& lattice,
                                          const CouplingAssignment& J) {
    SpinState s;
    s.spin.assign(lattice.vertex_count(), 0);
    const int sacrifice = sacrificed_boundary_edge(lattice, J);
    const auto cyc = lattice.boundary_cycle();
    const auto cyc_edges = lattice.boundary_cycle_edges();
    std::int8_t cur = 1;
    s.spin[lattice.vertex_id(cyc.front())] = cur;
    for (std::size_t t = 0; t + 1 < cyc.size(); ++t) {
        const int e = cyc_edges[t];
        std::int8_t next = (J.values[e] > 0.0) ? cur : static_cast<std::int8_t>(-cur);
        if (e == sacrifice) next = static_cast<std::int8_t>(-next);
        s.spin[lattice.vertex_id(cyc[t + 1])] = next;
        cur = next;
    }
    // Closing edge consistency: satisfied unless it is the sacrifice.
    const int closing = cyc_edges.back();
    const double prod = J.values[closing] * cur * s.spin[lattice.vertex_id(cyc.front())];
    const bool ok = (closing == sacrifice) ? (prod < 0.0) : (prod > 0.0);
    if (!ok)
        throw std::logic_error("boundary_condition_spins: inconsistent boundary walk");
    return s;
}

struct CGroundstate {
    SpinState state;         // anchor-positive representative; -state is the pair
    std::vector<int> dis;    // dissatisfied primal edge ids, sorted
    double energy = 0.0;
    double dis_weight = 0.0; // sum of |J| over dis
    TJoinSolution join;      // the dual T-join (interior part of dis)
    int sacrificed_edge = -1;
};

/// Weighted dual graph of the lattice: vertex per plaquette, edge weight
/// |J_e| of the crossed interior primal edge.
inline WeightedGraph dual_weighted_graph(const PlaquetteGrid& grid,
                                         const std::vector<double>& primal_weights) {
    WeightedGraph g(grid.vertex_count());
    for (int d = 0; d < grid.edge_count(); ++d) {
        const auto& de = grid.edge(d);
        g.add_edge(de.p, de.q, primal_weights[de.primal_edge]);
    }
    return g;
}

/// Exact c-groundstate: frustration set -> minimum T-join on the dual with
/// weights |J| -> dissatisfied edge set -> spin integration from the
/// boundary anchor. In the odd-negative-boundary case the minimum-|J|
/// boundary edge is sacrificed and the T-join target adjusted accordingly.
inline CGroundstate cgroundstate(const StripLattice& lattice, const CouplingAssignment& J) {
    CGroundstate out;
    const PlaquetteGrid grid(lattice);

    FrustrationSet T = frustration_from_couplings(lattice, J);
    out.sacrificed_edge = sacrificed_boundary_edge(lattice, J);
    if (out.sacrificed_edge != -1) {
        // The sacrificed boundary edge bounds exactly one plaquette; toggling
        // it in DIS flips that plaquette's parity requirement.
        int owner = -1;
        for (int row = 0; row < lattice.plaquette_rows() && owner < 0; ++row)
            for (int col = 0; col < lattice.plaquette_cols() && owner < 0; ++col)
                for (int e : lattice.plaquette_edges(col, row))
                    if (e == out.sacrificed_edge) {
                        owner = lattice.plaquette_id(col, row);
                        break;
                    }
        auto it = std::lower_bound(T.begin(), T.end(), owner);
        if (it != T.end() && *it == owner)
            T.erase(it);
        else
            T.insert(it, owner);
    }

    const std::vector<double> weights = weights_from_couplings(J);
    const WeightedGraph dual = dual_weighted_graph(grid, weights);
    out.join = min_tjoin(dual, T);

    out.dis.reserve(out.join.edges.size() + 1);
    for (int d : out.join.edges) out.dis.push_back(grid.edge(d).primal_edge);
    if (out.sacrificed_edge != -1) out.dis.push_back(out.sacrificed_edge);
    std::sort(out.dis.begin(), out.dis.end());
    for (int e : out.dis) out.dis_weight += weights[e];

    // Integrate spins across edges: flipped iff the edge is dissatisfied.
    std::vector<char> in_dis(lattice.edge_count(), 0);
    for (int e : out.dis) in_dis[e] = 1;
    out.state.spin.assign(lattice.vertex_count(), 0);
    const Coord anchor{-lattice.k(), -lattice.n()};
    out.state.spin[lattice.vertex_id(anchor)] = 1;
    std::vector<int> stack{lattice.vertex_id(anchor)};
    while (!stack.empty()) {
        const int vid = stack.back();
        stack.pop_back();
        const Coord c = lattice.vertex_coord(vid);
        const std::int8_t sv = out.state.spin[vid];
        const Coord nbrs[4] = {{c.i + 1, c.j}, {c.i - 1, c.j}, {c.i, c.j + 1}, {c.i, c.j - 1}};
        for (const Coord& nb : nbrs) {
            if (!lattice.contains_vertex(nb)) continue;
            const int e = lattice.edge_between(c, nb);
            const double sign = J.values[e] * (in_dis[e] ? -1.0 : 1.0);
            const std::int8_t want = (sign > 0.0) ? sv : static_cast<std::int8_t>(-sv);
            std::int8_t& snb = out.state.spin[lattice.vertex_id(nb)];
            if (snb == 0) {
                snb = want;
                stack.push_back(lattice.vertex_id(nb));
            } else if (snb != want) {
                throw std::logic_error("cgroundstate: spin propagation inconsistent");
            }
        }
    }

    // The integrated state must realize exactly the planned DIS.
    if (dissatisfied_set(lattice, J, out.state) != out.dis)
        throw std::logic_error("cgroundstate: DIS mismatch after integration");

    out.energy = energy(lattice, J, out.state);
    return out;
}

struct BruteForceState {
    SpinState state;
    double energy = 0.0;
};

/// Exhaustive minimum of E over interior spins, boundary fixed by
/// boundary_condition_spins. Refuses more than 20 interior vertices.
inline BruteForceState brute_force_cgroundstate(const StripLattice& lattice,
                                                const CouplingAssignment& J) {
    std::vector<int> interior;
    for (int v = 0; v < lattice.vertex_count(); ++v)
        if (!lattice.is_boundary_vertex(lattice.vertex_coord(v))) interior.push_back(v);
    if (interior.size() > 20)
        throw std::invalid_argument("brute_force_cgroundstate: refusing > 20 interior vertices");

    SpinState base = boundary_condition_spins(lattice, J);
    for (int v : interior) base.spin[v] = 1;

    BruteForceState best;
    best.state = base;
    best.energy = energy(lattice, J, base);
    const std::uint32_t total = 1U << interior.size();
    SpinState cur = base;
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        for (std::size_t t = 0; t < interior.size(); ++t)
            cur.spin[interior[t]] = (mask >> t) & 1 ? -1 : 1;
        const double e = energy(lattice, J, cur);
        if (e < best.energy) {
            best.energy = e;
            best.state = cur;
        }
    }
    return best;
}

} // namespace frustra
