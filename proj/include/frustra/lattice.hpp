#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace frustra {

/// Integer lattice coordinate. `i` runs horizontally in [-k, k], `j`
/// vertically in [-n, n]; the origin sits at the center of the strip.
struct Coord {
    int i = 0;
    int j = 0;

    friend bool operator==(const Coord& a, const Coord& b) {
        return a.i == b.i && a.j == b.j;
    }
    friend bool operator!=(const Coord& a, const Coord& b) { return !(a == b); }
    friend bool operator<(const Coord& a, const Coord& b) {
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    }
};

inline double linf(double x, double y) {
    return std::max(std::fabs(x), std::fabs(y));
}

/// The finite strip C(n,k): vertices (i,j) with |i| <= k, |j| <= n, unit
/// horizontal/vertical edges. Edge and vertex ids are pure functions of the
/// coordinates, so two lattices with equal (n,k) are interchangeable.
///
/// Edge id layout: horizontal edges first, row-major; then vertical edges,
/// row-major. Immutable after construction.
class StripLattice {
public:
    StripLattice(int n, int k) : n_(n), k_(k) {
        if (n < 1 || k < 1)
            throw std::invalid_argument("StripLattice: need n >= 1 and k >= 1");
    }

    int n() const { return n_; }
    int k() const { return k_; }

    int vertex_count() const { return (2 * k_ + 1) * (2 * n_ + 1); }
    int horizontal_edge_count() const { return 2 * k_ * (2 * n_ + 1); }
    int vertical_edge_count() const { return 2 * n_ * (2 * k_ + 1); }
    int edge_count() const { return horizontal_edge_count() + vertical_edge_count(); }

    bool contains_vertex(Coord c) const {
        return std::abs(c.i) <= k_ && std::abs(c.j) <= n_;
    }

    int vertex_id(Coord c) const {
        return (c.j + n_) * (2 * k_ + 1) + (c.i + k_);
    }

    Coord vertex_coord(int id) const {
        const int w = 2 * k_ + 1;
        return Coord{id % w - k_, id / w - n_};
    }

    /// Horizontal edge (i,j)-(i+1,j); i in [-k, k-1], j in [-n, n].
    int horizontal_edge_id(int i, int j) const {
        return (j + n_) * (2 * k_) + (i + k_);
    }

    /// Vertical edge (i,j)-(i,j+1); i in [-k, k], j in [-n, n-1].
    int vertical_edge_id(int i, int j) const {
        return horizontal_edge_count() + (j + n_) * (2 * k_ + 1) + (i + k_);
    }

    bool edge_is_horizontal(int id) const { return id < horizontal_edge_count(); }

    std::pair<Coord, Coord> edge_endpoints(int id) const {
        if (edge_is_horizontal(id)) {
            const int w = 2 * k_;
            const int i = id % w - k_;
            const int j = id / w - n_;
            return {Coord{i, j}, Coord{i + 1, j}};
        }
        const int v = id - horizontal_edge_count();
        const int w = 2 * k_ + 1;
        const int i = v % w - k_;
        const int j = v / w - n_;
        return {Coord{i, j}, Coord{i, j + 1}};
    }

    /// Edge id for the segment between two adjacent vertices; -1 otherwise.
    int edge_between(Coord a, Coord b) const {
        if (!contains_vertex(a) || !contains_vertex(b)) return -1;
        if (a.j == b.j && std::abs(a.i - b.i) == 1)
            return horizontal_edge_id(std::min(a.i, b.i), a.j);
        if (a.i == b.i && std::abs(a.j - b.j) == 1)
            return vertical_edge_id(a.i, std::min(a.j, b.j));
        return -1;
    }

    bool is_boundary_vertex(Coord c) const {
        return std::abs(c.i) == k_ || std::abs(c.j) == n_;
    }

    /// Boundary edges are the perimeter of the rectangle: horizontal at
    /// |j| = n, vertical at |i| = k.
    bool is_boundary_edge(int id) const {
        const auto [a, b] = edge_endpoints(id);
        if (edge_is_horizontal(id)) return std::abs(a.j) == n_;
        return std::abs(a.i) == k_;
    }

    /// Boundary vertices in cycle order, starting at the lexicographically
    /// first boundary vertex (-k,-n) and stepping east first.
    std::vector<Coord> boundary_cycle() const {
        std::vector<Coord> cyc;
        cyc.reserve(4 * (n_ + k_));
        for (int i = -k_; i < k_; ++i) cyc.push_back({i, -n_});
        for (int j = -n_; j < n_; ++j) cyc.push_back({k_, j});
        for (int i = k_; i > -k_; --i) cyc.push_back({i, n_});
        for (int j = n_; j > -n_; --j) cyc.push_back({-k_, j});
        return cyc;
    }

    /// Edge ids of the boundary cycle, in the same order as boundary_cycle()
    /// (edge t joins cycle vertex t to vertex t+1).
    std::vector<int> boundary_cycle_edges() const {
        const auto cyc = boundary_cycle();
        std::vector<int> out;
        out.reserve(cyc.size());
        for (std::size_t t = 0; t < cyc.size(); ++t) {
            const Coord a = cyc[t];
            const Coord b = cyc[(t + 1) % cyc.size()];
            out.push_back(edge_between(a, b));
        }
        return out;
    }

    // --- plaquettes -------------------------------------------------------

    /// Plaquettes are unit squares indexed (col,row), col in [0,2k), row in
    /// [0,2n), lower-left corner at (col-k, row-n).
    int plaquette_count() const { return 4 * n_ * k_; }
    int plaquette_cols() const { return 2 * k_; }
    int plaquette_rows() const { return 2 * n_; }

    int plaquette_id(int col, int row) const { return row * plaquette_cols() + col; }
    std::pair<int, int> plaquette_col_row(int p) const {
        return {p % plaquette_cols(), p / plaquette_cols()};
    }

    /// Bounding edges in order: bottom, top, left, right.
    std::array<int, 4> plaquette_edges(int col, int row) const {
        const int i = col - k_;
        const int j = row - n_;
        return {horizontal_edge_id(i, j), horizontal_edge_id(i, j + 1),
                vertical_edge_id(i, j), vertical_edge_id(i + 1, j)};
    }

    // --- geometry ---------------------------------------------------------

    double vertex_distance(Coord c) const {
        return linf(static_cast<double>(c.i), static_cast<double>(c.j));
    }

    /// L-infinity distance from the edge midpoint to the origin.
    double edge_distance(int id) const {
        const auto [a, b] = edge_endpoints(id);
        return linf(0.5 * (a.i + b.i), 0.5 * (a.j + b.j));
    }

    std::pair<double, double> plaquette_center(int col, int row) const {
        return {col - k_ + 0.5, row - n_ + 0.5};
    }

    double plaquette_distance(int col, int row) const {
        const auto [x, y] = plaquette_center(col, row);
        return linf(x, y);
    }

private:
    int n_;
    int k_;
};

/// The plaquette dual C(n,k)*: one vertex per plaquette, one edge per
/// interior primal edge (boundary edges have no dual). A square grid of
/// width 2k and height 2n.
class PlaquetteGrid {
public:
    struct DualEdge {
        int p = -1;           // plaquette with the smaller id
        int q = -1;
        int primal_edge = -1; // the crossed primal edge
        bool vertical = false; // joins vertically adjacent plaquettes
    };

    // Direction slots for the per-vertex adjacency table.
    enum Dir : int { North = 0, East = 1, South = 2, West = 3 };

    explicit PlaquetteGrid(const StripLattice& lattice)
        : n_(lattice.n()), k_(lattice.k()),
          primal_to_dual_(lattice.edge_count(), -1),
          adj_(static_cast<std::size_t>(lattice.plaquette_count()) * 4, -1) {
        // Scan primal edges in id order so dual edge ids are deterministic.
        for (int e = 0; e < lattice.edge_count(); ++e) {
            if (lattice.is_boundary_edge(e)) continue;
            const auto [a, b] = lattice.edge_endpoints(e);
            DualEdge d;
            d.primal_edge = e;
            if (lattice.edge_is_horizontal(e)) {
                // Separates the plaquette below from the one above.
                const int col = a.i + k_;
                const int row_below = a.j + n_ - 1;
                d.p = lattice.plaquette_id(col, row_below);
                d.q = lattice.plaquette_id(col, row_below + 1);
                d.vertical = true;
            } else {
                const int row = a.j + n_;
                const int col_left = a.i + k_ - 1;
                d.p = lattice.plaquette_id(col_left, row);
                d.q = lattice.plaquette_id(col_left + 1, row);
                d.vertical = false;
            }
            const int id = static_cast<int>(edges_.size());
            primal_to_dual_[e] = id;
            adj_[4 * d.p + (d.vertical ? North : East)] = id;
            adj_[4 * d.q + (d.vertical ? South : West)] = id;
            edges_.push_back(d);
        }
    }

    int n() const { return n_; }
    int k() const { return k_; }
    int width() const { return 2 * k_; }
    int height() const { return 2 * n_; }
    int vertex_count() const { return width() * height(); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const DualEdge& edge(int id) const { return edges_[id]; }
    const std::vector<DualEdge>& edges() const { return edges_; }

    /// Dual edge of a primal edge, or -1 for boundary primal edges.
    int dual_of_primal(int primal_edge) const { return primal_to_dual_[primal_edge]; }

    /// Edge leaving plaquette p in direction d, or -1.
    int adjacent(int p, Dir d) const { return adj_[4 * p + d]; }

    int other_end(int edge_id, int p) const {
        const DualEdge& d = edges_[edge_id];
        return d.p == p ? d.q : d.p;
    }

    int plaquette_id(int col, int row) const { return row * width() + col; }
    std::pair<int, int> col_row(int p) const { return {p % width(), p / width()}; }

    std::pair<double, double> vertex_center(int p) const {
        const auto [col, row] = col_row(p);
        return {col - k_ + 0.5, row - n_ + 0.5};
    }

    double vertex_distance(int p) const {
        const auto [x, y] = vertex_center(p);
        return linf(x, y);
    }

    double edge_distance(int id) const {
        const auto [xa, ya] = vertex_center(edges_[id].p);
        const auto [xb, yb] = vertex_center(edges_[id].q);
        return linf(0.5 * (xa + xb), 0.5 * (ya + yb));
    }

    /// Middle column index. The dual grid has even width, so "middle" is a
    /// convention: we use column k, the column just right of the centerline,
    /// consistently for apex attachment, regular pairs and isolation.
    int middle_col() const { return k_; }

    int top_middle() const { return plaquette_id(middle_col(), height() - 1); }
    int bottom_middle() const { return plaquette_id(middle_col(), 0); }

private:
    int n_;
    int k_;
    std::vector<DualEdge> edges_;
    std::vector<int> primal_to_dual_;
    std::vector<int> adj_;
};

/// C'(n,k): the plaquette grid plus two apex vertices, x above the middle
/// plaquette of the top row and y below the middle plaquette of the bottom
/// row, each attached by a single vertical edge.
class ExtendedDual {
public:
    explicit ExtendedDual(PlaquetteGrid grid) : grid_(std::move(grid)) {}

    const PlaquetteGrid& grid() const { return grid_; }

    int apex_top() const { return grid_.vertex_count(); }      // x
    int apex_bottom() const { return grid_.vertex_count() + 1; } // y
    int vertex_count() const { return grid_.vertex_count() + 2; }

    int apex_top_edge() const { return grid_.edge_count(); }
    int apex_bottom_edge() const { return grid_.edge_count() + 1; }
    int edge_count() const { return grid_.edge_count() + 2; }

    bool is_apex_edge(int id) const { return id >= grid_.edge_count(); }

    std::pair<int, int> edge_ends(int id) const {
        if (id == apex_top_edge()) return {grid_.top_middle(), apex_top()};
        if (id == apex_bottom_edge()) return {grid_.bottom_middle(), apex_bottom()};
        const auto& d = grid_.edge(id);
        return {d.p, d.q};
    }

    int other_end(int edge_id, int v) const {
        const auto [a, b] = edge_ends(edge_id);
        return a == v ? b : a;
    }

    /// Directional adjacency covering apexes: the top apex edge occupies the
    /// North slot of the top-middle plaquette, the bottom apex edge the South
    /// slot of the bottom-middle plaquette.
    int adjacent(int v, PlaquetteGrid::Dir d) const {
        if (v == apex_top()) return d == PlaquetteGrid::South ? apex_top_edge() : -1;
        if (v == apex_bottom()) return d == PlaquetteGrid::North ? apex_bottom_edge() : -1;
        if (v == grid_.top_middle() && d == PlaquetteGrid::North) return apex_top_edge();
        if (v == grid_.bottom_middle() && d == PlaquetteGrid::South) return apex_bottom_edge();
        return grid_.adjacent(v, d);
    }

    std::pair<double, double> vertex_center(int v) const {
        if (v == apex_top()) return {0.5, grid_.n() + 0.5};
        if (v == apex_bottom()) return {0.5, -grid_.n() - 0.5};
        return grid_.vertex_center(v);
    }

    double edge_distance(int id) const {
        const auto [a, b] = edge_ends(id);
        const auto [xa, ya] = vertex_center(a);
        const auto [xb, yb] = vertex_center(b);
        return linf(0.5 * (xa + xb), 0.5 * (ya + yb));
    }

private:
    PlaquetteGrid grid_;
};

inline StripLattice build_strip(int n, int k) { return StripLattice(n, k); }
inline PlaquetteGrid build_dual(const StripLattice& lattice) { return PlaquetteGrid(lattice); }
inline ExtendedDual build_extended_dual(const PlaquetteGrid& grid) { return ExtendedDual(grid); }

/// Plaquettes of the sub-strip C(n,k') inside C(n,k): columns k-k' .. k+k'-1,
/// all rows. Sorted by plaquette id.
inline std::vector<int> sublattice_plaquettes(const PlaquetteGrid& grid, int k_prime) {
    if (k_prime < 1 || k_prime > grid.k())
        throw std::invalid_argument("sublattice_plaquettes: require 1 <= k' <= k");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(2 * k_prime) * grid.height());
    for (int row = 0; row < grid.height(); ++row)
        for (int col = grid.k() - k_prime; col < grid.k() + k_prime; ++col)
            out.push_back(grid.plaquette_id(col, row));
    return out;
}

/// One parity block: the central block (inner == 0, the plaquettes of
/// C(n,1)) or the annulus between C(n,inner) and C(n,outer) with
/// outer = inner + 1.
struct Annulus {
    int outer = 0;
    int inner = 0;
    std::vector<int> plaquettes;
};

/// The k blocks partitioning the plaquette set: central block plus the
/// annuli for k' = 1 .. k-1. Their even-parity constraints are equivalent to
/// the nested constraints "|T intersect C(n,k')| is even for all k' <= k".
inline std::vector<Annulus> annulus_blocks(const PlaquetteGrid& grid) {
    std::vector<Annulus> blocks;
    blocks.reserve(grid.k());
    Annulus central;
    central.outer = 1;
    central.inner = 0;
    central.plaquettes = sublattice_plaquettes(grid, 1);
    blocks.push_back(std::move(central));
    for (int inner = 1; inner < grid.k(); ++inner) {
        Annulus a;
        a.outer = inner + 1;
        a.inner = inner;
        for (int row = 0; row < grid.height(); ++row) {
            a.plaquettes.push_back(grid.plaquette_id(grid.k() - inner - 1, row));
            a.plaquettes.push_back(grid.plaquette_id(grid.k() + inner, row));
        }
        blocks.push_back(std::move(a));
    }
    return blocks;
}

} // namespace frustra
