#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "frustra/lattice.hpp"
#include "frustra/rng.hpp"

namespace frustra {

/// Parse failure for instance files; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Signed couplings J_e indexed by primal edge id, plus seed provenance.
struct CouplingAssignment {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string generator = "gauss-v1";
};

/// The frustrated plaquettes, as a sorted list of plaquette ids.
using FrustrationSet = std::vector<int>;

enum class InstanceMode { Signed, Dual, Planted };

inline const char* to_string(InstanceMode m) {
    switch (m) {
        case InstanceMode::Signed: return "signed";
        case InstanceMode::Dual: return "dual";
        case InstanceMode::Planted: return "planted";
    }
    return "?";
}

inline std::optional<InstanceMode> instance_mode_from(const std::string& s) {
    if (s == "signed") return InstanceMode::Signed;
    if (s == "dual") return InstanceMode::Dual;
    if (s == "planted") return InstanceMode::Planted;
    return std::nullopt;
}

/// A full problem instance: lattice parameters, per-edge weights |J_e|,
/// the frustration set T, and (for signed/planted modes) the signed
/// couplings the weights came from.
struct Instance {
    int n = 0;
    int k = 0;
    std::uint64_t seed = 0;
    InstanceMode mode = InstanceMode::Signed;
    std::vector<double> weights;          // |J_e| per primal edge, > 0
    std::optional<CouplingAssignment> couplings; // absent in dual mode
    FrustrationSet frustration;           // T, sorted

    StripLattice lattice() const { return StripLattice(n, k); }
};

/// I.i.d. standard normal coupling per edge, in edge id order.
inline CouplingAssignment sample_couplings(const StripLattice& lattice, std::uint64_t seed) {
    CouplingAssignment J;
    J.seed = seed;
    J.values.resize(lattice.edge_count());
    Rng rng(seed);
    for (double& v : J.values) v = rng.next_gaussian();
    return J;
}

/// T = plaquettes with an odd number of negative bounding couplings.
inline FrustrationSet frustration_from_couplings(const StripLattice& lattice,
                                                 const CouplingAssignment& J) {
    FrustrationSet T;
    for (int row = 0; row < lattice.plaquette_rows(); ++row) {
        for (int col = 0; col < lattice.plaquette_cols(); ++col) {
            int negatives = 0;
            for (int e : lattice.plaquette_edges(col, row))
                if (J.values[e] < 0.0) ++negatives;
            if (negatives % 2 == 1) T.push_back(lattice.plaquette_id(col, row));
        }
    }
    return T;
}

inline bool plaquette_is_frustrated(const StripLattice& lattice,
                                    const CouplingAssignment& J, int col, int row) {
    int negatives = 0;
    for (int e : lattice.plaquette_edges(col, row))
        if (J.values[e] < 0.0) ++negatives;
    return negatives % 2 == 1;
}

/// T uniform over the subsets satisfying every nested parity constraint
/// "|T intersect C(n,k')| even". Each annulus block is sampled as a uniform
/// even subset: all memberships but the last are fair coins, the last one
/// repairs the block parity. Differences of even prefixes are even, so the
/// blocks are independent and the product measure is uniform on the
/// constrained set.
inline FrustrationSet sample_T_parity(const PlaquetteGrid& grid, std::uint64_t seed) {
    FrustrationSet T;
    Rng rng(seed);
    for (const Annulus& block : annulus_blocks(grid)) {
        bool parity = false;
        const std::size_t last = block.plaquettes.size() - 1;
        for (std::size_t t = 0; t < last; ++t) {
            if (rng.next_bool()) {
                T.push_back(block.plaquettes[t]);
                parity = !parity;
            }
        }
        if (parity) T.push_back(block.plaquettes[last]);
    }
    std::sort(T.begin(), T.end());
    return T;
}

inline std::vector<double> weights_from_couplings(const CouplingAssignment& J) {
    std::vector<double> w(J.values.size());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = std::fabs(J.values[e]);
    return w;
}

inline Instance make_signed_instance(const StripLattice& lattice, std::uint64_t seed) {
    Instance inst;
    inst.n = lattice.n();
    inst.k = lattice.k();
    inst.seed = seed;
    inst.mode = InstanceMode::Signed;
    inst.couplings = sample_couplings(lattice, seed);
    inst.weights = weights_from_couplings(*inst.couplings);
    inst.frustration = frustration_from_couplings(lattice, *inst.couplings);
    return inst;
}

/// Dual-side instance: weights drawn from |J|, T drawn uniformly under the
/// nested parity constraints. The same rng stream drives both, so one seed
/// determines the trial.
inline Instance make_dual_instance(const StripLattice& lattice, std::uint64_t seed) {
    Instance inst;
    inst.n = lattice.n();
    inst.k = lattice.k();
    inst.seed = seed;
    inst.mode = InstanceMode::Dual;
    CouplingAssignment J = sample_couplings(lattice, seed);
    inst.weights = weights_from_couplings(J);
    inst.frustration = sample_T_parity(PlaquetteGrid(lattice), splitmix64(seed ^ 0x7E57A11ULL));
    return inst;
}

// --- serialization ---------------------------------------------------------
//
// Text format, line oriented:
//   frustra-instance v1 n=<n> k=<k> seed=<s> [mode=<signed|dual|planted>]
//   E <id> <i1> <j1> <i2> <j2> <hex float>      one line per edge
//   T <col> <row>                               one line per frustrated plaquette
//
// Edge values are signed couplings in signed/planted mode and positive
// weights in dual mode. Hex float encoding makes round trips bit-exact.

inline std::string format_hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline void serialize(const Instance& inst, std::ostream& out) {
    out << "frustra-instance v1 n=" << inst.n << " k=" << inst.k
        << " seed=" << inst.seed << " mode=" << to_string(inst.mode) << "\n";
    const StripLattice lattice = inst.lattice();
    const std::vector<double>& vals =
        inst.couplings ? inst.couplings->values : inst.weights;
    for (int e = 0; e < lattice.edge_count(); ++e) {
        const auto [a, b] = lattice.edge_endpoints(e);
        out << "E " << e << ' ' << a.i << ' ' << a.j << ' ' << b.i << ' ' << b.j
            << ' ' << format_hex_double(vals[e]) << "\n";
    }
    for (int p : inst.frustration) {
        const auto [col, row] = lattice.plaquette_col_row(p);
        out << "T " << col << ' ' << row << "\n";
    }
}

inline std::string serialize(const Instance& inst) {
    std::ostringstream os;
    serialize(inst, os);
    return os.str();
}

namespace detail {

inline bool parse_kv(const std::string& token, const char* key, std::string& value) {
    const std::size_t klen = std::strlen(key);
    if (token.size() <= klen + 1) return false;
    if (token.compare(0, klen, key) != 0 || token[klen] != '=') return false;
    value = token.substr(klen + 1);
    return true;
}

inline long long parse_int(const std::string& s, int line, const char* what) {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end == s.c_str() || *end != '\0')
        throw ParseError(line, std::string("bad integer for ") + what + ": '" + s + "'");
    return v;
}

} // namespace detail

inline Instance deserialize(std::istream& in) {
    std::string line_text;
    int line_no = 0;

    if (!std::getline(in, line_text)) throw ParseError(1, "empty input");
    ++line_no;
    {
        std::istringstream hs(line_text);
        std::string magic, version;
        hs >> magic >> version;
        if (magic != "frustra-instance")
            throw ParseError(line_no, "not a frustra-instance file");
        if (version != "v1")
            throw ParseError(line_no, "unknown version '" + version + "'");
    }

    Instance inst;
    bool have_n = false, have_k = false, have_seed = false;
    {
        std::istringstream hs(line_text);
        std::string tok;
        hs >> tok >> tok; // magic, version
        while (hs >> tok) {
            std::string value;
            if (detail::parse_kv(tok, "n", value)) {
                inst.n = static_cast<int>(detail::parse_int(value, line_no, "n"));
                have_n = true;
            } else if (detail::parse_kv(tok, "k", value)) {
                inst.k = static_cast<int>(detail::parse_int(value, line_no, "k"));
                have_k = true;
            } else if (detail::parse_kv(tok, "seed", value)) {
                inst.seed = static_cast<std::uint64_t>(
                    std::strtoull(value.c_str(), nullptr, 10));
                have_seed = true;
            } else if (detail::parse_kv(tok, "mode", value)) {
                const auto mode = instance_mode_from(value);
                if (!mode) throw ParseError(line_no, "unknown mode '" + value + "'");
                inst.mode = *mode;
            } else {
                throw ParseError(line_no, "unknown header token '" + tok + "'");
            }
        }
    }
    if (!have_n || !have_k || !have_seed)
        throw ParseError(line_no, "header requires n=, k= and seed=");
    if (inst.n < 1 || inst.k < 1)
        throw ParseError(line_no, "need n >= 1 and k >= 1");

    const StripLattice lattice = inst.lattice();
    std::vector<double> values(lattice.edge_count());
    std::vector<char> seen(lattice.edge_count(), 0);
    FrustrationSet T;

    while (std::getline(in, line_text)) {
        ++line_no;
        if (line_text.empty()) continue;
        std::istringstream ls(line_text);
        std::string tag;
        ls >> tag;
        if (tag == "E") {
            long long id;
            int i1, j1, i2, j2;
            std::string hex;
            if (!(ls >> id >> i1 >> j1 >> i2 >> j2 >> hex))
                throw ParseError(line_no, "malformed E line");
            if (id < 0 || id >= lattice.edge_count())
                throw ParseError(line_no, "edge id out of range");
            const int expected = lattice.edge_between(Coord{i1, j1}, Coord{i2, j2});
            if (expected != id)
                throw ParseError(line_no, "edge id does not match its endpoints");
            if (seen[id]) throw ParseError(line_no, "duplicate edge " + std::to_string(id));
            char* end = nullptr;
            const double v = std::strtod(hex.c_str(), &end);
            if (end == hex.c_str() || *end != '\0')
                throw ParseError(line_no, "bad edge value '" + hex + "'");
            if (!std::isfinite(v)) throw ParseError(line_no, "non-finite edge value");
            values[id] = v;
            seen[id] = 1;
        } else if (tag == "T") {
            int col, row;
            if (!(ls >> col >> row)) throw ParseError(line_no, "malformed T line");
            if (col < 0 || col >= lattice.plaquette_cols() ||
                row < 0 || row >= lattice.plaquette_rows())
                throw ParseError(line_no, "plaquette out of range");
            T.push_back(lattice.plaquette_id(col, row));
        } else {
            throw ParseError(line_no, "unknown line tag '" + tag + "'");
        }
    }

    for (int e = 0; e < lattice.edge_count(); ++e)
        if (!seen[e])
            throw ParseError(line_no, "missing edge " + std::to_string(e) + " (truncated file?)");

    std::sort(T.begin(), T.end());
    if (std::adjacent_find(T.begin(), T.end()) != T.end())
        throw ParseError(line_no, "duplicate T plaquette");
    inst.frustration = std::move(T);

    if (inst.mode == InstanceMode::Dual) {
        for (double v : values)
            if (v <= 0.0) throw ParseError(line_no, "dual-mode weights must be positive");
        inst.weights = std::move(values);
    } else {
        CouplingAssignment J;
        J.values = std::move(values);
        J.seed = inst.seed;
        const FrustrationSet derived = frustration_from_couplings(lattice, J);
        if (derived != inst.frustration)
            throw ParseError(line_no, "T lines disagree with the couplings' frustration set");
        inst.couplings = std::move(J);
        inst.weights = weights_from_couplings(*inst.couplings);
    }
    return inst;
}

inline Instance deserialize(const std::string& text) {
    std::istringstream is(text);
    return deserialize(is);
}

/// Restrict couplings on C(n,k) to the sub-strip C(m,k), m <= n, by edge
/// coordinates. Preserves values bit-exactly.
inline CouplingAssignment restrict_couplings(const StripLattice& big,
                                             const CouplingAssignment& J,
                                             const StripLattice& sub) {
    if (sub.k() != big.k() || sub.n() > big.n())
        throw std::invalid_argument("restrict_couplings: sub-strip must share k and have n <= N");
    CouplingAssignment out;
    out.seed = J.seed;
    out.generator = J.generator + "/restricted";
    out.values.resize(sub.edge_count());
    for (int e = 0; e < sub.edge_count(); ++e) {
        const auto [a, b] = sub.edge_endpoints(e);
        out.values[e] = J.values[big.edge_between(a, b)];
    }
    return out;
}

} // namespace frustra
