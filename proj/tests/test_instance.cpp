#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "frustra/instance.hpp"
#include "frustra/lattice.hpp"

using namespace frustra;

TEST_SUITE_BEGIN("instance");

TEST_CASE("coupling sampling is seed-deterministic") {
    const StripLattice L(3, 2);
    const CouplingAssignment a = sample_couplings(L, 42);
    const CouplingAssignment b = sample_couplings(L, 42);
    CHECK(a.values == b.values);
    const CouplingAssignment c = sample_couplings(L, 43);
    CHECK(a.values != c.values);
}

TEST_CASE("empirical mean of the coupling law is near zero") {
    const StripLattice L(6, 6);
    double sum = 0.0;
    long count = 0;
    for (std::uint64_t s = 0; s < 800; ++s) {
        const CouplingAssignment J = sample_couplings(L, derive_seed(7, 0, s));
        for (double v : J.values) sum += v;
        count += J.values.size();
    }
    REQUIRE(count > 100000);
    CHECK(std::fabs(sum / count) < 0.02);
}

TEST_CASE("no |J| collisions at 64-bit precision") {
    const StripLattice L(2, 2);
    std::set<double> seen;
    long total = 0;
    for (std::uint64_t s = 0; s < 10000 / L.edge_count() + 1; ++s) {
        const CouplingAssignment J = sample_couplings(L, derive_seed(9, 0, s));
        for (double v : J.values) {
            seen.insert(std::fabs(v));
            ++total;
        }
    }
    CHECK(static_cast<long>(seen.size()) == total);
}

TEST_CASE("frustration from couplings") {
    const StripLattice L(2, 2);
    SUBCASE("all positive: no frustration") {
        CouplingAssignment J;
        J.values.assign(L.edge_count(), 1.0);
        CHECK(frustration_from_couplings(L, J).empty());
    }
    SUBCASE("one interior negative edge frustrates exactly its two plaquettes") {
        CouplingAssignment J;
        J.values.assign(L.edge_count(), 1.0);
        const int e = L.vertical_edge_id(0, 0); // interior vertical edge
        J.values[e] = -1.0;
        const FrustrationSet T = frustration_from_couplings(L, J);
        REQUIRE(T.size() == 2);
        // The two plaquettes sharing that edge: columns k-1 and k at row n.
        CHECK(T[0] == L.plaquette_id(1, 2));
        CHECK(T[1] == L.plaquette_id(2, 2));
    }
    SUBCASE("parity of |T| equals parity of negative boundary count") {
        for (const auto& [n, k] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{4, 3}}) {
            const StripLattice Lnk(n, k);
            for (std::uint64_t s = 0; s < 500; ++s) {
                const CouplingAssignment J = sample_couplings(Lnk, derive_seed(21, n * 10 + k, s));
                int neg_boundary = 0;
                for (int e : Lnk.boundary_cycle_edges())
                    if (J.values[e] < 0.0) ++neg_boundary;
                const FrustrationSet T = frustration_from_couplings(Lnk, J);
                CHECK(T.size() % 2 == static_cast<std::size_t>(neg_boundary % 2));
            }
        }
    }
}

TEST_CASE("parity-constrained T sampling") {
    const StripLattice L(2, 2);
    const PlaquetteGrid G(L);

    SUBCASE("every draw satisfies every nested parity constraint") {
        for (std::uint64_t s = 0; s < 10000; ++s) {
            const FrustrationSet T = sample_T_parity(G, derive_seed(5, 0, s));
            for (int kp = 1; kp <= G.k(); ++kp) {
                const auto sub = sublattice_plaquettes(G, kp);
                long cnt = 0;
                for (int p : T)
                    if (std::binary_search(sub.begin(), sub.end(), p)) ++cnt;
                REQUIRE(cnt % 2 == 0);
            }
        }
    }

    SUBCASE("P(T = empty) matches the closed-form even-subset count") {
        // k blocks of size 4n, each uniform over its even subsets:
        // P(empty) = prod 2^-(4n-1).
        const long N = 100000;
        const double p0 = std::pow(2.0, -G.k() * (4.0 * G.n() - 1.0));
        long empties = 0;
        for (long s = 0; s < N; ++s)
            if (sample_T_parity(G, derive_seed(6, 0, s)).empty()) ++empties;
        const double sigma = std::sqrt(p0 * (1 - p0) * N);
        CHECK(std::fabs(empties - p0 * N) <= 3.0 * sigma + 1.0);
    }

    SUBCASE("marginal inclusion of a fixed plaquette is about 1/2") {
        const long N = 20000;
        const int probe = G.plaquette_id(1, 1);
        long hits = 0;
        for (long s = 0; s < N; ++s) {
            const FrustrationSet T = sample_T_parity(G, derive_seed(8, 0, s));
            if (std::binary_search(T.begin(), T.end(), probe)) ++hits;
        }
        const double sigma = std::sqrt(0.25 * N);
        CHECK(std::fabs(hits - 0.5 * N) <= 4.0 * sigma);
    }
}

TEST_CASE("serialization round trip is bit-exact") {
    const StripLattice L(2, 1);
    SUBCASE("signed instance") {
        const Instance inst = make_signed_instance(L, 77);
        const Instance back = deserialize(serialize(inst));
        CHECK(back.n == inst.n);
        CHECK(back.k == inst.k);
        CHECK(back.seed == inst.seed);
        CHECK(back.mode == inst.mode);
        REQUIRE(back.couplings.has_value());
        CHECK(back.couplings->values == inst.couplings->values);
        CHECK(back.weights == inst.weights);
        CHECK(back.frustration == inst.frustration);
    }
    SUBCASE("dual instance") {
        const Instance inst = make_dual_instance(L, 78);
        const Instance back = deserialize(serialize(inst));
        CHECK(back.weights == inst.weights);
        CHECK(back.frustration == inst.frustration);
        CHECK_FALSE(back.couplings.has_value());
    }
    SUBCASE("instance with empty T round-trips") {
        Instance inst = make_dual_instance(L, 1);
        inst.frustration.clear();
        const Instance back = deserialize(serialize(inst));
        CHECK(back.frustration.empty());
    }
}

TEST_CASE("deserialization error paths") {
    const StripLattice L(2, 1);
    const Instance inst = make_signed_instance(L, 3);
    const std::string text = serialize(inst);

    SUBCASE("truncated file is a parse error, not a partial instance") {
        const std::string cut = text.substr(0, text.size() / 2);
        CHECK_THROWS_AS(deserialize(cut), ParseError);
    }
    SUBCASE("bad magic") {
        CHECK_THROWS_AS(deserialize(std::string("nonsense v1 n=1 k=1 seed=0\n")), ParseError);
    }
    SUBCASE("unknown version is rejected") {
        std::string bad = text;
        bad.replace(bad.find("v1"), 2, "v9");
        CHECK_THROWS_AS(deserialize(bad), ParseError);
    }
    SUBCASE("unknown header token is rejected") {
        std::string bad = text;
        bad.insert(bad.find('\n'), " zork=1");
        CHECK_THROWS_AS(deserialize(bad), ParseError);
    }
    SUBCASE("T inconsistent with couplings is rejected") {
        std::string bad = text;
        bad += "T 0 0\n"; // duplicates or flips a plaquette
        CHECK_THROWS_AS(deserialize(bad), ParseError);
    }
    SUBCASE("parse errors carry a line number") {
        try {
            deserialize(std::string("frustra-instance v1 n=1 k=1 seed=0 mode=dual\nE bogus\n"));
            FAIL("expected ParseError");
        } catch (const ParseError& pe) {
            CHECK(pe.line() == 2);
        }
    }
}

TEST_CASE("restriction preserves values bit-exactly") {
    const StripLattice big(4, 2);
    const StripLattice sub(2, 2);
    const CouplingAssignment J = sample_couplings(big, 11);
    const CouplingAssignment R = restrict_couplings(big, J, sub);
    for (int e = 0; e < sub.edge_count(); ++e) {
        const auto [a, b] = sub.edge_endpoints(e);
        CHECK(R.values[e] == J.values[big.edge_between(a, b)]);
    }
}

TEST_SUITE_END();
