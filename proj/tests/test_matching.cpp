#include <doctest.h>

#include <cmath>
#include <vector>

#include "frustra/matching.hpp"
#include "frustra/rng.hpp"

using namespace frustra;

namespace {

// Exhaustive minimum over all perfect matchings (pair-first-free recursion;
// 945 matchings at 10 vertices).
double brute_force_min_matching(int n, const std::vector<std::vector<double>>& w,
                                std::vector<char>& used) {
    int first = -1;
    for (int v = 0; v < n; ++v)
        if (!used[v]) {
            first = v;
            break;
        }
    if (first == -1) return 0.0;
    used[first] = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int v = first + 1; v < n; ++v) {
        if (used[v]) continue;
        used[v] = 1;
        best = std::min(best, w[first][v] + brute_force_min_matching(n, w, used));
        used[v] = 0;
    }
    used[first] = 0;
    return best;
}

std::vector<MatchingEdge> complete_edges(const std::vector<std::vector<double>>& w) {
    std::vector<MatchingEdge> edges;
    const int n = static_cast<int>(w.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, w[i][j]});
    return edges;
}

} // namespace

TEST_SUITE_BEGIN("matching");

TEST_CASE("two vertices: the single edge") {
    const PerfectMatching pm = min_weight_perfect_matching(2, {{0, 1, 3.5}});
    REQUIRE(pm.pairs.size() == 1);
    CHECK(pm.pairs[0] == std::pair<int, int>{0, 1});
    CHECK(pm.weight == doctest::Approx(3.5));
}

TEST_CASE("odd vertex count rejected") {
    CHECK_THROWS_AS(min_weight_perfect_matching(3, {{0, 1, 1.0}}), std::invalid_argument);
}

TEST_CASE("square with cheap diagonal pair matches the 3-matching enumeration") {
    // Vertices 0..3; diagonals cheap.
    std::vector<std::vector<double>> w(4, std::vector<double>(4, 0.0));
    w[0][1] = w[1][0] = 5.0;
    w[1][2] = w[2][1] = 6.0;
    w[2][3] = w[3][2] = 7.0;
    w[0][3] = w[3][0] = 8.0;
    w[0][2] = w[2][0] = 1.0;
    w[1][3] = w[3][1] = 2.0;
    std::vector<char> used(4, 0);
    const double oracle = brute_force_min_matching(4, w, used);
    CHECK(oracle == doctest::Approx(3.0));
    const PerfectMatching pm = min_weight_perfect_matching(4, complete_edges(w));
    CHECK(pm.weight == doctest::Approx(oracle));
}

TEST_CASE("random complete graphs agree with the 945-matching oracle") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(derive_seed(1234, 0, seed));
        const int n = 10;
        std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                w[i][j] = w[j][i] = std::fabs(rng.next_gaussian()) + 1e-6;
        std::vector<char> used(n, 0);
        const double oracle = brute_force_min_matching(n, w, used);
        const PerfectMatching pm = min_weight_perfect_matching(n, complete_edges(w));
        CHECK(pm.weight == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(pm.pairs.size() == static_cast<std::size_t>(n / 2));
    }
}

TEST_CASE("tied integer weights still solve exactly (blossom stress)") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(derive_seed(555, 1, seed));
        const int n = 8;
        std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                w[i][j] = w[j][i] = static_cast<double>(rng.next_below(5) + 1);
        std::vector<char> used(n, 0);
        const double oracle = brute_force_min_matching(n, w, used);
        const PerfectMatching pm = min_weight_perfect_matching(n, complete_edges(w));
        CHECK(pm.weight == doctest::Approx(oracle));
    }
}

TEST_CASE("deterministic output for a fixed instance") {
    Rng rng(99);
    const int n = 12;
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) w[i][j] = w[j][i] = rng.next_double() + 0.1;
    const PerfectMatching a = min_weight_perfect_matching(n, complete_edges(w));
    const PerfectMatching b = min_weight_perfect_matching(n, complete_edges(w));
    CHECK(a.pairs == b.pairs);
    CHECK(a.weight == b.weight);
}

TEST_CASE("max weight matching leaves expensive edges out when free") {
    // Path 0-1-2-3 where the middle edge is heavy: max weight matching picks
    // the two outer edges.
    const std::vector<MatchingEdge> edges{{0, 1, 2.0}, {1, 2, 3.0}, {2, 3, 2.0}};
    const std::vector<int> mate = max_weight_matching(4, edges, false);
    CHECK(mate[0] == 1);
    CHECK(mate[1] == 0);
    CHECK(mate[2] == 3);
    CHECK(mate[3] == 2);
}

TEST_SUITE_END();
