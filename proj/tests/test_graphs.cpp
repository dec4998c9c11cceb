#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "perclr/errors.hpp"
#include "perclr/graphs.hpp"
#include "perclr/sampling.hpp"

using namespace perclr;

namespace {

std::vector<Edge> random_long_edges(const Box& box, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<Edge> out;
    for (VertexId a = 0; a < box.volume(); ++a)
        for (VertexId b = a + 1; b < box.volume(); ++b)
            if (box.inf_distance(a, b) >= 2 && coin(rng)) out.emplace_back(a, b);
    return out;
}

}  // namespace

TEST_CASE("path distances at beta zero") {
    const BoxGraph g(Box(10, 1), std::vector<Edge>{});
    const auto f = bfs_distance(g, 3);
    for (VertexId v = 0; v < 10; ++v) CHECK(f.dist[v] == std::abs(static_cast<std::int64_t>(v) - 3));
    CHECK(corner_distance(g) == 9);
    CHECK(bfs_distance(g, LatticePoint{3}).dist == f.dist);
}

TEST_CASE("single long edge shortcut") {
    const std::vector<Edge> e{Edge(0, 9)};
    const BoxGraph g(Box(10, 1), e);
    CHECK(graph_distance(g, 0, 9) == 1);
    CHECK(count_cut_points(g) == 0);
    CHECK(g.long_edge_count() == 1);
}

TEST_CASE("nearest-neighbour edges are ignored, invalid edges rejected") {
    const std::vector<Edge> nn{Edge(0, 1)};
    CHECK(BoxGraph(Box(4, 1), nn).long_edge_count() == 0);
    const std::vector<Edge> loop{Edge(2, 2)};
    CHECK_THROWS_AS(BoxGraph(Box(4, 1), loop), InvalidInput);
    const std::vector<Edge> outside{Edge(0, 7)};
    CHECK_THROWS_AS(BoxGraph(Box(4, 1), outside), InvalidInput);
}

TEST_CASE("diameter at beta zero") {
    for (Coord n : {2, 5, 9}) {
        CHECK(diameter(BoxGraph(Box(n, 1), std::vector<Edge>{})) == n - 1);
        CHECK(diameter(BoxGraph(Box(n, 2), std::vector<Edge>{})) == n - 1);
    }
    CHECK_THROWS_AS(diameter(BoxGraph(Box(65, 2), std::vector<Edge>{})), CapacityError);
}

TEST_CASE("bfs agrees with Floyd-Warshall on random graphs") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 200; ++t) {
        const int dim = t % 3 == 0 ? 2 : 1;
        const Coord n = dim == 1 ? 3 + static_cast<Coord>(rng() % 10) : 3 + static_cast<Coord>(rng() % 3);
        const Box box(n, dim);
        const auto edges = random_long_edges(box, 0.15, rng);
        const BoxGraph g(box, edges);
        const auto fw = oracle::floyd_warshall(box, edges);
        for (VertexId s = 0; s < box.volume(); ++s) {
            const auto f = bfs_distance(g, s);
            for (VertexId v = 0; v < box.volume(); ++v) CHECK(f.dist[v] == fw[s][v]);
        }
        std::int64_t diam = 0;
        for (const auto& row : fw)
            for (auto x : row) diam = std::max(diam, x);
        CHECK(diameter(g) == diam);
        CHECK(corner_distance(g) == fw[0][box.corner_far()]);
    }
}

TEST_CASE("indirect distance") {
    const BoxGraph path4(Box(4, 1), std::vector<Edge>{});
    const std::vector<VertexId> a0{0}, b3{3}, b1{1};
    CHECK(indirect_distance(path4, a0, b3) == 3);
    const BoxGraph path2(Box(2, 1), std::vector<Edge>{});
    CHECK_FALSE(indirect_distance(path2, a0, b1).has_value());
    CHECK_THROWS_AS(indirect_distance(path4, a0, a0), InvalidInput);
    CHECK_THROWS_AS(indirect_distance(path4, std::vector<VertexId>{}, b3), InvalidInput);

    std::mt19937_64 rng(7);
    for (int t = 0; t < 150; ++t) {
        const Coord n = 4 + static_cast<Coord>(rng() % 7);
        const Box box(n, 1);
        const auto edges = random_long_edges(box, 0.2, rng);
        const BoxGraph g(box, edges);
        std::vector<VertexId> a, b;
        for (VertexId v = 0; v < box.volume(); ++v) {
            const auto r = rng() % 3;
            if (r == 0) a.push_back(v);
            if (r == 1) b.push_back(v);
        }
        if (a.empty() || b.empty()) continue;
        std::vector<Edge> cross;
        for (VertexId x : a)
            for (VertexId y : b) cross.emplace_back(x, y);
        const auto fw = oracle::floyd_warshall(box, edges, cross);
        std::int64_t best = oracle::kInf;
        for (VertexId x : a)
            for (VertexId y : b) best = std::min(best, fw[x][y]);
        const auto got = indirect_distance(g, a, b);
        if (best >= oracle::kInf) {
            CHECK_FALSE(got.has_value());
        } else {
            REQUIRE(got.has_value());
            CHECK(*got == best);
        }
    }
}

TEST_CASE("cut points") {
    CHECK(count_cut_points(BoxGraph(Box(12, 1), std::vector<Edge>{})) == 10);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        const Coord n = 3 + static_cast<Coord>(rng() % 10);
        const Box box(n, 1);
        const auto edges = random_long_edges(box, 0.1, rng);
        const BoxGraph g(box, edges);
        std::int64_t brute = 0;
        for (Coord w = 1; w < n - 1; ++w) {
            bool covered = false;
            for (const Edge& e : edges)
                covered = covered || (static_cast<Coord>(e.a) < w && static_cast<Coord>(e.b) > w);
            brute += !covered;
        }
        CHECK(count_cut_points(g) == brute);
        CHECK(count_cut_points(g) <= corner_distance(g));
    }
    CHECK_THROWS(count_cut_points(BoxGraph(Box(4, 2), std::vector<Edge>{})));
}

TEST_CASE("exact cut-point mean") {
    CHECK(cutpoint_mean_exact(10, 0.0) == 8.0);
    CHECK(cutpoint_mean_exact(4, 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    for (Coord n : {5, 16, 64})
        for (double beta : {0.5, 1.0, 2.0})
            CHECK(cutpoint_mean_exact(n, beta) >= (n - 2) * std::pow(double(n), -beta));
    for (Coord n : {4, 9, 16})
        for (Coord w = 1; w < n - 1; ++w)
            CHECK(oracle::cut_integral_gk(w, n) ==
                  doctest::Approx(std::log(double((w + 1) * (n - w)) / double(n))).epsilon(1e-10));
    CHECK_THROWS(cutpoint_mean_exact(2, 1.0));
}

TEST_CASE("cut-point Monte Carlo at n=4, beta=1") {
    const int m = 100000;
    long double s = 0.0L, ss = 0.0L;
    for (int r = 0; r < m; ++r) {
        const double c = static_cast<double>(count_cut_points(BoxGraph(sample_direct(MeasureSpec::plain(1.0), 4, 1, 6, r))));
        s += c;
        ss += c * c;
    }
    const double mean = static_cast<double>(s / m);
    const double se = std::sqrt((static_cast<double>(ss / m) - mean * mean) / m);
    CHECK(std::abs(mean - 4.0 / 3.0) < 3.0 * se);
}
