#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "perclr/enumeration.hpp"
#include "perclr/errors.hpp"
#include "perclr/kernel.hpp"

using namespace perclr;

namespace {

std::vector<Edge> edges_of(const FiniteModel& m) {
    std::vector<Edge> out;
    for (const auto& oe : m.optional_edges) out.push_back(oe.edge);
    return out;
}

std::vector<double> probs_of(const FiniteModel& m, double beta) {
    std::vector<double> out;
    for (std::size_t i = 0; i < m.size(); ++i) out.push_back(m.prob(i, beta));
    return out;
}

}  // namespace

TEST_CASE("finite models") {
    const auto box4 = FiniteModel::full_box(4, 1);
    CHECK(box4.size() == 3);
    CHECK(box4.vertices().size() == 4);
    CHECK(box4.prob(0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(box4.realize(0b111).long_edges.size() == 3);
    CHECK_THROWS_AS(FiniteModel::with_edges(4, 1, {Edge(0, 1)}), InvalidInput);
    CHECK_THROWS_AS(FiniteModel::with_edges(4, 1, {Edge(0, 5)}), InvalidInput);
    CHECK_THROWS_AS(FunctionalTable(FiniteModel::full_box(9, 1), constant_functional(1.0)), CapacityError);
}

TEST_CASE("exact expectations") {
    CHECK(exact_expectation(FiniteModel::full_box(5, 1), constant_functional(1.0), 0.7) ==
          doctest::Approx(1.0).epsilon(1e-14));
    const auto path3 = FiniteModel::with_edges(3, 1, {Edge(0, 2)});
    CHECK(exact_expectation(path3, distance_functional(0, 2), 1.0) == doctest::Approx(1.75).epsilon(1e-14));
    const auto box4 = FiniteModel::full_box(4, 1);
    const double e4 = exact_expectation(box4, distance_functional(0, 3), 1.0);
    CHECK(e4 == doctest::Approx(oracle::expected_distance(4, edges_of(box4), probs_of(box4, 1.0), 0, 3)).epsilon(1e-13));
    CHECK(exact_expectation(path3, distance_functional(0, 2), 1.0) + 1.0 == doctest::Approx(oracle::lambda3(1.0)));
}

TEST_CASE("exact expectations against brute-force oracle on random models") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 40; ++t) {
        const Coord n = 4 + static_cast<Coord>(rng() % 5);
        std::vector<Edge> pool;
        for (VertexId a = 0; a < static_cast<VertexId>(n); ++a)
            for (VertexId b = a + 2; b < static_cast<VertexId>(n); ++b) pool.emplace_back(a, b);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(std::min<std::size_t>(pool.size(), 1 + rng() % 8));
        const auto m = FiniteModel::with_edges(n, 1, pool);
        const double beta = 0.1 + 0.3 * static_cast<double>(rng() % 10);
        const auto ref = oracle::expected_distance(n, pool, probs_of(m, beta), 0, static_cast<VertexId>(n - 1));
        CHECK(exact_expectation(m, distance_functional(0, static_cast<VertexId>(n - 1)), beta) ==
              doctest::Approx(ref).epsilon(1e-12));
        const double h = 1e-5;
        const double fd = (oracle::expected_distance(n, pool, probs_of(m, beta + h), 0, static_cast<VertexId>(n - 1)) -
                           oracle::expected_distance(n, pool, probs_of(m, beta - h), 0, static_cast<VertexId>(n - 1))) /
                          (2 * h);
        CHECK(std::abs(russo_derivative(m, distance_functional(0, static_cast<VertexId>(n - 1)), beta) - fd) < 1e-7);
    }
}

TEST_CASE("russo derivative examples") {
    const auto path3 = FiniteModel::with_edges(3, 1, {Edge(0, 2)});
    CHECK(russo_derivative(path3, distance_functional(0, 2), 1.0) == doctest::Approx(-0.21576155).epsilon(1e-8));
    CHECK(russo_derivative(FiniteModel::full_box(6, 1), constant_functional(3.0), 1.3) == 0.0);
    const auto box5 = FiniteModel::full_box(5, 1);
    for (double beta : {0.0, 0.5, 2.0}) {
        CHECK(russo_derivative(box5, distance_at_most(0, 4, 2), beta) >= 0.0);
        CHECK(russo_derivative(box5, edge_indicator_product({0, 3}), beta) >= 0.0);
        CHECK(russo_derivative(box5, neg_distance_functional(0, 4), beta) ==
              doctest::Approx(-russo_derivative(box5, distance_functional(0, 4), beta)));
    }
}

TEST_CASE("verify_russo") {
    const auto path3 = FiniteModel::with_edges(3, 1, {Edge(0, 2)});
    const auto r = verify_russo(path3, distance_functional(0, 2), 1.0, 1e-4);
    CHECK_FALSE(r.one_sided);
    CHECK(r.abs_error < 1e-7);

    const auto box4 = FiniteModel::full_box(4, 1);
    const auto f = distance_functional(0, 3);
    const double e1 = verify_russo(box4, f, 1.0, 1e-2).abs_error;
    const double e2 = verify_russo(box4, f, 1.0, 5e-3).abs_error;
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);

    for (Coord n = 3; n <= 6; ++n) {
        const auto m = FiniteModel::full_box(n, 1);
        const auto r0 = verify_russo(m, distance_functional(0, static_cast<VertexId>(n - 1)), 0.0, 1e-4);
        CHECK(r0.one_sided);
        CHECK(r0.abs_error < 1e-6);
        double expect = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto& e = m.optional_edges[i].edge;
            expect -= m.prob_derivative(i, 0.0) * static_cast<double>(e.b - e.a - 1);
        }
        CHECK(r0.analytic == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK_THROWS_AS(verify_russo(path3, distance_functional(0, 2), 1.0, 0.0), InvalidInput);
}

TEST_CASE("small-beta derivative") {
    CHECK(lambda_small_beta_derivative(3) == doctest::Approx(-std::log(4.0 / 3.0)).epsilon(1e-14));
    CHECK(lambda_small_beta_derivative(4) ==
          doctest::Approx(-(2 * std::log(4.0 / 3.0) + 2 * std::log(9.0 / 8.0))).epsilon(1e-14));
    CHECK(lambda_small_beta_derivative(4) == doctest::Approx(-0.81093).epsilon(1e-5));
    for (Coord n = 3; n <= 8; ++n)
        CHECK(lambda_small_beta_derivative(n) ==
              doctest::Approx(russo_derivative(FiniteModel::full_box(n, 1), distance_functional(0, static_cast<VertexId>(n - 1)), 0.0))
                  .epsilon(1e-12));
    CHECK_THROWS_AS(lambda_small_beta_derivative(2), InvalidInput);
}
