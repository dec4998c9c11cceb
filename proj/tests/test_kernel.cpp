#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "perclr/errors.hpp"
#include "perclr/kernel.hpp"

using namespace perclr;

TEST_CASE("d=1 closed form against Gauss-Kronrod oracle") {
    for (Coord k = 2; k <= 50; ++k) {
        const double oracle_value = oracle::kernel_1d_gk(k);
        CHECK(std::abs(kernel_1d(k) - oracle_value) < 1e-10);
        const std::vector<Coord> d{k};
        const auto q = kernel_quadrature(d);
        CHECK(std::abs(q.value - oracle_value) < 1e-10);
        CHECK_FALSE(q.exact);
    }
}

TEST_CASE("kernel examples in d=1") {
    CHECK(kernel_integral(LatticePoint{0}, LatticePoint{2}).value == doctest::Approx(0.28768207245178).epsilon(1e-12));
    CHECK(kernel_integral(LatticePoint{0}, LatticePoint{2}).exact);
    CHECK(kernel_integral(LatticePoint{0}, LatticePoint{1}).infinite());
    const double j10 = kernel_integral(LatticePoint{0}, LatticePoint{10}).value;
    CHECK(j10 >= 1.0 / 121);
    CHECK(j10 <= 1.0 / 81);
    CHECK(j10 == doctest::Approx(std::log(100.0 / 99.0)).epsilon(1e-14));
    CHECK(kernel_1d(-7) == kernel_1d(7));
    CHECK_THROWS_AS(kernel_integral(LatticePoint{3}, LatticePoint{3}), InvalidInput);
    CHECK_THROWS_AS(kernel_integral(LatticePoint{3}, LatticePoint{3, 1}), InvalidInput);
}

TEST_CASE("d=2 quadrature against tensor Gauss-Legendre oracle") {
    for (auto [dx, dy] : std::vector<std::pair<Coord, Coord>>{{2, 0}, {2, 1}, {2, 2}, {3, 1}, {5, 4}}) {
        const auto j = kernel_integral(LatticePoint{0, 0}, LatticePoint{dx, dy});
        CHECK_FALSE(j.exact);
        CHECK(j.quad_error <= kQuadratureTolerance);
        CHECK(j.value == doctest::Approx(oracle::kernel_2d_gl(dx, dy)).epsilon(1e-8));
    }
    CHECK(kernel_integral(LatticePoint{0, 0}, LatticePoint{1, 1}).infinite());
}

TEST_CASE("kernel is symmetric under lattice symmetries") {
    const auto a = kernel_integral(LatticePoint{0, 0, 0}, LatticePoint{3, -1, 2}).value;
    const auto b = kernel_integral(LatticePoint{0, 0, 0}, LatticePoint{-2, 3, 1}).value;
    CHECK(a == b);
}

TEST_CASE("connection probability") {
    const LatticePoint o{0};
    CHECK(connection_prob(1.0, o, LatticePoint{2}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(connection_prob(0.0, o, LatticePoint{9}) == 0.0);
    CHECK(connection_prob(0.5, o, LatticePoint{5}) == doctest::Approx(1 - std::sqrt(24.0 / 25.0)).epsilon(1e-12));
    CHECK(connection_prob(0.0, o, LatticePoint{1}) == 1.0);
    for (Coord k = 2; k < 200; ++k)
        CHECK(connection_prob(1.0, o, LatticePoint{k}) == doctest::Approx(1.0 / double(k * k)).epsilon(1e-12));
}

TEST_CASE("connection probability derivative") {
    const LatticePoint o{0}, v{2};
    CHECK(connection_prob_derivative(0.0, o, v) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));
    CHECK(connection_prob_derivative(1.0, o, v) == doctest::Approx(0.75 * std::log(4.0 / 3.0)).epsilon(1e-14));
    CHECK_THROWS(connection_prob_derivative(1.0, o, LatticePoint{1}));
    for (double beta : {0.2, 1.0, 3.0}) {
        for (Coord k : {2, 3, 7, 40}) {
            const double h = 1e-5;
            const double fd =
                (connection_prob(beta + h, o, LatticePoint{k}) - connection_prob(beta - h, o, LatticePoint{k})) / (2 * h);
            CHECK(connection_prob_derivative(beta, o, LatticePoint{k}) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("probability and derivative bounds on random edges") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> beta_dist(0.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const int dim = 1 + static_cast<int>(rng() % 2);
        std::vector<Coord> c(static_cast<std::size_t>(dim));
        do {
            for (auto& x : c) x = static_cast<Coord>(rng() % 25) - 12;
        } while (inf_norm(c) < 2);
        const LatticePoint o(std::vector<Coord>(c.size(), 0)), v(c);
        const double beta = beta_dist(rng);
        const double r = euclid_norm(c), sd = std::sqrt(double(dim)), p2d = 2.0 * dim;
        const double j = kernel_integral(o, v).value;
        const double p = connection_prob(beta, j), dp = connection_prob_derivative(beta, j);
        CHECK(j >= 1.0 / std::pow(r + sd, p2d));
        CHECK(j <= 1.0 / std::pow(r - sd, p2d));
        CHECK(j <= 1.0);
        CHECK(dp <= 1.0 / std::pow(r - sd, p2d));
        CHECK(dp >= std::exp(-beta) / std::pow(r + sd, p2d));
        CHECK(p >= std::min(beta / (2.0 * std::pow(r + sd, p2d)), 0.5));
        CHECK(p <= beta / std::pow(r - sd, p2d));
    }
}

TEST_CASE("block kernel sums") {
    const double j2 = kernel_1d(2);
    const double explicit_sum = std::log(9.0 / 8) + 2 * std::log(16.0 / 15) + std::log(25.0 / 24);
    CHECK(explicit_sum == doctest::Approx(std::log(4.0 / 3)).epsilon(1e-14));
    CHECK(std::abs(block_kernel_sum(LatticePoint{0}, LatticePoint{2}, 2) - j2) < 1e-12);
    CHECK(std::abs(block_kernel_sum(LatticePoint{0}, LatticePoint{2}, 4) - j2) < 1e-12);
    CHECK(block_kernel_sum(LatticePoint{0}, LatticePoint{3}, 1) == kernel_1d(3));
    for (Coord n : {1, 2, 4, 8})
        for (Coord k : {2, 3, 5, 11}) CHECK(std::abs(block_kernel_sum(LatticePoint{0}, LatticePoint{k}, n) - kernel_1d(k)) < 1e-10);
    const double j21 = kernel_integral(LatticePoint{0, 0}, LatticePoint{2, 1}).value;
    CHECK(std::abs(block_kernel_sum(LatticePoint{0, 0}, LatticePoint{2, 1}, 2) - j21) < 1e-9);
    CHECK_THROWS(block_kernel_sum(LatticePoint{0}, LatticePoint{1}, 2));
}

TEST_CASE("expected degree") {
    CHECK(expected_degree(0.0, 1).value == 2.0);
    const auto d1 = expected_degree(1.0, 1);
    const double exact = 2.0 + 2.0 * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0);
    CHECK(std::abs(d1.value - exact) <= d1.tail_bound + 1e-9);
    CHECK(d1.value == doctest::Approx(3.28987).epsilon(1e-5));
    CHECK(expected_degree(2.0, 1).value > d1.value);
    CHECK(expected_degree(0.0, 2).value == 8.0);
    const auto d2 = expected_degree(1.0, 2, 16);
    CHECK(d2.value > 8.0);
    CHECK(d2.tail_bound > 0.0);
}

TEST_CASE("kernel cache persists bit-identically") {
    kernel_cache_clear();
    const LatticePoint o{0, 0};
    const double a = kernel_integral(o, LatticePoint{3, 2}).value;
    const double b = kernel_integral(o, LatticePoint{-2, 3}).value;
    CHECK(a == b);
    auto stats = kernel_cache_stats();
    CHECK(stats.entries == 1);
    CHECK(stats.hits >= 1);
    const auto path = std::filesystem::temp_directory_path() / "perclr_kernel_cache_test.csv";
    kernel_cache_save(path);
    kernel_cache_clear();
    CHECK(kernel_cache_stats().entries == 0);
    CHECK(kernel_cache_load(path) == 1);
    CHECK(kernel_integral(o, LatticePoint{3, 2}).value == a);
    kernel_cache_clear();
    CHECK(kernel_integral(o, LatticePoint{3, 2}).value == a);
    std::filesystem::remove(path);
}
