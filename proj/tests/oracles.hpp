#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "perclr/lattice.hpp"

namespace oracle {

using perclr::Coord;
using perclr::Edge;
using perclr::VertexId;

// ∫_0^1 ∫_0^1 (k + s - t)^{-2} dt ds by nested adaptive Gauss-Kronrod.
inline double kernel_1d_gk(Coord k) {
    using boost::math::quadrature::gauss_kronrod;
    const double kk = static_cast<double>(k);
    auto inner = [kk](double s) {
        auto f = [kk, s](double t) { return 1.0 / ((kk + s - t) * (kk + s - t)); };
        return gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-15);
    };
    return gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 15, 1e-15);
}

// Box-pair integral in d = 2 over [0,1]^2 x (delta + [0,1]^2), tensor Gauss-Legendre
// with each unit interval split into `panels` pieces.
inline double kernel_2d_gl(Coord dx, Coord dy, int panels = 4) {
    const auto& nodes = boost::math::quadrature::gauss<double, 20>::abscissa();
    const auto& weights = boost::math::quadrature::gauss<double, 20>::weights();
    std::vector<double> xs, ws;
    for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels, h = 0.5 / panels, mid = a + h;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            xs.push_back(mid + h * nodes[i]);
            ws.push_back(h * weights[i]);
            if (nodes[i] != 0.0) {
                xs.push_back(mid - h * nodes[i]);
                ws.push_back(h * weights[i]);
            }
        }
    }
    long double total = 0.0L;
    const std::size_t m = xs.size();
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            const double ux = xs[a], uy = xs[b], wu = ws[a] * ws[b];
            long double inner = 0.0L;
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t e = 0; e < m; ++e) {
                    const double rx = static_cast<double>(dx) + xs[c] - ux;
                    const double ry = static_cast<double>(dy) + xs[e] - uy;
                    const double r2 = rx * rx + ry * ry;
                    inner += ws[c] * ws[e] / (r2 * r2);
                }
            total += wu * inner;
        }
    return static_cast<double>(total);
}

// ∫_0^w ∫_{w+1}^n (y - x)^{-2} dy dx.
inline double cut_integral_gk(Coord w, Coord n) {
    using boost::math::quadrature::gauss_kronrod;
    auto inner = [&](double x) {
        auto f = [x](double y) { return 1.0 / ((y - x) * (y - x)); };
        return gauss_kronrod<double, 31>::integrate(f, static_cast<double>(w + 1), static_cast<double>(n), 15, 1e-15);
    };
    return gauss_kronrod<double, 31>::integrate(inner, 0.0, static_cast<double>(w), 15, 1e-15);
}

inline constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// All-pairs graph distances on a box with ∞-norm nearest neighbours plus extra edges.
inline std::vector<std::vector<std::int64_t>> floyd_warshall(const perclr::Box& box, const std::vector<Edge>& edges,
                                                             const std::vector<Edge>& removed = {}) {
    const auto n = static_cast<std::size_t>(box.volume());
    std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, kInf));
    auto is_removed = [&](VertexId a, VertexId b) {
        for (const auto& e : removed)
            if (e == Edge(a, b)) return true;
        return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && box.inf_distance(i, j) == 1 && !is_removed(i, j)) d[i][j] = 1;
    }
    for (const auto& e : edges)
        if (!is_removed(e.a, e.b)) d[e.a][e.b] = d[e.b][e.a] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

// Exact E[D(a,b)] on a d=1 path {0..n-1} with independent optional long edges.
inline double expected_distance(Coord n, const std::vector<Edge>& optional, const std::vector<double>& probs,
                                VertexId a, VertexId b) {
    const perclr::Box box(n, 1);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << optional.size()); ++mask) {
        double w = 1.0;
        std::vector<Edge> open;
        for (std::size_t i = 0; i < optional.size(); ++i) {
            if (mask >> i & 1u) {
                w *= probs[i];
                open.push_back(optional[i]);
            } else {
                w *= 1.0 - probs[i];
            }
        }
        total += w * static_cast<double>(floyd_warshall(box, open)[a][b]);
    }
    return total;
}

// Σ_{k=2}^{n-1} (n-k) / k^2: mean long-edge count on a d=1 box at β = 1.
inline double mean_long_edges_beta1(Coord n) {
    long double s = 0.0L;
    for (Coord k = 2; k < n; ++k) s += static_cast<long double>(n - k) / (static_cast<long double>(k) * k);
    return static_cast<double>(s);
}

// Λ(3, β) = 2 + (3/4)^β.
inline double lambda3(double beta) { return 2.0 + std::pow(0.75, beta); }

}  // namespace oracle
