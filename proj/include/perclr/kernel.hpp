#pragma once

// The kernel J(u,v) = ∫_{u+[0,1)^d} ∫_{v+[0,1)^d} ‖x-y‖^{-2d} dx dy and the
// connection probabilities p(β,{u,v}) = 1 - exp(-β J(u,v)) built on it.
//
// Nearest neighbours (‖u-v‖_∞ = 1, diagonals included) have J = +∞ and are
// always open. In d = 1 the closed form J(k) = log(k²/(k²-1)) is used; in
// d ≥ 2 J is obtained by adaptive quadrature and cached by canonical
// displacement.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>

#include "perclr/lattice.hpp"

namespace perclr {

struct KernelValue {
    double value = 0.0;       // +inf for touching boxes
    bool exact = false;       // closed form (true) or quadrature (false)
    double quad_error = 0.0;  // absolute error bound, 0 when exact

    bool infinite() const { return value == std::numeric_limits<double>::infinity(); }
};

inline constexpr double kQuadratureTolerance = 1e-10;

/// Closed form for d = 1, k ≥ 2.
double kernel_1d(Coord k);

/// J for a displacement (any sign/ordering). Throws InvalidInput for δ = 0.
KernelValue kernel_at(std::span<const Coord> delta);

/// J(u,v). Throws InvalidInput when u == v or dimensions differ.
KernelValue kernel_integral(const LatticePoint& u, const LatticePoint& v);

/// Uncached adaptive quadrature of the tent-weighted form
/// ∫_{[-1,1]^d} Π(1-|z_i|) ‖δ+z‖^{-2d} dz; requires ‖δ‖_∞ ≥ 2.
/// Usable in every dimension (d = 1 included, for cross-checks).
/// Throws NumericError carrying the partial estimate if it fails to converge.
KernelValue kernel_quadrature(std::span<const Coord> delta, double abs_tol = kQuadratureTolerance);

/// 1 - e^{-βJ}; exactly 1 for infinite J, exactly 0 for β = 0 and finite J.
double connection_prob(double beta, double kernel);
double connection_prob(double beta, const LatticePoint& u, const LatticePoint& v);

/// d/dβ p(β,e) = J e^{-βJ}; only defined for ‖u-v‖_∞ ≥ 2.
double connection_prob_derivative(double beta, double kernel);
double connection_prob_derivative(double beta, const LatticePoint& u, const LatticePoint& v);

/// Σ_{x∈V_u^n} Σ_{y∈V_v^n} J(x,y) over the blocks V_u^n = nu + {0..n-1}^d.
/// Requires ‖u-v‖_∞ ≥ 2.
double block_kernel_sum(const LatticePoint& u, const LatticePoint& v, Coord n);

struct DegreeEstimate {
    double value = 0.0;       // (3^d - 1) + Σ_{‖w‖_∞ ∈ [2,R]} p(β,{0,w})
    double tail_bound = 0.0;  // upper bound on the neglected shells ‖w‖_∞ > R
    double quad_error = 0.0;  // accumulated quadrature error (0 in d = 1)
    Coord radius = 0;
};

/// μ_β = E_β[deg(0)] truncated at radius R (R ≤ 0 picks the default for d).
DegreeEstimate expected_degree(double beta, int dim, Coord radius = 0);

/// Process-wide displacement→kernel cache statistics and persistence (d ≥ 2).
struct KernelCacheStats {
    std::size_t entries = 0;
    std::size_t hits = 0;
    std::size_t misses = 0;
};
KernelCacheStats kernel_cache_stats();
void kernel_cache_clear();
/// CSV rows: dim,delta (space separated canonical coords),value,quad_error.
void kernel_cache_save(const std::filesystem::path& path);
std::size_t kernel_cache_load(const std::filesystem::path& path);

}  // namespace perclr
