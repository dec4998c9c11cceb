#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perclr/lattice.hpp"

namespace perclr {

enum class MeasureKind { plain, mixed, continuum };

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& s);

/// Law of a configuration. For `mixed`, long edges with ‖e‖_∞ ≤ 2^k - 1 use
/// `beta` and edges with ‖e‖_∞ ≥ 2^k use `beta2`.
struct MeasureSpec {
    MeasureKind kind = MeasureKind::plain;
    double beta = 0.0;
    double beta2 = 0.0;
    int k_threshold = 0;

    static MeasureSpec plain(double beta);
    static MeasureSpec mixed(double beta_short, double beta_long, int k);
    static MeasureSpec continuum(double beta);

    /// Parameter applied to an edge of ∞-length `length` (≥ 2).
    double beta_for_length(Coord length) const;
    /// Largest parameter the measure uses anywhere.
    double max_beta() const;
    void validate() const;

    friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

/// One sampled edge set on a box. Nearest-neighbour edges are implicit.
struct Configuration {
    Box box;
    std::vector<Edge> long_edges;  // sorted, unique, all with ‖e‖_∞ ≥ 2
    MeasureSpec measure;
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;

    bool contains(const Edge& e) const;
};

/// Pure function of (seed, edge) with values in [0,1); symmetric in u,v.
double edge_uniform(std::uint64_t seed, const LatticePoint& u, const LatticePoint& v);
double edge_uniform(std::uint64_t seed, const Box& box, const Edge& e);

/// Pair guard for the exhaustive samplers.
inline constexpr std::uint64_t kMaxDirectPairs = 100'000'000ULL;

/// Exhaustive pair loop: e included iff edge_uniform(seed ^ replica, e) ≤ p(spec, e).
/// Bit-exact reproducible. Throws CapacityError above kMaxDirectPairs.
Configuration sample_direct(const MeasureSpec& spec, Coord n, int dim, std::uint64_t seed,
                            std::uint64_t replica);

/// Same law as sample_direct via geometric skipping per displacement class.
/// O(n + #edges) in d = 1.
Configuration sample_fast(const MeasureSpec& spec, Coord n, int dim, std::uint64_t seed,
                          std::uint64_t replica);

/// Poisson counts of the unsymmetrised process on (u+C)×(v+C) and (v+C)×(u+C),
/// each Poisson(βJ/2).
struct PoissonPairCounts {
    std::uint64_t forward = 0;
    std::uint64_t backward = 0;
};

/// Continuum coupling: per unordered box pair draw both Poisson counts and
/// open the edge iff the symmetrised process hits (u+C)×(v+C).
Configuration sample_continuum(double beta, Coord n, int dim, std::uint64_t seed,
                               std::uint64_t replica);

/// Raw counts for one pair (exposed for checking the Poisson parameter).
PoissonPairCounts continuum_pair_counts(double beta, const LatticePoint& u, const LatticePoint& v,
                                        std::uint64_t seed, std::uint64_t replica);

/// Dispatches on spec.kind (continuum → sample_continuum, else sample_fast).
Configuration sample(const MeasureSpec& spec, Coord n, int dim, std::uint64_t seed,
                     std::uint64_t replica);

/// Harris-coupled configurations for ascending betas: nested edge sets with
/// correct P_β marginals.
std::vector<Configuration> coupled_sweep(const std::vector<double>& betas, Coord n, int dim,
                                         std::uint64_t seed, std::uint64_t replica);

/// ω' = ω ∨ χ with χ independent, open w.p. 1 - e^{-εJ} on 2^{k-1} ≤ ‖e‖_∞ ≤ 2^k - 1.
/// ω must be sampled under mixed(β, β+ε, k); the result has law mixed(β, β+ε, k-1).
Configuration chi_augment(const Configuration& omega, double eps, int k, std::uint64_t seed);

/// χ alone (the edges chi_augment would add, before the union).
std::vector<Edge> chi_edges(const Box& box, double eps, int k, std::uint64_t seed,
                            std::uint64_t replica);

}  // namespace perclr
