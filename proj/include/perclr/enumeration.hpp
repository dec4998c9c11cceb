#pragma once

// Exact expectations over all 2^m states of a small set of optional edges,
// and the Russo-type identity
//   d/dβ E_β[f] = Σ_e p'(β,e) E_β[f(ω^{e+}) - f(ω^{e-})].

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "perclr/lattice.hpp"
#include "perclr/sampling.hpp"

namespace perclr {

inline constexpr std::size_t kMaxOptionalEdges = 24;

struct OptionalEdge {
    Edge edge;
    double kernel = 0.0;  // J(e); p(β,e) = 1 - e^{-βJ}
};

/// Finite graph on a box: nearest neighbours and `forced_edges` always open,
/// each optional edge open independently with probability 1 - e^{-βJ}.
struct FiniteModel {
    Box box;
    std::vector<OptionalEdge> optional_edges;
    std::vector<Edge> forced_edges;

    /// Every long pair of the box optional.
    static FiniteModel full_box(Coord n, int dim);
    /// Chosen long pairs optional, the rest absent.
    static FiniteModel with_edges(Coord n, int dim, const std::vector<Edge>& optional);

    std::vector<LatticePoint> vertices() const;
    std::size_t size() const { return optional_edges.size(); }
    double prob(std::size_t i, double beta) const;
    double prob_derivative(std::size_t i, double beta) const;
    /// Configuration with optional edge i open iff bit i of mask is set.
    Configuration realize(std::uint32_t mask) const;
    void validate() const;
};

/// f: {0,1}^m → ℝ, addressed by bit mask over model.optional_edges.
struct Functional {
    std::string name;
    std::function<double(const FiniteModel&, std::uint32_t mask)> eval;
};

Functional distance_functional(VertexId a, VertexId b);
Functional neg_distance_functional(VertexId a, VertexId b);
Functional diameter_functional();
Functional cut_points_functional();
Functional constant_functional(double c);
/// Π_{i∈edges} ω(e_i), indices into optional_edges.
Functional edge_indicator_product(std::vector<std::size_t> edges);
/// 1{D(a,b) ≤ r}, an increasing event.
Functional distance_at_most(VertexId a, VertexId b, std::int64_t r);

/// Values of f on all 2^m masks; lets several β share one pass over f.
class FunctionalTable {
public:
    FunctionalTable(const FiniteModel& model, const Functional& f);

    const FiniteModel& model() const { return *model_; }
    double operator[](std::uint32_t mask) const { return values_[mask]; }
    std::size_t states() const { return values_.size(); }

    double expectation(double beta) const;
    double russo_derivative(double beta) const;

private:
    const FiniteModel* model_;
    std::vector<double> values_;
};

double exact_expectation(const FiniteModel& model, const Functional& f, double beta);
double russo_derivative(const FiniteModel& model, const Functional& f, double beta);

struct RussoReport {
    double beta = 0.0;
    double h = 0.0;
    double analytic = 0.0;
    double finite_diff = 0.0;
    double abs_error = 0.0;
    bool one_sided = false;  // β < h: second-order forward difference
};

/// Compares the Russo sum to a centred difference (second-order one-sided
/// difference when β < h, since β ≥ 0 is a boundary).
RussoReport verify_russo(const FiniteModel& model, const Functional& f, double beta, double h);

/// d/dβ Λ(n,β) at β = 0 in d = 1: -Σ_{k=2}^{n-1} (n-k) J(k) (k-1).
double lambda_small_beta_derivative(Coord n);

}  // namespace perclr
