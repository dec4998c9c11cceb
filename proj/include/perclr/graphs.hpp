#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perclr/lattice.hpp"
#include "perclr/sampling.hpp"

namespace perclr {

/// Undirected graph on a box: nearest neighbours (‖u-v‖_∞ = 1) implicit,
/// long edges in CSR adjacency.
class BoxGraph {
public:
    BoxGraph(const Box& box, std::span<const Edge> long_edges);
    explicit BoxGraph(const Configuration& config);

    const Box& box() const { return box_; }
    VertexId vertex_count() const { return box_.volume(); }
    std::size_t long_edge_count() const { return edges_.size(); }
    std::span<const Edge> long_edges() const { return edges_; }

    std::span<const VertexId> long_neighbors(VertexId v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }

    /// Calls fn(w) for every neighbour w of v.
    template <class Fn>
    void for_each_neighbor(VertexId v, Fn&& fn) const;

private:
    Box box_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<VertexId> adj_;
    std::vector<std::int64_t> nn_offsets_;  // linear offsets of the 3^d - 1 neighbours
    std::vector<std::vector<Coord>> nn_steps_;
};

struct DistanceField {
    VertexId source = 0;
    std::vector<std::int64_t> dist;
};

DistanceField bfs_distance(const BoxGraph& g, VertexId source);
DistanceField bfs_distance(const BoxGraph& g, const LatticePoint& source);

/// D(s,t) restricted to the box, stopping as soon as t is reached.
std::int64_t graph_distance(const BoxGraph& g, VertexId s, VertexId t);

/// D(0, (n-1)·1).
std::int64_t corner_distance(const BoxGraph& g);

inline constexpr VertexId kMaxDiameterVertices = 4096;

/// max_{u,v} D(u,v); all-pairs BFS, guarded at kMaxDiameterVertices.
std::int64_t diameter(const BoxGraph& g);

/// Distance between A and B after deleting every edge with one end in A and
/// the other in B. std::nullopt when B becomes unreachable.
std::optional<std::int64_t> indirect_distance(const BoxGraph& g, std::span<const VertexId> a,
                                              std::span<const VertexId> b);

/// d = 1: number of w ∈ {1..n-2} not straddled by any edge.
std::int64_t count_cut_points(const BoxGraph& g);

/// d = 1 exact E_β[#cut points] = Σ_{w=1}^{n-2} ((w+1)(n-w)/n)^{-β}.
double cutpoint_mean_exact(Coord n, double beta);

template <class Fn>
void BoxGraph::for_each_neighbor(VertexId v, Fn&& fn) const {
    if (box_.dim() == 1) {
        if (v > 0) fn(v - 1);
        if (v + 1 < box_.volume()) fn(v + 1);
    } else {
        const Coord n = box_.side();
        Coord c[8];
        box_.coords(v, std::span<Coord>(c, static_cast<std::size_t>(box_.dim())));
        for (std::size_t i = 0; i < nn_offsets_.size(); ++i) {
            bool inside = true;
            for (int j = 0; j < box_.dim(); ++j) {
                const Coord x = c[j] + nn_steps_[i][static_cast<std::size_t>(j)];
                if (x < 0 || x >= n) {
                    inside = false;
                    break;
                }
            }
            if (inside) fn(static_cast<VertexId>(static_cast<std::int64_t>(v) + nn_offsets_[i]));
        }
    }
    for (VertexId w : long_neighbors(v)) fn(w);
}

}  // namespace perclr
