#include "perclr/graphs.hpp"

#include <algorithm>
#include <cmath>

#include "perclr/errors.hpp"

namespace perclr {

BoxGraph::BoxGraph(const Box& box, std::span<const Edge> long_edges) : box_(box) {
    edges_.reserve(long_edges.size());
    for (const Edge& e : long_edges) {
        if (e.b >= box_.volume()) throw InvalidInput("edge endpoint outside box");
        if (e.a == e.b) throw InvalidInput("self-loop in edge set");
        if (box_.inf_distance(e.a, e.b) < 2) continue;  // nearest neighbours are implicit
        edges_.push_back(e);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    offsets_.assign(box_.volume() + 1, 0);
    for (const Edge& e : edges_) {
        ++offsets_[e.a + 1];
        ++offsets_[e.b + 1];
    }
    for (VertexId v = 0; v < box_.volume(); ++v) offsets_[v + 1] += offsets_[v];
    adj_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_) {
        adj_[fill[e.a]++] = e.b;
        adj_[fill[e.b]++] = e.a;
    }

    if (box_.dim() > 1) {
        const auto d = static_cast<std::size_t>(box_.dim());
        std::vector<Coord> step(d, -1);
        for (;;) {
            if (std::any_of(step.begin(), step.end(), [](Coord s) { return s != 0; })) {
                std::int64_t off = 0;
                for (std::size_t i = d; i-- > 0;) off = off * box_.side() + step[i];
                nn_offsets_.push_back(off);
                nn_steps_.push_back(step);
            }
            std::size_t i = 0;
            while (i < d && ++step[i] == 2) step[i++] = -1;
            if (i == d) break;
        }
    }
}

BoxGraph::BoxGraph(const Configuration& config) : BoxGraph(config.box, config.long_edges) {}

DistanceField bfs_distance(const BoxGraph& g, VertexId source) {
    if (source >= g.vertex_count()) throw InvalidInput("bfs source outside box");
    DistanceField f{source, std::vector<std::int64_t>(g.vertex_count(), -1)};
    std::vector<VertexId> queue;
    queue.reserve(g.vertex_count());
    queue.push_back(source);
    f.dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId v = queue[head];
        const std::int64_t next = f.dist[v] + 1;
        g.for_each_neighbor(v, [&](VertexId w) {
            if (f.dist[w] < 0) {
                f.dist[w] = next;
                queue.push_back(w);
            }
        });
    }
    return f;
}

DistanceField bfs_distance(const BoxGraph& g, const LatticePoint& source) {
    if (!g.box().contains(source)) throw InvalidInput("bfs source outside box");
    return bfs_distance(g, g.box().index(source));
}

std::int64_t graph_distance(const BoxGraph& g, VertexId s, VertexId t) {
    if (s >= g.vertex_count() || t >= g.vertex_count()) throw InvalidInput("vertex outside box");
    if (s == t) return 0;
    std::vector<std::int64_t> dist(g.vertex_count(), -1);
    std::vector<VertexId> queue;
    queue.reserve(g.vertex_count());
    queue.push_back(s);
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId v = queue[head];
        const std::int64_t next = dist[v] + 1;
        bool found = false;
        g.for_each_neighbor(v, [&](VertexId w) {
            if (dist[w] < 0) {
                dist[w] = next;
                if (w == t) found = true;
                queue.push_back(w);
            }
        });
        if (found) return next;
    }
    return dist[t];  // the box graph is connected; unreachable cannot happen
}

std::int64_t corner_distance(const BoxGraph& g) {
    return graph_distance(g, 0, g.box().corner_far());
}

std::int64_t diameter(const BoxGraph& g) {
    if (g.vertex_count() > kMaxDiameterVertices)
        throw CapacityError("diameter: box exceeds 4096 vertices");
    std::int64_t best = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const auto f = bfs_distance(g, v);
        best = std::max(best, *std::max_element(f.dist.begin(), f.dist.end()));
    }
    return best;
}

std::optional<std::int64_t> indirect_distance(const BoxGraph& g, std::span<const VertexId> a,
                                              std::span<const VertexId> b) {
    if (a.empty() || b.empty()) throw InvalidInput("indirect_distance: sets must be non-empty");
    // 1: in A, 2: in B
    std::vector<std::uint8_t> tag(g.vertex_count(), 0);
    for (VertexId v : a) {
        if (v >= g.vertex_count()) throw InvalidInput("indirect_distance: vertex outside box");
        tag[v] = 1;
    }
    for (VertexId v : b) {
        if (v >= g.vertex_count()) throw InvalidInput("indirect_distance: vertex outside box");
        if (tag[v] == 1) throw InvalidInput("indirect_distance: sets overlap");
        tag[v] = 2;
    }
    std::vector<std::int64_t> dist(g.vertex_count(), -1);
    std::vector<VertexId> queue;
    for (VertexId v : a) {
        if (dist[v] < 0) {
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId v = queue[head];
        if (tag[v] == 2) return dist[v];
        g.for_each_neighbor(v, [&](VertexId w) {
            if (dist[w] >= 0) return;
            if ((tag[v] == 1 && tag[w] == 2) || (tag[v] == 2 && tag[w] == 1)) return;
            dist[w] = dist[v] + 1;
            queue.push_back(w);
        });
    }
    return std::nullopt;
}

std::int64_t count_cut_points(const BoxGraph& g) {
    if (g.box().dim() != 1) throw InvalidInput("cut points are defined in d = 1 only");
    const auto n = static_cast<std::size_t>(g.box().side());
    if (n < 3) return 0;
    // cover[w] > 0 iff some edge {u,v} has u < w < v
    std::vector<std::int64_t> cover(n + 1, 0);
    for (const Edge& e : g.long_edges()) {
        ++cover[e.a + 1];
        --cover[e.b];
    }
    std::int64_t running = 0, cuts = 0;
    for (std::size_t w = 0; w + 1 < n; ++w) {
        running += cover[w];
        if (w >= 1 && running == 0) ++cuts;
    }
    return cuts;
}

double cutpoint_mean_exact(Coord n, double beta) {
    if (n < 3) throw InvalidInput("cutpoint_mean_exact needs n >= 3");
    if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
    const double nd = static_cast<double>(n);
    long double s = 0.0L;
    for (Coord w = 1; w <= n - 2; ++w) {
        const double ratio = static_cast<double>(w + 1) * static_cast<double>(n - w) / nd;
        s += std::pow(ratio, -beta);
    }
    return static_cast<double>(s);
}

}  // namespace perclr
