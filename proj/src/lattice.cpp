#include "perclr/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "perclr/errors.hpp"

namespace perclr {

Coord inf_norm(std::span<const Coord> delta) {
    Coord m = 0;
    for (Coord c : delta) m = std::max(m, c < 0 ? -c : c);
    return m;
}

double euclid_norm(std::span<const Coord> delta) {
    double s = 0.0;
    for (Coord c : delta) s += static_cast<double>(c) * static_cast<double>(c);
    return std::sqrt(s);
}

std::vector<Coord> displacement(const LatticePoint& u, const LatticePoint& v) {
    if (u.dim() != v.dim()) throw InvalidInput("lattice points of different dimension");
    std::vector<Coord> d(u.coords.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = v.coords[i] - u.coords[i];
    return d;
}

Displacement Displacement::of(std::span<const Coord> delta) {
    Displacement out{std::vector<Coord>(delta.begin(), delta.end()), true};
    for (auto& c : out.delta) c = c < 0 ? -c : c;
    std::sort(out.delta.begin(), out.delta.end());
    return out;
}

Box::Box(Coord side, int dim) : side_(side), dim_(dim) {
    if (side < 1) throw InvalidInput("box side must be positive");
    if (dim < 1 || dim > 8) throw InvalidInput("dimension must be in 1..8");
    VertexId v = 1;
    for (int i = 0; i < dim; ++i) {
        if (v > (VertexId{1} << 40) / static_cast<VertexId>(side))
            throw CapacityError("box volume exceeds 2^40 vertices");
        v *= static_cast<VertexId>(side);
    }
    volume_ = v;
}

bool Box::contains(const LatticePoint& p) const {
    if (p.dim() != dim_) return false;
    return std::all_of(p.coords.begin(), p.coords.end(), [&](Coord c) { return c >= 0 && c < side_; });
}

VertexId Box::index(const LatticePoint& p) const {
    if (!contains(p)) throw InvalidInput("lattice point outside box");
    VertexId id = 0;
    for (int i = dim_ - 1; i >= 0; --i) id = id * static_cast<VertexId>(side_) + static_cast<VertexId>(p.coords[i]);
    return id;
}

void Box::coords(VertexId id, std::span<Coord> out) const {
    for (int i = 0; i < dim_; ++i) {
        out[static_cast<std::size_t>(i)] = static_cast<Coord>(id % static_cast<VertexId>(side_));
        id /= static_cast<VertexId>(side_);
    }
}

LatticePoint Box::point(VertexId id) const {
    if (id >= volume_) throw InvalidInput("vertex id outside box");
    LatticePoint p;
    p.coords.resize(static_cast<std::size_t>(dim_));
    coords(id, p.coords);
    return p;
}

Coord Box::inf_distance(VertexId u, VertexId v) const {
    Coord m = 0;
    for (int i = 0; i < dim_; ++i) {
        const auto a = static_cast<Coord>(u % static_cast<VertexId>(side_));
        const auto b = static_cast<Coord>(v % static_cast<VertexId>(side_));
        m = std::max(m, std::abs(a - b));
        u /= static_cast<VertexId>(side_);
        v /= static_cast<VertexId>(side_);
    }
    return m;
}

}  // namespace perclr
