#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace perclr {

using Coord = std::int64_t;
using VertexId = std::uint64_t;

/// A point of Z^d.
struct LatticePoint {
    std::vector<Coord> coords;

    LatticePoint() = default;
    explicit LatticePoint(std::vector<Coord> c) : coords(std::move(c)) {}
    LatticePoint(std::initializer_list<Coord> c) : coords(c) {}

    int dim() const { return static_cast<int>(coords.size()); }
    Coord operator[](std::size_t i) const { return coords[i]; }

    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
    friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

Coord inf_norm(std::span<const Coord> delta);
double euclid_norm(std::span<const Coord> delta);
std::vector<Coord> displacement(const LatticePoint& u, const LatticePoint& v);

/// Displacement reduced by coordinate reflections and permutations:
/// non-negative, sorted ascending. The kernel depends only on this.
struct Displacement {
    std::vector<Coord> delta;
    bool canonical = false;

    static Displacement of(std::span<const Coord> delta);
    friend bool operator==(const Displacement&, const Displacement&) = default;
};

/// Unordered vertex pair inside a Box, stored with a < b.
struct Edge {
    VertexId a = 0;
    VertexId b = 0;

    Edge() = default;
    Edge(VertexId x, VertexId y) : a(x < y ? x : y), b(x < y ? y : x) {}

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// The box {0,...,side-1}^dim with linear vertex ids (coordinate 0 fastest).
class Box {
public:
    Box() = default;
    Box(Coord side, int dim);

    Coord side() const { return side_; }
    int dim() const { return dim_; }
    VertexId volume() const { return volume_; }

    bool contains(const LatticePoint& p) const;
    VertexId index(const LatticePoint& p) const;
    LatticePoint point(VertexId id) const;
    void coords(VertexId id, std::span<Coord> out) const;

    /// ‖u-v‖_∞ between two vertices.
    Coord inf_distance(VertexId u, VertexId v) const;
    VertexId corner_far() const { return volume_ - 1; }

    friend bool operator==(const Box&, const Box&) = default;

private:
    Coord side_ = 0;
    int dim_ = 0;
    VertexId volume_ = 0;
};

}  // namespace perclr
