#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridcast/rng.hpp"

namespace gridcast {

using Node = std::int32_t;

/// Square grid of side x side nodes. Node indices are row-major with x
/// fastest: node = y*side + x, coordinates 0 <= x,y < side.
struct GridSpec {
    std::int32_t side = 2;

    GridSpec() = default;
    explicit GridSpec(std::int32_t side_) : side(side_) {
        if (side < 2)
            throw std::invalid_argument("GridSpec: side must be >= 2, got " +
                                        std::to_string(side_));
    }

    std::int64_t n() const noexcept { return std::int64_t(side) * side; }

    std::int32_t x_of(Node v) const noexcept { return v % side; }
    std::int32_t y_of(Node v) const noexcept { return v / side; }
    Node node_at(std::int32_t x, std::int32_t y) const noexcept {
        return y * side + x;
    }

    bool valid(Node v) const noexcept { return v >= 0 && v < n(); }

    void check(Node v) const {
        if (!valid(v))
            throw std::domain_error("node index " + std::to_string(v) +
                                    " outside grid of " + std::to_string(n()) +
                                    " nodes");
    }

    /// Largest Manhattan distance between two grid nodes: 2*(side-1).
    std::int32_t diameter() const noexcept { return 2 * (side - 1); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// One node index per agent; several agents may share a node.
using AgentPositions = std::vector<Node>;

inline std::int32_t manhattan(const GridSpec& grid, Node u, Node v) {
    grid.check(u);
    grid.check(v);
    return std::abs(grid.x_of(u) - grid.x_of(v)) +
           std::abs(grid.y_of(u) - grid.y_of(v));
}

/// Grid-adjacent nodes of v (no wraparound): 2 at a corner, 3 on an edge,
/// 4 in the interior. Enumeration order is +x, -x, +y, -y.
struct NeighborList {
    std::array<Node, 4> node;
    std::int32_t count = 0;

    const Node* begin() const noexcept { return node.data(); }
    const Node* end() const noexcept { return node.data() + count; }
};

inline NeighborList neighbors(const GridSpec& grid, Node v) {
    grid.check(v);
    const std::int32_t x = grid.x_of(v), y = grid.y_of(v);
    NeighborList out;
    if (x + 1 < grid.side) out.node[out.count++] = grid.node_at(x + 1, y);
    if (x > 0)             out.node[out.count++] = grid.node_at(x - 1, y);
    if (y + 1 < grid.side) out.node[out.count++] = grid.node_at(x, y + 1);
    if (y > 0)             out.node[out.count++] = grid.node_at(x, y - 1);
    return out;
}

inline std::int32_t degree(const GridSpec& grid, Node v) {
    grid.check(v);
    const std::int32_t x = grid.x_of(v), y = grid.y_of(v);
    return (x + 1 < grid.side) + (x > 0) + (y + 1 < grid.side) + (y > 0);
}

/// One step of the lazy walk, in coordinate form. Moves to each existing
/// neighbor with probability exactly 1/5 and stays put with the remaining
/// 1 - n_v/5. Consumes exactly one bounded draw from rng.
inline void lazy_step_xy(const GridSpec& grid, std::int32_t& x, std::int32_t& y,
                         Rng& rng) noexcept {
    switch (rng.bounded(5)) {
        case 0: if (x + 1 < grid.side) ++x; break;
        case 1: if (x > 0) --x; break;
        case 2: if (y + 1 < grid.side) ++y; break;
        case 3: if (y > 0) --y; break;
        default: break;  // stay
    }
}

inline Node lazy_step(const GridSpec& grid, Node v, Rng& rng) {
    grid.check(v);
    std::int32_t x = grid.x_of(v), y = grid.y_of(v);
    lazy_step_xy(grid, x, y, rng);
    return grid.node_at(x, y);
}

/// k independent uniform placements drawn from a single stream. Warns (does
/// not fail) when the density assumption n >= 2k is violated.
inline AgentPositions place_uniform(const GridSpec& grid, std::int32_t k,
                                    Rng& rng) {
    if (k < 1)
        throw std::domain_error("place_uniform: k must be >= 1, got " +
                                std::to_string(k));
    if (grid.n() < 2 * std::int64_t(k))
        std::cerr << "warning: n = " << grid.n() << " < 2k = " << 2 * k
                  << "; the sparse regime assumes n >= 2k\n";
    AgentPositions pos(static_cast<std::size_t>(k));
    const auto n = static_cast<std::uint64_t>(grid.n());
    for (auto& p : pos) p = static_cast<Node>(rng.bounded(n));
    return pos;
}

} // namespace gridcast
