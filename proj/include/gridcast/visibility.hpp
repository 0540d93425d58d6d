#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridcast/grid.hpp"
#include "gridcast/rng.hpp"

namespace gridcast {

/// Partition of the agents into connected components of the visibility
/// graph. label[i] is the smallest agent id in i's component.
struct ComponentLabeling {
    std::vector<std::int32_t> label;
    std::int32_t num_components = 0;

    std::int32_t k() const noexcept { return static_cast<std::int32_t>(label.size()); }
};

struct IslandStats {
    std::map<std::int32_t, std::int32_t> size_histogram;  // component size -> count
    std::int32_t max_size = 0;
    double giant_fraction = 0.0;
};

namespace detail {

struct DisjointSet {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> size;

    void reset(std::int32_t k) {
        parent.resize(static_cast<std::size_t>(k));
        size.assign(static_cast<std::size_t>(k), 1);
        for (std::int32_t i = 0; i < k; ++i) parent[static_cast<std::size_t>(i)] = i;
    }

    std::int32_t find(std::int32_t v) noexcept {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }

    void unite(std::int32_t a, std::int32_t b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)])
            std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
};

} // namespace detail

/// Reusable buffers for components(); one instance per simulation keeps the
/// per-step work allocation-free. The (cell, agent) array stays sorted from
/// the previous step, so the insertion sort below is near-linear.
struct ComponentScratch {
    struct Entry {
        std::int64_t cell;
        std::int32_t agent;
    };
    std::vector<Entry> entries;
    std::vector<std::int64_t> occupied_cells;  // sorted unique cell ids
    std::vector<std::int32_t> cell_start;      // run starts into entries
    std::vector<std::int32_t> min_id;
    detail::DisjointSet dsu;
};

/// Connected components of the visibility graph at Manhattan radius r.
///
/// Agents are bucketed into square cells of side max(r,1); any two agents
/// within distance r fall in the same or in adjacent cells, so only the
/// 3x3 cell neighborhood is scanned. Expected cost O(k) per call in the
/// sparse regime; worst case O(k^2) when everyone shares one cell.
inline void components_into(const GridSpec& grid, std::span<const std::int32_t> xs,
                            std::span<const std::int32_t> ys, std::int32_t r,
                            ComponentScratch& scratch, ComponentLabeling& out) {
    if (r < 0) throw std::domain_error("components: radius must be >= 0");
    const auto k = static_cast<std::int32_t>(xs.size());
    const std::int64_t cell = std::max(r, 1);
    const std::int64_t ncx = (grid.side + cell - 1) / cell;

    auto& entries = scratch.entries;
    entries.resize(static_cast<std::size_t>(k));
    for (std::int32_t i = 0; i < k; ++i) {
        const auto e = static_cast<std::size_t>(i);
        entries[e].cell = (ys[e] / cell) * ncx + (xs[e] / cell);
        entries[e].agent = i;
    }
    // adaptive insertion sort: cells rarely change between consecutive steps
    for (std::size_t i = 1; i < entries.size(); ++i) {
        auto tmp = entries[i];
        std::size_t j = i;
        while (j > 0 && (entries[j - 1].cell > tmp.cell ||
                         (entries[j - 1].cell == tmp.cell && entries[j - 1].agent > tmp.agent))) {
            entries[j] = entries[j - 1];
            --j;
        }
        entries[j] = tmp;
    }

    auto& cells = scratch.occupied_cells;
    auto& starts = scratch.cell_start;
    cells.clear();
    starts.clear();
    for (std::int32_t i = 0; i < k; ++i) {
        if (i == 0 || entries[static_cast<std::size_t>(i)].cell !=
                          entries[static_cast<std::size_t>(i - 1)].cell) {
            cells.push_back(entries[static_cast<std::size_t>(i)].cell);
            starts.push_back(i);
        }
    }
    starts.push_back(k);

    auto& dsu = scratch.dsu;
    dsu.reset(k);

    auto within = [&](std::int32_t a, std::int32_t b) {
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        return std::abs(xs[ua] - xs[ub]) + std::abs(ys[ua] - ys[ub]) <= r;
    };

    const auto ncells = static_cast<std::int32_t>(cells.size());
    for (std::int32_t c = 0; c < ncells; ++c) {
        const std::int32_t beg = starts[static_cast<std::size_t>(c)];
        const std::int32_t end = starts[static_cast<std::size_t>(c) + 1];
        // pairs inside the cell
        for (std::int32_t i = beg; i < end; ++i)
            for (std::int32_t j = i + 1; j < end; ++j)
                if (within(entries[static_cast<std::size_t>(i)].agent,
                           entries[static_cast<std::size_t>(j)].agent))
                    dsu.unite(entries[static_cast<std::size_t>(i)].agent,
                              entries[static_cast<std::size_t>(j)].agent);
        if (r == 0) continue;  // cross-cell pairs are at distance >= 1
        // half of the 8-neighborhood; the other half is covered symmetrically
        const std::int64_t id = cells[static_cast<std::size_t>(c)];
        const std::int64_t cx = id % ncx;
        const std::int64_t deltas[4] = {+1, ncx - 1, ncx, ncx + 1};  // E, SW, S, SE
        for (int d = 0; d < 4; ++d) {
            if (d == 0 || d == 3) {
                if (cx + 1 >= ncx) continue;
            } else if (d == 1) {
                if (cx == 0) continue;
            }
            const std::int64_t nid = id + deltas[d];
            const auto it = std::lower_bound(cells.begin(), cells.end(), nid);
            if (it == cells.end() || *it != nid) continue;
            const auto nc = static_cast<std::size_t>(it - cells.begin());
            const std::int32_t nbeg = starts[nc], nend = starts[nc + 1];
            for (std::int32_t i = beg; i < end; ++i)
                for (std::int32_t j = nbeg; j < nend; ++j)
                    if (within(entries[static_cast<std::size_t>(i)].agent,
                               entries[static_cast<std::size_t>(j)].agent))
                        dsu.unite(entries[static_cast<std::size_t>(i)].agent,
                                  entries[static_cast<std::size_t>(j)].agent);
        }
    }

    // canonical labels: smallest agent id per component
    auto& min_id = scratch.min_id;
    min_id.assign(static_cast<std::size_t>(k), -1);
    out.label.resize(static_cast<std::size_t>(k));
    out.num_components = 0;
    for (std::int32_t i = 0; i < k; ++i) {
        const auto root = static_cast<std::size_t>(dsu.find(i));
        if (min_id[root] < 0) {
            min_id[root] = i;  // first visit in ascending order => minimum
            ++out.num_components;
        }
        out.label[static_cast<std::size_t>(i)] = min_id[root];
    }
}

inline ComponentLabeling components(const GridSpec& grid, const AgentPositions& pos,
                                    std::int32_t r) {
    std::vector<std::int32_t> xs(pos.size()), ys(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        grid.check(pos[i]);
        xs[i] = grid.x_of(pos[i]);
        ys[i] = grid.y_of(pos[i]);
    }
    ComponentScratch scratch;
    ComponentLabeling out;
    components_into(grid, xs, ys, r, scratch, out);
    return out;
}

inline IslandStats island_stats(const ComponentLabeling& labeling) {
    const std::int32_t k = labeling.k();
    std::vector<std::int32_t> size(static_cast<std::size_t>(k), 0);
    for (std::int32_t i = 0; i < k; ++i)
        ++size[static_cast<std::size_t>(labeling.label[static_cast<std::size_t>(i)])];
    IslandStats stats;
    for (std::int32_t i = 0; i < k; ++i) {
        const std::int32_t s = size[static_cast<std::size_t>(i)];
        if (s == 0) continue;  // i is not a representative
        ++stats.size_histogram[s];
        stats.max_size = std::max(stats.max_size, s);
    }
    stats.giant_fraction = k > 0 ? static_cast<double>(stats.max_size) / k : 0.0;
    return stats;
}

struct PercolationEstimate {
    std::int32_t r_c = 0;
    bool degenerate = false;  // k = 1: no pair can ever connect
};

/// Smallest integer radius at which, in at least half of `trials` fresh
/// uniform placements, the largest component holds at least
/// giant_threshold * k agents. Bisection over [0, 2*side]; the predicate is
/// monotone in r because per placement the partition only coarsens.
inline PercolationEstimate estimate_percolation_radius(const GridSpec& grid,
                                                       std::int32_t k,
                                                       std::int64_t trials,
                                                       double giant_threshold,
                                                       Rng& rng) {
    if (trials < 1) throw std::domain_error("estimate_percolation_radius: trials >= 1");
    if (!(giant_threshold > 0.0 && giant_threshold < 1.0))
        throw std::domain_error("estimate_percolation_radius: threshold in (0,1)");
    if (k == 1) return {0, true};

    std::vector<std::vector<std::int32_t>> all_xs, all_ys;
    all_xs.reserve(static_cast<std::size_t>(trials));
    all_ys.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t t = 0; t < trials; ++t) {
        auto pos = place_uniform(grid, k, rng);
        std::vector<std::int32_t> xs(pos.size()), ys(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) {
            xs[i] = grid.x_of(pos[i]);
            ys[i] = grid.y_of(pos[i]);
        }
        all_xs.push_back(std::move(xs));
        all_ys.push_back(std::move(ys));
    }

    ComponentScratch scratch;
    ComponentLabeling labeling;
    const auto needed = static_cast<std::int64_t>(std::ceil(giant_threshold * k));
    auto giant_at = [&](std::int32_t r) {
        std::int64_t hits = 0;
        for (std::int64_t t = 0; t < trials; ++t) {
            components_into(grid, all_xs[static_cast<std::size_t>(t)],
                            all_ys[static_cast<std::size_t>(t)], r, scratch, labeling);
            if (island_stats(labeling).max_size >= needed) ++hits;
        }
        return 2 * hits >= trials;
    };

    std::int32_t lo = 0, hi = 2 * grid.side;  // giant_at(hi) always true: r > diameter
    if (giant_at(lo)) return {0, false};
    while (hi - lo > 1) {
        const std::int32_t mid = lo + (hi - lo) / 2;
        if (giant_at(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {hi, false};
}

} // namespace gridcast
