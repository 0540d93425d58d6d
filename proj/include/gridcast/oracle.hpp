#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gridcast/detail/linsolve.hpp"
#include "gridcast/grid.hpp"
#include "gridcast/rng.hpp"

namespace gridcast {

namespace detail {

/// Sparse lazy-walk kernel rows: (target, probability) pairs per node.
struct LazyKernel {
    struct Entry {
        Node to;
        double p;
    };
    std::vector<std::array<Entry, 5>> rows;
    std::vector<int> counts;

    explicit LazyKernel(const GridSpec& grid) {
        const auto n = static_cast<std::size_t>(grid.n());
        rows.resize(n);
        counts.resize(n);
        for (Node v = 0; v < grid.n(); ++v) {
            const auto nb = neighbors(grid, v);
            int c = 0;
            for (int i = 0; i < nb.count; ++i)
                rows[static_cast<std::size_t>(v)][static_cast<std::size_t>(c++)] = {
                    nb.node[static_cast<std::size_t>(i)], 0.2};
            rows[static_cast<std::size_t>(v)][static_cast<std::size_t>(c++)] = {
                v, 1.0 - 0.2 * nb.count};
            counts[static_cast<std::size_t>(v)] = c;
        }
    }

    /// out += K^T in (push one step of mass forward); out must be zeroed.
    void push(const std::vector<double>& in, std::vector<double>& out) const {
        const auto n = rows.size();
        for (std::size_t v = 0; v < n; ++v) {
            const double mass = in[v];
            if (mass == 0.0) continue;
            const int c = counts[v];
            for (int e = 0; e < c; ++e) {
                const auto& en = rows[v][static_cast<std::size_t>(e)];
                out[static_cast<std::size_t>(en.to)] += en.p * mass;
            }
        }
    }
};

} // namespace detail

/// Default meeting region: the lens of nodes within distance d of both start
/// nodes, where d is the distance between the starts.
inline std::vector<Node> meeting_region_default(const GridSpec& grid, Node a0, Node b0) {
    const std::int32_t d = manhattan(grid, a0, b0);
    std::vector<Node> region;
    for (Node v = 0; v < grid.n(); ++v)
        if (manhattan(grid, v, a0) <= d && manhattan(grid, v, b0) <= d) region.push_back(v);
    return region;
}

struct JointChainSpec {
    GridSpec grid;
    std::int64_t horizon = 0;
    Node start_a = 0;
    Node start_b = 0;
    std::optional<std::vector<Node>> restrict_region;

    void validate() const {
        if (grid.n() > 400)
            throw std::domain_error("JointChainSpec: joint state space over limit (n > 400)");
        if (horizon < 0) throw std::invalid_argument("JointChainSpec: horizon must be >= 0");
        grid.check(start_a);
        grid.check(start_b);
        if (restrict_region)
            for (const Node v : *restrict_region) grid.check(v);
    }
};

/// Exact probability that two independent lazy walks meet inside the region
/// by the horizon: forward DP on the joint chain with absorbing meeting
/// states. Time 0 counts (coincident starts inside the region give 1).
inline double exact_meeting_probability(const JointChainSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.grid.n());
    const std::vector<Node> region = spec.restrict_region
                                         ? *spec.restrict_region
                                         : meeting_region_default(spec.grid, spec.start_a,
                                                                  spec.start_b);
    std::vector<char> in_region(n, 0);
    for (const Node v : region) in_region[static_cast<std::size_t>(v)] = 1;

    std::vector<double> cur(n * n, 0.0), tmp(n * n, 0.0);
    cur[static_cast<std::size_t>(spec.start_a) * n + static_cast<std::size_t>(spec.start_b)] = 1.0;
    double absorbed = 0.0;
    const auto absorb = [&] {
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_region[v]) continue;
            absorbed += cur[v * n + v];
            cur[v * n + v] = 0.0;
        }
    };
    absorb();

    const detail::LazyKernel kernel(spec.grid);
    for (std::int64_t t = 1; t <= spec.horizon; ++t) {
        // move walk a: rows of the n x n mass matrix
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (std::size_t a = 0; a < n; ++a) {
            const int c = kernel.counts[a];
            for (int e = 0; e < c; ++e) {
                const auto& en = kernel.rows[a][static_cast<std::size_t>(e)];
                const auto dst = static_cast<std::size_t>(en.to) * n;
                const auto src = a * n;
                for (std::size_t b = 0; b < n; ++b) tmp[dst + b] += en.p * cur[src + b];
            }
        }
        // move walk b: within each row
        std::fill(cur.begin(), cur.end(), 0.0);
        for (std::size_t a = 0; a < n; ++a) {
            const auto base = a * n;
            for (std::size_t b = 0; b < n; ++b) {
                const double mass = tmp[base + b];
                if (mass == 0.0) continue;
                const int c = kernel.counts[b];
                for (int e = 0; e < c; ++e) {
                    const auto& en = kernel.rows[b][static_cast<std::size_t>(e)];
                    cur[base + static_cast<std::size_t>(en.to)] += en.p * mass;
                }
            }
        }
        absorb();
    }
    return std::clamp(absorbed, 0.0, 1.0);
}

/// Exact probability that the lazy walk from v0 visits v within the horizon
/// (absorbing single-walk DP). v == v0 is an immediate hit.
inline double exact_hit_probability(const GridSpec& grid, Node v0, Node v,
                                    std::int64_t horizon) {
    if (grid.n() > 10000)
        throw std::domain_error("exact_hit_probability: state space over limit (n > 10^4)");
    grid.check(v0);
    grid.check(v);
    if (horizon < 0) throw std::invalid_argument("exact_hit_probability: horizon must be >= 0");
    if (v0 == v) return 1.0;

    const auto n = static_cast<std::size_t>(grid.n());
    const detail::LazyKernel kernel(grid);
    std::vector<double> cur(n, 0.0), next(n, 0.0);
    cur[static_cast<std::size_t>(v0)] = 1.0;
    double absorbed = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        kernel.push(cur, next);
        absorbed += next[static_cast<std::size_t>(v)];
        next[static_cast<std::size_t>(v)] = 0.0;
        cur.swap(next);
    }
    return std::clamp(absorbed, 0.0, 1.0);
}

struct DeviationTail {
    double empirical = 0.0;
    double bound = 0.0;  // 2 e^{-lambda^2/2}
    double sigma = 0.0;  // binomial sampling sigma of `empirical`
    std::int64_t exceed_count = 0;
    std::int64_t trials = 0;
};

/// Fraction of walks whose distance from v0 after exactly `steps` steps is
/// at least lambda*sqrt(steps), against the analytic tail bound.
inline DeviationTail empirical_deviation_tail(const GridSpec& grid, Node v0,
                                              std::int64_t steps, double lambda,
                                              std::int64_t trials, Rng& rng) {
    grid.check(v0);
    if (steps < 1) throw std::invalid_argument("empirical_deviation_tail: steps must be >= 1");
    if (lambda < 0) throw std::invalid_argument("empirical_deviation_tail: lambda must be >= 0");
    if (trials < 1000)
        throw std::invalid_argument("empirical_deviation_tail: need at least 10^3 trials");

    const double threshold = lambda * std::sqrt(static_cast<double>(steps));
    const std::int32_t x0 = grid.x_of(v0), y0 = grid.y_of(v0);
    std::int64_t exceed = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
        std::int32_t x = x0, y = y0;
        for (std::int64_t s = 0; s < steps; ++s) lazy_step_xy(grid, x, y, rng);
        const double dist = std::abs(x - x0) + std::abs(y - y0);
        if (dist >= threshold) ++exceed;
    }
    DeviationTail out;
    out.exceed_count = exceed;
    out.trials = trials;
    out.empirical = static_cast<double>(exceed) / static_cast<double>(trials);
    out.bound = 2.0 * std::exp(-lambda * lambda / 2.0);
    out.sigma = std::sqrt(out.empirical * (1.0 - out.empirical) /
                          static_cast<double>(trials));
    return out;
}

struct RangeSummary {
    double mean_distinct = 0.0;
    double median_distinct = 0.0;
    // largest c with a strict majority of walks visiting >= c * steps/ln(steps)
    // distinct nodes; 0 when steps == 1 (the normalizer vanishes)
    double empirical_c2 = 0.0;
    std::int64_t trials = 0;
};

/// Distribution summary of the number of distinct nodes a lazy walk visits
/// in `steps` steps.
inline RangeSummary empirical_range(const GridSpec& grid, Node v0, std::int64_t steps,
                                    std::int64_t trials, Rng& rng) {
    grid.check(v0);
    if (steps < 1) throw std::invalid_argument("empirical_range: steps must be >= 1");
    if (trials < 1000) throw std::invalid_argument("empirical_range: need at least 10^3 trials");

    const std::int32_t x0 = grid.x_of(v0), y0 = grid.y_of(v0);
    std::vector<std::int64_t> stamp(static_cast<std::size_t>(grid.n()), -1);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(trials));
    for (std::int64_t i = 0; i < trials; ++i) {
        std::int32_t x = x0, y = y0;
        stamp[static_cast<std::size_t>(v0)] = i;
        std::int64_t distinct = 1;
        for (std::int64_t s = 0; s < steps; ++s) {
            lazy_step_xy(grid, x, y, rng);
            const auto node = static_cast<std::size_t>(grid.node_at(x, y));
            if (stamp[node] != i) {
                stamp[node] = i;
                ++distinct;
            }
        }
        counts[static_cast<std::size_t>(i)] = distinct;
    }
    std::sort(counts.begin(), counts.end());

    RangeSummary out;
    out.trials = trials;
    double sum = 0.0;
    for (const auto c : counts) sum += static_cast<double>(c);
    out.mean_distinct = sum / static_cast<double>(trials);
    const auto mid = static_cast<std::size_t>((trials - 1) / 2);
    out.median_distinct =
        trials % 2 == 1
            ? static_cast<double>(counts[mid])
            : 0.5 * static_cast<double>(counts[mid] + counts[mid + 1]);
    if (steps > 1) {
        // lower median m*: the largest m with #{walks visiting >= m} > trials/2
        const auto m_star = static_cast<double>(counts[mid]);
        out.empirical_c2 = m_star * std::log(static_cast<double>(steps)) /
                           static_cast<double>(steps);
    }
    return out;
}

/// Expected first co-location times for two independent lazy walks, from
/// every ordered start pair (zero on the diagonal), plus the mean over the
/// uniform product start distribution.
struct MeetingTimeSolution {
    std::vector<double> expected;  // n*n, row-major (a, b)
    double uniform_mean = 0.0;
};

inline MeetingTimeSolution solve_meeting_times(const GridSpec& grid) {
    if (grid.n() > 16)
        throw std::domain_error("solve_meeting_times: exact solve limited to n <= 16");
    const auto n = static_cast<std::size_t>(grid.n());
    const detail::LazyKernel kernel(grid);

    // transient states: ordered pairs (a, b) with a != b
    const std::size_t m = n * n - n;
    std::vector<std::int32_t> index(n * n, -1);
    std::vector<std::pair<std::size_t, std::size_t>> state(m);
    std::size_t next_id = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) {
                index[a * n + b] = static_cast<std::int32_t>(next_id);
                state[next_id] = {a, b};
                ++next_id;
            }

    // (I - Q) x = 1 over transient states
    std::vector<double> mat(m * m, 0.0), rhs(m, 1.0);
    for (std::size_t s = 0; s < m; ++s) {
        mat[s * m + s] += 1.0;
        const auto [a, b] = state[s];
        const int ca = kernel.counts[a], cb = kernel.counts[b];
        for (int ea = 0; ea < ca; ++ea)
            for (int eb = 0; eb < cb; ++eb) {
                const auto& ta = kernel.rows[a][static_cast<std::size_t>(ea)];
                const auto& tb = kernel.rows[b][static_cast<std::size_t>(eb)];
                const auto t = index[static_cast<std::size_t>(ta.to) * n +
                                     static_cast<std::size_t>(tb.to)];
                if (t >= 0) mat[s * m + static_cast<std::size_t>(t)] -= ta.p * tb.p;
            }
    }
    const std::vector<double> x = detail::solve_dense(mat, rhs);

    // rebuild the system for the residual check (solve consumed its copy)
    std::vector<double> mat2(m * m, 0.0);
    for (std::size_t s = 0; s < m; ++s) {
        mat2[s * m + s] += 1.0;
        const auto [a, b] = state[s];
        const int ca = kernel.counts[a], cb = kernel.counts[b];
        for (int ea = 0; ea < ca; ++ea)
            for (int eb = 0; eb < cb; ++eb) {
                const auto& ta = kernel.rows[a][static_cast<std::size_t>(ea)];
                const auto& tb = kernel.rows[b][static_cast<std::size_t>(eb)];
                const auto t = index[static_cast<std::size_t>(ta.to) * n +
                                     static_cast<std::size_t>(tb.to)];
                if (t >= 0) mat2[s * m + static_cast<std::size_t>(t)] -= ta.p * tb.p;
            }
    }
    if (detail::residual_inf(mat2, x, rhs) > 1e-10)
        throw std::runtime_error("solve_meeting_times: residual above 1e-10");

    MeetingTimeSolution sol;
    sol.expected.assign(n * n, 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        const auto [a, b] = state[s];
        sol.expected[a * n + b] = x[s];
        total += x[s];
    }
    sol.uniform_mean = total / static_cast<double>(n * n);
    return sol;
}

/// Exact E[T] for the two-agent, radius-0 dissemination process from uniform
/// independent starts; matches the simulator's convention that a co-located
/// start finishes at time 0.
inline double exact_broadcast_expectation(const GridSpec& grid) {
    return solve_meeting_times(grid).uniform_mean;
}

/// Monte Carlo companion of exact_meeting_probability on the same spec.
inline double mc_meeting_probability(const JointChainSpec& spec, std::int64_t trials,
                                     Rng& rng) {
    spec.validate();
    if (trials < 1) throw std::invalid_argument("mc_meeting_probability: trials must be >= 1");
    const std::vector<Node> region = spec.restrict_region
                                         ? *spec.restrict_region
                                         : meeting_region_default(spec.grid, spec.start_a,
                                                                  spec.start_b);
    std::vector<char> in_region(static_cast<std::size_t>(spec.grid.n()), 0);
    for (const Node v : region) in_region[static_cast<std::size_t>(v)] = 1;

    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
        std::int32_t ax = spec.grid.x_of(spec.start_a), ay = spec.grid.y_of(spec.start_a);
        std::int32_t bx = spec.grid.x_of(spec.start_b), by = spec.grid.y_of(spec.start_b);
        bool met = ax == bx && ay == by && in_region[static_cast<std::size_t>(spec.start_a)];
        for (std::int64_t t = 1; !met && t <= spec.horizon; ++t) {
            lazy_step_xy(spec.grid, ax, ay, rng);
            lazy_step_xy(spec.grid, bx, by, rng);
            met = ax == bx && ay == by &&
                  in_region[static_cast<std::size_t>(spec.grid.node_at(ax, ay))];
        }
        if (met) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

/// Monte Carlo companion of exact_hit_probability.
inline double mc_hit_probability(const GridSpec& grid, Node v0, Node v, std::int64_t horizon,
                                 std::int64_t trials, Rng& rng) {
    grid.check(v0);
    grid.check(v);
    if (horizon < 0) throw std::invalid_argument("mc_hit_probability: horizon must be >= 0");
    if (trials < 1) throw std::invalid_argument("mc_hit_probability: trials must be >= 1");
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
        std::int32_t x = grid.x_of(v0), y = grid.y_of(v0);
        bool hit = v0 == v;
        for (std::int64_t t = 1; !hit && t <= horizon; ++t) {
            lazy_step_xy(grid, x, y, rng);
            hit = grid.node_at(x, y) == v;
        }
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

} // namespace gridcast
