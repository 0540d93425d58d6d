#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridcast/grid.hpp"
#include "gridcast/rng.hpp"
#include "gridcast/visibility.hpp"

namespace gridcast {

enum class Variant { broadcast, gossip, frog, coverage, predator_prey };

inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::broadcast: return "broadcast";
        case Variant::gossip: return "gossip";
        case Variant::frog: return "frog";
        case Variant::coverage: return "coverage";
        case Variant::predator_prey: return "predator_prey";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "broadcast") return Variant::broadcast;
    if (s == "gossip") return Variant::gossip;
    if (s == "frog") return Variant::frog;
    if (s == "coverage") return Variant::coverage;
    if (s == "predator_prey") return Variant::predator_prey;
    throw std::invalid_argument("unknown variant: " + s);
}

/// Censoring horizon used when SimConfig.max_steps is 0: 8 n ceil(ln^2 n).
inline std::int64_t default_max_steps(std::int64_t n) {
    const double l = std::log(static_cast<double>(n));
    return 8 * n * static_cast<std::int64_t>(std::ceil(l * l));
}

struct SimConfig {
    GridSpec grid;
    std::int32_t k = 2;
    std::int32_t r = 0;
    Variant variant = Variant::broadcast;
    std::int32_t num_rumors = 1;
    std::int64_t max_steps = 0;  // 0 -> default_max_steps(n)
    RngSeed seed;
    bool track_frontier = false;
    bool all_informed_start = false;  // coverage: plain cover time of k walks
    std::int32_t prey_count = 0;      // predator_prey only
    bool record_timelines = true;

    std::int64_t effective_max_steps() const {
        return max_steps > 0 ? max_steps : default_max_steps(grid.n());
    }

    void validate() const {
        if (k < 1) throw std::invalid_argument("SimConfig: k must be >= 1");
        if (r < 0) throw std::invalid_argument("SimConfig: r must be >= 0");
        if (effective_max_steps() < 1)
            throw std::invalid_argument("SimConfig: max_steps must be >= 1");
        if (variant == Variant::gossip) {
            if (num_rumors < 1 || num_rumors > k)
                throw std::invalid_argument("SimConfig: gossip needs 1 <= num_rumors <= k");
        } else if (num_rumors != 1) {
            throw std::invalid_argument("SimConfig: only gossip carries multiple rumors");
        }
        if (variant == Variant::predator_prey) {
            if (prey_count < 0)
                throw std::invalid_argument("SimConfig: prey_count must be >= 0");
            if (track_frontier)
                throw std::invalid_argument("SimConfig: no informed area to track in predator_prey");
        } else if (prey_count != 0) {
            throw std::invalid_argument("SimConfig: prey_count is predator_prey-only");
        }
        if (track_frontier && variant == Variant::gossip)
            throw std::invalid_argument("SimConfig: frontier tracking needs a single rumor");
        if (all_informed_start && variant != Variant::coverage)
            throw std::invalid_argument("SimConfig: all_informed_start is coverage-only");
    }
};

/// Per-agent sets of known rumor ids, bitset rows. Monotone over time:
/// grants are the only mutation.
class RumorState {
public:
    RumorState() = default;

    RumorState(std::int32_t k, std::int32_t num_rumors)
        : k_(k),
          num_rumors_(num_rumors),
          words_((num_rumors + 63) / 64),
          bits_(static_cast<std::size_t>(k) * static_cast<std::size_t>(words_), 0) {
        if (k < 1 || num_rumors < 1)
            throw std::invalid_argument("RumorState: k and num_rumors must be >= 1");
        const int rem = num_rumors % 64;
        last_mask_ = rem == 0 ? ~0ULL : ((1ULL << rem) - 1);
    }

    std::int32_t agents() const noexcept { return k_; }
    std::int32_t rumors() const noexcept { return num_rumors_; }
    std::int32_t words() const noexcept { return words_; }

    bool knows(std::int32_t agent, std::int32_t rumor) const {
        return (word(agent, rumor / 64) >> (rumor % 64)) & 1ULL;
    }

    void grant(std::int32_t agent, std::int32_t rumor) {
        word(agent, rumor / 64) |= 1ULL << (rumor % 64);
    }

    bool knows_all(std::int32_t agent) const {
        const auto r = row(agent);
        for (std::int32_t w = 0; w + 1 < words_; ++w)
            if (r[static_cast<std::size_t>(w)] != ~0ULL) return false;
        return r[static_cast<std::size_t>(words_ - 1)] == last_mask_;
    }

    std::int32_t count_knowing(std::int32_t rumor) const {
        std::int32_t c = 0;
        for (std::int32_t a = 0; a < k_; ++a) c += knows(a, rumor);
        return c;
    }

    std::int32_t count_fully_informed() const {
        std::int32_t c = 0;
        for (std::int32_t a = 0; a < k_; ++a) c += knows_all(a);
        return c;
    }

    std::span<std::uint64_t> row(std::int32_t agent) {
        return {bits_.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(words_),
                static_cast<std::size_t>(words_)};
    }
    std::span<const std::uint64_t> row(std::int32_t agent) const {
        return {bits_.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(words_),
                static_cast<std::size_t>(words_)};
    }

private:
    std::uint64_t& word(std::int32_t agent, std::int32_t w) {
        return bits_[static_cast<std::size_t>(agent) * static_cast<std::size_t>(words_) +
                     static_cast<std::size_t>(w)];
    }
    std::uint64_t word(std::int32_t agent, std::int32_t w) const {
        return bits_[static_cast<std::size_t>(agent) * static_cast<std::size_t>(words_) +
                     static_cast<std::size_t>(w)];
    }

    std::int32_t k_ = 0;
    std::int32_t num_rumors_ = 0;
    std::int32_t words_ = 0;
    std::uint64_t last_mask_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Rumor exchange within connected components: every agent's set becomes the
/// union over its component. Canonical labels satisfy label[i] <= i, so one
/// ascending OR pass accumulates each component in its representative row
/// and a second pass copies it back.
inline void exchange(const ComponentLabeling& labeling, RumorState& state) {
    const std::int32_t k = state.agents();
    if (labeling.k() != k)
        throw std::invalid_argument("exchange: labeling and state cover different agent sets");
    for (std::int32_t i = 0; i < k; ++i) {
        const std::int32_t rep = labeling.label[static_cast<std::size_t>(i)];
        if (rep == i) continue;
        auto dst = state.row(rep);
        const auto src = state.row(i);
        for (std::size_t w = 0; w < src.size(); ++w) dst[w] |= src[w];
    }
    for (std::int32_t i = 0; i < k; ++i) {
        const std::int32_t rep = labeling.label[static_cast<std::size_t>(i)];
        if (rep == i) continue;
        auto dst = state.row(i);
        const auto src = state.row(rep);
        for (std::size_t w = 0; w < src.size(); ++w) dst[w] = src[w];
    }
}

struct TrialResult {
    std::int64_t finish_time = 0;  // equals max_steps when censored
    bool censored = false;
    std::vector<std::int32_t> informed_count_timeline;
    std::vector<std::int32_t> frontier_timeline;       // rightmost x of the informed area
    std::vector<std::int64_t> covered_nodes_timeline;  // coverage variant
};

/// One trial of the dissemination process, advanced step by step so that
/// coupled runs (same seed, different radius) can be compared in lockstep.
///
/// Step order: move all walkers, rebuild the visibility graph on the new
/// positions, exchange rumors within components, record, test termination.
/// Step 0 applies exchange on the initial placement, so a placement that is
/// already connected finishes at time 0.
class Simulation {
public:
    explicit Simulation(const SimConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        max_steps_ = cfg_.effective_max_steps();
        const std::int32_t walkers = total_walkers();
        xs_.resize(static_cast<std::size_t>(walkers));
        ys_.resize(static_cast<std::size_t>(walkers));
        rngs_.reserve(static_cast<std::size_t>(walkers));
        const auto n = static_cast<std::uint64_t>(cfg_.grid.n());
        for (std::int32_t i = 0; i < walkers; ++i) {
            rngs_.push_back(agent_stream(cfg_.seed, static_cast<std::uint64_t>(i)));
            const auto node = static_cast<Node>(rngs_.back().bounded(n));
            xs_[static_cast<std::size_t>(i)] = cfg_.grid.x_of(node);
            ys_[static_cast<std::size_t>(i)] = cfg_.grid.y_of(node);
        }
        Rng control = trial_stream(cfg_.seed);
        rumors_ = RumorState(cfg_.k, cfg_.num_rumors);
        seed_rumors(control);
        if (cfg_.variant == Variant::coverage) {
            covered_.assign(static_cast<std::size_t>((cfg_.grid.n() + 63) / 64), 0);
        }
        if (cfg_.variant == Variant::predator_prey) {
            prey_alive_.assign(static_cast<std::size_t>(cfg_.prey_count), 1);
        }
        frontier_x_ = -1;
        observe_and_check();  // t = 0
    }

    bool done() const noexcept { return done_; }
    bool finished() const noexcept { return finished_; }
    bool censored() const noexcept { return done_ && !finished_; }
    std::int64_t time() const noexcept { return t_; }
    const SimConfig& config() const noexcept { return cfg_; }
    const RumorState& rumors() const noexcept { return rumors_; }
    std::span<const std::int32_t> xs() const noexcept { return xs_; }
    std::span<const std::int32_t> ys() const noexcept { return ys_; }
    std::int32_t informed_count() const noexcept { return informed_count_; }

    void step() {
        if (done_) return;
        ++t_;
        move_walkers();
        observe_and_check();
    }

    TrialResult run() {
        while (!done_) step();
        return result();
    }

    TrialResult result() const {
        if (!done_) throw std::logic_error("Simulation::result before completion");
        TrialResult res;
        res.finish_time = finished_ ? t_ : max_steps_;
        res.censored = !finished_;
        res.informed_count_timeline = informed_timeline_;
        res.frontier_timeline = frontier_timeline_;
        res.covered_nodes_timeline = covered_timeline_;
        return res;
    }

private:
    std::int32_t total_walkers() const noexcept {
        return cfg_.variant == Variant::predator_prey ? cfg_.k + cfg_.prey_count : cfg_.k;
    }

    void seed_rumors(Rng& control) {
        switch (cfg_.variant) {
            case Variant::broadcast:
            case Variant::frog:
                rumors_.grant(static_cast<std::int32_t>(control.bounded(
                                  static_cast<std::uint64_t>(cfg_.k))),
                              0);
                break;
            case Variant::gossip: {
                // partial Fisher-Yates: num_rumors distinct agents; the first
                // draw matches the broadcast source draw exactly
                std::vector<std::int32_t> ids(static_cast<std::size_t>(cfg_.k));
                std::iota(ids.begin(), ids.end(), 0);
                for (std::int32_t m = 0; m < cfg_.num_rumors; ++m) {
                    const auto pick = m + static_cast<std::int32_t>(control.bounded(
                                              static_cast<std::uint64_t>(cfg_.k - m)));
                    std::swap(ids[static_cast<std::size_t>(m)],
                              ids[static_cast<std::size_t>(pick)]);
                    rumors_.grant(ids[static_cast<std::size_t>(m)], m);
                }
                break;
            }
            case Variant::coverage:
                if (cfg_.all_informed_start) {
                    for (std::int32_t a = 0; a < cfg_.k; ++a) rumors_.grant(a, 0);
                } else {
                    rumors_.grant(static_cast<std::int32_t>(control.bounded(
                                      static_cast<std::uint64_t>(cfg_.k))),
                                  0);
                }
                break;
            case Variant::predator_prey:
                break;  // no rumors; preys get caught instead
        }
    }

    void move_walkers() {
        const std::int32_t k = cfg_.k;
        switch (cfg_.variant) {
            case Variant::frog:
                // an agent informed during step t-1's exchange takes its
                // first step at t; the uninformed stay on their start nodes
                for (std::int32_t i = 0; i < k; ++i)
                    if (rumors_.knows(i, 0))
                        lazy_step_xy(cfg_.grid, xs_[static_cast<std::size_t>(i)],
                                     ys_[static_cast<std::size_t>(i)],
                                     rngs_[static_cast<std::size_t>(i)]);
                break;
            case Variant::predator_prey:
                for (std::int32_t i = 0; i < k; ++i)
                    lazy_step_xy(cfg_.grid, xs_[static_cast<std::size_t>(i)],
                                 ys_[static_cast<std::size_t>(i)],
                                 rngs_[static_cast<std::size_t>(i)]);
                for (std::int32_t p = 0; p < cfg_.prey_count; ++p)
                    if (prey_alive_[static_cast<std::size_t>(p)])
                        lazy_step_xy(cfg_.grid, xs_[static_cast<std::size_t>(k + p)],
                                     ys_[static_cast<std::size_t>(k + p)],
                                     rngs_[static_cast<std::size_t>(k + p)]);
                break;
            default:
                for (std::int32_t i = 0; i < k; ++i)
                    lazy_step_xy(cfg_.grid, xs_[static_cast<std::size_t>(i)],
                                 ys_[static_cast<std::size_t>(i)],
                                 rngs_[static_cast<std::size_t>(i)]);
                break;
        }
    }

    // components + exchange (or catches), recording, termination test
    void observe_and_check() {
        if (cfg_.variant == Variant::predator_prey) {
            catch_preys();
            informed_count_ = caught_;
        } else {
            components_into(cfg_.grid, {xs_.data(), static_cast<std::size_t>(cfg_.k)},
                            {ys_.data(), static_cast<std::size_t>(cfg_.k)}, cfg_.r,
                            scratch_, labeling_);
            exchange(labeling_, rumors_);
            informed_count_ = cfg_.variant == Variant::gossip
                                  ? rumors_.count_fully_informed()
                                  : rumors_.count_knowing(0);
        }

        if (cfg_.variant == Variant::coverage) mark_covered();
        if (cfg_.track_frontier) {
            for (std::int32_t i = 0; i < cfg_.k; ++i)
                if (rumors_.knows(i, 0))
                    frontier_x_ = std::max(frontier_x_, xs_[static_cast<std::size_t>(i)]);
        }

        if (cfg_.record_timelines) {
            informed_timeline_.push_back(informed_count_);
            if (cfg_.track_frontier) frontier_timeline_.push_back(frontier_x_);
            if (cfg_.variant == Variant::coverage) covered_timeline_.push_back(covered_count_);
        }

        bool met = false;
        switch (cfg_.variant) {
            case Variant::broadcast:
            case Variant::gossip:
            case Variant::frog:
                met = informed_count_ == cfg_.k;
                break;
            case Variant::coverage:
                met = covered_count_ == cfg_.grid.n();
                break;
            case Variant::predator_prey:
                met = caught_ == cfg_.prey_count;
                break;
        }
        if (met) {
            finished_ = true;
            done_ = true;
        } else if (t_ >= max_steps_) {
            done_ = true;
        }
    }

    void mark_covered() {
        for (std::int32_t i = 0; i < cfg_.k; ++i) {
            if (!rumors_.knows(i, 0)) continue;
            const auto node = static_cast<std::uint64_t>(
                cfg_.grid.node_at(xs_[static_cast<std::size_t>(i)],
                                  ys_[static_cast<std::size_t>(i)]));
            auto& w = covered_[node / 64];
            const std::uint64_t bit = 1ULL << (node % 64);
            if (!(w & bit)) {
                w |= bit;
                ++covered_count_;
            }
        }
    }

    /// A prey is caught when some predator is within distance r of it.
    void catch_preys() {
        const std::int32_t k = cfg_.k;
        for (std::int32_t p = 0; p < cfg_.prey_count; ++p) {
            if (!prey_alive_[static_cast<std::size_t>(p)]) continue;
            const auto pi = static_cast<std::size_t>(k + p);
            for (std::int32_t i = 0; i < k; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                if (std::abs(xs_[ui] - xs_[pi]) + std::abs(ys_[ui] - ys_[pi]) <= cfg_.r) {
                    prey_alive_[static_cast<std::size_t>(p)] = 0;
                    ++caught_;
                    break;
                }
            }
        }
    }

    SimConfig cfg_;
    std::int64_t max_steps_ = 0;
    std::int64_t t_ = 0;
    bool done_ = false;
    bool finished_ = false;

    std::vector<std::int32_t> xs_, ys_;
    std::vector<Rng> rngs_;
    RumorState rumors_;
    ComponentScratch scratch_;
    ComponentLabeling labeling_;

    std::vector<std::uint64_t> covered_;
    std::int64_t covered_count_ = 0;
    std::vector<std::uint8_t> prey_alive_;
    std::int32_t caught_ = 0;
    std::int32_t informed_count_ = 0;
    std::int32_t frontier_x_ = -1;

    std::vector<std::int32_t> informed_timeline_;
    std::vector<std::int32_t> frontier_timeline_;
    std::vector<std::int64_t> covered_timeline_;
};

inline TrialResult run_trial(const SimConfig& cfg) { return Simulation(cfg).run(); }

namespace detail {
inline TrialResult run_variant(const SimConfig& cfg, Variant expected, const char* op) {
    if (cfg.variant != expected)
        throw std::invalid_argument(std::string(op) + ": config variant mismatch");
    return run_trial(cfg);
}
} // namespace detail

inline TrialResult run_broadcast(const SimConfig& cfg) {
    return detail::run_variant(cfg, Variant::broadcast, "run_broadcast");
}
inline TrialResult run_gossip(const SimConfig& cfg) {
    return detail::run_variant(cfg, Variant::gossip, "run_gossip");
}
inline TrialResult run_frog(const SimConfig& cfg) {
    return detail::run_variant(cfg, Variant::frog, "run_frog");
}
inline TrialResult run_coverage(const SimConfig& cfg) {
    return detail::run_variant(cfg, Variant::coverage, "run_coverage");
}
inline TrialResult run_predator_prey(const SimConfig& cfg) {
    return detail::run_variant(cfg, Variant::predator_prey, "run_predator_prey");
}

/// Largest frontier displacement per consecutive window: x(t1) - x(t0) for
/// each window [t0, t1]. The frontier is monotone, so the window maximum is
/// attained at the window end.
inline std::vector<std::int32_t> frontier_advance(const TrialResult& result,
                                                  std::int64_t window) {
    if (result.frontier_timeline.empty())
        throw std::domain_error("frontier_advance: trial was run without track_frontier");
    if (window < 1) throw std::domain_error("frontier_advance: window must be >= 1");
    const auto last = static_cast<std::int64_t>(result.frontier_timeline.size()) - 1;
    std::vector<std::int32_t> out;
    for (std::int64_t t0 = 0; t0 < last; t0 += window) {
        const std::int64_t t1 = std::min(t0 + window, last);
        out.push_back(result.frontier_timeline[static_cast<std::size_t>(t1)] -
                      result.frontier_timeline[static_cast<std::size_t>(t0)]);
    }
    return out;
}

} // namespace gridcast
