#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/dissemination.hpp"
#include "gridcast/rng.hpp"
#include "gridcast/stats.hpp"

namespace gridcast {

struct SweepCell {
    std::int32_t side = 2;
    std::int32_t k = 1;
    std::int32_t r = 0;
    Variant variant = Variant::broadcast;

    SimConfig to_config(std::int64_t max_steps, RngSeed seed) const {
        SimConfig cfg;
        cfg.grid = GridSpec{side};
        cfg.k = k;
        cfg.r = r;
        cfg.variant = variant;
        cfg.max_steps = max_steps;
        cfg.seed = seed;
        cfg.record_timelines = false;
        return cfg;
    }
};

struct SweepSpec {
    std::vector<SweepCell> cells;
    std::int64_t trials = 100;
    std::uint64_t master_seed = 0;
    std::int64_t max_steps = 0;  // 0 -> per-cell default censoring horizon
    std::int64_t bootstrap_resamples = 2000;

    void validate() const {
        if (cells.empty()) throw std::invalid_argument("SweepSpec: no cells");
        if (trials < 1) throw std::invalid_argument("SweepSpec: trials must be >= 1");
        if (bootstrap_resamples < 1)
            throw std::invalid_argument("SweepSpec: bootstrap_resamples must be >= 1");
        for (const auto& cell : cells) cell.to_config(max_steps, RngSeed{}).validate();
    }
};

struct SummaryRow {
    SweepCell cell;
    std::int64_t n = 0;
    std::int64_t trials = 0;
    std::int64_t censored = 0;
    // statistics over the uncensored trials (NaN when all trials censored)
    double median = 0.0;
    double mean = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
    double ci_lo = 0.0;  // bootstrap 95% CI of the median
    double ci_hi = 0.0;

    /// True when at least half the trials were censored, i.e. the reported
    /// median sits in the censored region and is not trustworthy.
    bool median_censored() const noexcept { return 2 * censored >= trials; }
};

namespace detail {

inline std::uint64_t cell_master(std::uint64_t master_seed, std::size_t cell_index) {
    return derive_stream_key(master_seed, static_cast<std::uint64_t>(cell_index),
                             0xCE11u);
}

inline Interval bootstrap_ci(const std::vector<double>& xs, std::int64_t resamples,
                             Rng& rng) {
    if (xs.empty()) {
        const double nan = std::nan("");
        return {nan, nan};
    }
    return bootstrap_median_ci(xs, resamples, rng);
}

} // namespace detail

/// Builds one summary row from per-trial finish times (uncensored only).
/// `boot` drives the bootstrap resampling and fully determines the CI.
inline SummaryRow summarize_cell(const SweepCell& cell, std::vector<double> finished,
                                 std::int64_t trials, std::int64_t censored,
                                 std::int64_t bootstrap_resamples, Rng& boot) {
    std::sort(finished.begin(), finished.end());
    SummaryRow row;
    row.cell = cell;
    row.n = static_cast<std::int64_t>(cell.side) * cell.side;
    row.trials = trials;
    row.censored = censored;
    if (finished.empty()) {
        const double nan = std::nan("");
        row.median = row.mean = row.q10 = row.q90 = row.ci_lo = row.ci_hi = nan;
    } else {
        row.median = quantile_sorted(finished, 0.5);
        row.mean = mean(finished);
        row.q10 = quantile_sorted(finished, 0.10);
        row.q90 = quantile_sorted(finished, 0.90);
        const Interval ci = detail::bootstrap_ci(finished, bootstrap_resamples, boot);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
    }
    return row;
}

/// Runs every cell for the configured number of trials. Per-trial seeds are
/// derived from (master_seed, cell index, trial index), so identical specs
/// reproduce identical tables, cell by cell and trial by trial.
inline std::vector<SummaryRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SummaryRow> rows;
    rows.reserve(spec.cells.size());
    for (std::size_t ci = 0; ci < spec.cells.size(); ++ci) {
        const auto& cell = spec.cells[ci];
        const std::uint64_t cm = detail::cell_master(spec.master_seed, ci);
        std::vector<double> finished;
        finished.reserve(static_cast<std::size_t>(spec.trials));
        std::int64_t censored = 0;
        for (std::int64_t trial = 0; trial < spec.trials; ++trial) {
            const auto cfg =
                cell.to_config(spec.max_steps, RngSeed{cm, static_cast<std::uint64_t>(trial)});
            const TrialResult res = run_trial(cfg);
            if (res.censored)
                ++censored;
            else
                finished.push_back(static_cast<double>(res.finish_time));
        }
        Rng boot(derive_stream_key(cm, 0xB007u, 0));
        rows.push_back(summarize_cell(cell, std::move(finished), spec.trials, censored,
                                      spec.bootstrap_resamples, boot));
    }
    return rows;
}

inline constexpr std::string_view kCsvHeader =
    "side,n,k,r,variant,trials,censored,median,mean,q10,q90,ci_lo,ci_hi";

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace detail

inline std::string write_csv(const std::vector<SummaryRow>& rows) {
    std::string out{kCsvHeader};
    out.push_back('\n');
    for (const auto& row : rows) {
        out += std::to_string(row.cell.side);
        out.push_back(',');
        out += std::to_string(row.n);
        out.push_back(',');
        out += std::to_string(row.cell.k);
        out.push_back(',');
        out += std::to_string(row.cell.r);
        out.push_back(',');
        out += to_string(row.cell.variant);
        out.push_back(',');
        out += std::to_string(row.trials);
        out.push_back(',');
        out += std::to_string(row.censored);
        for (const double v : {row.median, row.mean, row.q10, row.q90, row.ci_lo, row.ci_hi}) {
            out.push_back(',');
            out += detail::fmt_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline std::int64_t parse_int(const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("parse_csv: bad integer field '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("parse_csv: bad numeric field '" + s + "'");
    return v;
}

} // namespace detail

inline std::vector<SummaryRow> parse_csv(const std::string& text) {
    std::vector<SummaryRow> rows;
    std::size_t pos = 0;
    bool seen_header = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!seen_header) {
            if (line != kCsvHeader)
                throw std::invalid_argument("parse_csv: unexpected header '" + line + "'");
            seen_header = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 13)
            throw std::invalid_argument("parse_csv: expected 13 fields, got " +
                                        std::to_string(f.size()));
        SummaryRow row;
        row.cell.side = static_cast<std::int32_t>(detail::parse_int(f[0]));
        row.n = detail::parse_int(f[1]);
        row.cell.k = static_cast<std::int32_t>(detail::parse_int(f[2]));
        row.cell.r = static_cast<std::int32_t>(detail::parse_int(f[3]));
        row.cell.variant = variant_from_string(f[4]);
        row.trials = detail::parse_int(f[5]);
        row.censored = detail::parse_int(f[6]);
        row.median = detail::parse_double(f[7]);
        row.mean = detail::parse_double(f[8]);
        row.q10 = detail::parse_double(f[9]);
        row.q90 = detail::parse_double(f[10]);
        row.ci_lo = detail::parse_double(f[11]);
        row.ci_hi = detail::parse_double(f[12]);
        if (row.n != static_cast<std::int64_t>(row.cell.side) * row.cell.side)
            throw std::invalid_argument("parse_csv: n does not match side^2");
        rows.push_back(std::move(row));
    }
    if (!seen_header) throw std::invalid_argument("parse_csv: missing header");
    return rows;
}

enum class Predictor { n, k, n_over_sqrt_k };

inline const char* to_string(Predictor p) {
    switch (p) {
        case Predictor::n: return "n";
        case Predictor::k: return "k";
        case Predictor::n_over_sqrt_k: return "n_over_sqrt_k";
    }
    return "?";
}

inline Predictor predictor_from_string(const std::string& s) {
    if (s == "n") return Predictor::n;
    if (s == "k") return Predictor::k;
    if (s == "n_over_sqrt_k") return Predictor::n_over_sqrt_k;
    throw std::invalid_argument("unknown predictor: " + s);
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    Predictor predictor = Predictor::n;
};

/// OLS fit of log(median finish time) against log(predictor).
inline FitResult fit_scaling(const std::vector<SummaryRow>& rows, Predictor predictor) {
    if (rows.size() < 3) throw std::invalid_argument("fit_scaling: need at least 3 rows");
    std::vector<double> lx, ly;
    lx.reserve(rows.size());
    ly.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.median_censored() || std::isnan(row.median))
            throw std::domain_error(
                "fit_scaling: a row's median is censored; raise max_steps and rerun");
        if (row.median <= 0.0)
            throw std::domain_error("fit_scaling: nonpositive median cannot be log-fitted");
        double x = 0.0;
        switch (predictor) {
            case Predictor::n: x = static_cast<double>(row.n); break;
            case Predictor::k: x = static_cast<double>(row.cell.k); break;
            case Predictor::n_over_sqrt_k:
                x = static_cast<double>(row.n) / std::sqrt(static_cast<double>(row.cell.k));
                break;
        }
        lx.push_back(std::log(x));
        ly.push_back(std::log(row.median));
    }
    const LinearFit fit = ols(lx, ly);  // throws domain_error on a constant predictor
    return {fit.slope, fit.intercept, fit.r_squared, predictor};
}

struct CouplingReport {
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    std::vector<double> finish_r1;  // finish time per trial (max_steps when censored)
    std::vector<double> finish_r2;
};

namespace detail {

/// Does every agent's rumor set under the smaller radius embed in its set
/// under the larger one?
inline bool rumor_subset(const RumorState& small, const RumorState& large) {
    for (std::int32_t a = 0; a < small.agents(); ++a) {
        const auto s = small.row(a);
        const auto l = large.row(a);
        for (std::size_t w = 0; w < s.size(); ++w)
            if (s[w] & ~l[w]) return false;
    }
    return true;
}

} // namespace detail

/// Replays identical agent trajectories at radii r1 <= r2 and checks, step
/// by step, that every agent's rumor set at r1 embeds in its set at r2, and
/// that the larger radius never finishes later. Trajectories are radius-
/// independent only when movement ignores rumor state, so frog and
/// predator_prey configs are rejected.
inline CouplingReport verify_monotone_coupling(const SimConfig& base, std::int32_t r1,
                                               std::int32_t r2, std::int64_t trials) {
    if (base.variant == Variant::frog || base.variant == Variant::predator_prey)
        throw std::invalid_argument(
            "verify_monotone_coupling: movement must not depend on rumor state");
    if (r1 < 0 || r1 > r2)
        throw std::invalid_argument("verify_monotone_coupling: need 0 <= r1 <= r2");
    if (trials < 1) throw std::invalid_argument("verify_monotone_coupling: trials must be >= 1");

    CouplingReport report;
    report.trials = trials;
    report.finish_r1.reserve(static_cast<std::size_t>(trials));
    report.finish_r2.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        SimConfig c1 = base;
        c1.record_timelines = false;
        c1.seed = RngSeed{base.seed.master_seed,
                          base.seed.stream_id + static_cast<std::uint64_t>(trial)};
        SimConfig c2 = c1;
        c1.r = r1;
        c2.r = r2;
        Simulation s1(c1), s2(c2);
        if (!detail::rumor_subset(s1.rumors(), s2.rumors())) ++report.violations;
        while (!s1.done() || !s2.done()) {
            s1.step();
            s2.step();
            if (!detail::rumor_subset(s1.rumors(), s2.rumors())) ++report.violations;
        }
        const auto res1 = s1.result();
        const auto res2 = s2.result();
        if (res2.finish_time > res1.finish_time) ++report.violations;
        report.finish_r1.push_back(static_cast<double>(res1.finish_time));
        report.finish_r2.push_back(static_cast<double>(res2.finish_time));
    }
    return report;
}

} // namespace gridcast
