// gridcast command-line front end: simulation runs, parameter sweeps,
// percolation scans, oracle cross-checks, and scaling-law fits.
//
// Exit codes: 0 success; 1 oracle mismatch; 2 invalid arguments or config;
// 3 when every trial of a simulate run was censored.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridcast/dissemination.hpp"
#include "gridcast/experiment.hpp"
#include "gridcast/oracle.hpp"
#include "gridcast/visibility.hpp"

namespace {

using nlohmann::json;
using namespace gridcast;

constexpr int kExitOk = 0;
constexpr int kExitOracleMismatch = 1;
constexpr int kExitBadArgs = 2;
constexpr int kExitAllCensored = 3;

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json row_to_json(const SummaryRow& row) {
    return json{{"side", row.cell.side},
                {"n", row.n},
                {"k", row.cell.k},
                {"r", row.cell.r},
                {"variant", to_string(row.cell.variant)},
                {"trials", row.trials},
                {"censored", row.censored},
                {"median", row.median},
                {"mean", row.mean},
                {"q10", row.q10},
                {"q90", row.q90},
                {"ci_lo", row.ci_lo},
                {"ci_hi", row.ci_hi},
                {"median_censored", row.median_censored()}};
}

struct SimulateArgs {
    std::int32_t side = 32;
    std::int32_t k = 2;
    std::int32_t r = 0;
    std::string variant = "broadcast";
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    std::int64_t max_steps = 0;
    std::int32_t num_rumors = 1;
    std::int32_t prey_count = 0;
    bool all_informed_start = false;
    bool track_frontier = false;
    std::int64_t bootstrap_resamples = 2000;
    std::string output;
    std::string format = "json";
};

int cmd_simulate(const SimulateArgs& args) {
    SimConfig cfg;
    cfg.grid = GridSpec{args.side};
    cfg.k = args.k;
    cfg.r = args.r;
    cfg.variant = variant_from_string(args.variant);
    cfg.num_rumors = args.num_rumors;
    cfg.max_steps = args.max_steps;
    cfg.track_frontier = args.track_frontier;
    cfg.all_informed_start = args.all_informed_start;
    cfg.prey_count = args.prey_count;
    cfg.record_timelines = args.track_frontier;
    cfg.validate();
    if (args.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    if (static_cast<std::int64_t>(cfg.grid.n()) < 2 * cfg.k)
        std::fprintf(stderr, "warning: dense regime (n < 2k); results are valid but slow\n");

    json records = json::array();
    std::vector<double> finished;
    std::int64_t censored = 0;
    for (std::int64_t trial = 0; trial < args.trials; ++trial) {
        cfg.seed = RngSeed{args.seed, static_cast<std::uint64_t>(trial)};
        const TrialResult res = run_trial(cfg);
        json rec{{"trial", trial}, {"finish_time", res.finish_time}, {"censored", res.censored}};
        if (args.track_frontier) rec["frontier_timeline"] = res.frontier_timeline;
        records.push_back(std::move(rec));
        if (res.censored)
            ++censored;
        else
            finished.push_back(static_cast<double>(res.finish_time));
    }

    SweepCell cell{args.side, args.k, args.r, cfg.variant};
    Rng boot(derive_stream_key(args.seed, 0xB007u, 0));
    const SummaryRow row = summarize_cell(cell, std::move(finished), args.trials, censored,
                                          args.bootstrap_resamples, boot);

    const json config{{"side", args.side},
                      {"k", args.k},
                      {"r", args.r},
                      {"variant", args.variant},
                      {"num_rumors", args.num_rumors},
                      {"trials", args.trials},
                      {"seed", args.seed},
                      {"max_steps", cfg.effective_max_steps()},
                      {"track_frontier", args.track_frontier},
                      {"all_informed_start", args.all_informed_start},
                      {"prey_count", args.prey_count},
                      {"bootstrap_resamples", args.bootstrap_resamples}};

    if (args.format == "csv") {
        std::fprintf(stderr, "config: %s\n", config.dump().c_str());
        write_output(write_csv({row}), args.output);
    } else {
        const json doc{{"config", config}, {"trials", records}, {"summary", row_to_json(row)}};
        write_output(doc.dump(2) + "\n", args.output);
    }
    return censored == args.trials ? kExitAllCensored : kExitOk;
}

SweepSpec sweep_spec_from_json(const json& doc) {
    SweepSpec spec;
    spec.master_seed = doc.at("master_seed").get<std::uint64_t>();
    spec.trials = doc.at("trials").get<std::int64_t>();
    if (doc.contains("max_steps")) spec.max_steps = doc.at("max_steps").get<std::int64_t>();
    if (doc.contains("bootstrap_resamples"))
        spec.bootstrap_resamples = doc.at("bootstrap_resamples").get<std::int64_t>();
    for (const auto& c : doc.at("cells")) {
        SweepCell cell;
        cell.side = c.at("side").get<std::int32_t>();
        cell.k = c.at("k").get<std::int32_t>();
        cell.r = c.at("r").get<std::int32_t>();
        cell.variant = c.contains("variant")
                           ? variant_from_string(c.at("variant").get<std::string>())
                           : Variant::broadcast;
        spec.cells.push_back(cell);
    }
    return spec;
}

json sweep_spec_to_json(const SweepSpec& spec) {
    json cells = json::array();
    for (const auto& c : spec.cells)
        cells.push_back(json{{"side", c.side},
                             {"k", c.k},
                             {"r", c.r},
                             {"variant", to_string(c.variant)}});
    return json{{"master_seed", spec.master_seed},
                {"trials", spec.trials},
                {"max_steps", spec.max_steps},
                {"bootstrap_resamples", spec.bootstrap_resamples},
                {"cells", cells}};
}

int cmd_sweep(const std::string& config_path, const std::string& output,
              const std::string& format) {
    const json doc = json::parse(read_file(config_path));  // parse errors are line-anchored
    const SweepSpec spec = sweep_spec_from_json(doc);
    const std::vector<SummaryRow> rows = run_sweep(spec);
    if (format == "json") {
        json jrows = json::array();
        for (const auto& row : rows) jrows.push_back(row_to_json(row));
        const json out{{"config", sweep_spec_to_json(spec)}, {"rows", jrows}};
        write_output(out.dump(2) + "\n", output);
    } else {
        std::fprintf(stderr, "config: %s\n", sweep_spec_to_json(spec).dump().c_str());
        write_output(write_csv(rows), output);
    }
    return kExitOk;
}

int cmd_percolation(std::int32_t side, std::int32_t k, std::int64_t trials, double threshold,
                    std::uint64_t seed, const std::string& output) {
    const GridSpec grid{side};
    Rng rng(derive_stream_key(seed, 0x9E4Cu, 0));
    const PercolationEstimate est = estimate_percolation_radius(grid, k, trials, threshold, rng);
    const double ratio = std::sqrt(static_cast<double>(grid.n()) / static_cast<double>(k));
    const json doc{{"config",
                    json{{"side", side}, {"k", k}, {"trials", trials},
                         {"threshold", threshold}, {"seed", seed}}},
                   {"r_c_estimate", est.r_c},
                   {"degenerate", est.degenerate},
                   {"threshold", threshold},
                   {"trials", trials},
                   {"sqrt_n_over_k", ratio}};
    write_output(doc.dump(2) + "\n", output);
    return kExitOk;
}

struct OracleArgs {
    std::string check;
    std::int32_t side = 0;       // 0 -> per-check default
    std::int64_t trials = 0;     // 0 -> per-check default
    std::int64_t horizon = -1;   // -1 -> distance^2
    std::uint64_t seed = 20260819;
    std::int32_t ax = 1, ay = 2, bx = 3, by = 2;  // meeting starts
    std::int32_t x0 = -1, y0 = -1, x1 = -1, y1 = -1;  // hit endpoints
    std::int64_t steps = 0;      // 0 -> per-check default
    double lambda = 3.0;
    std::string output;
};

int emit_check(const json& doc, const std::string& output, bool pass) {
    write_output(doc.dump(2) + "\n", output);
    return pass ? kExitOk : kExitOracleMismatch;
}

int cmd_oracle_check(const OracleArgs& a) {
    if (a.check == "meeting") {
        const std::int32_t side = a.side > 0 ? a.side : 5;
        const std::int64_t trials = a.trials > 0 ? a.trials : 100000;
        const GridSpec grid{side};
        const Node na = grid.node_at(a.ax, a.ay), nb = grid.node_at(a.bx, a.by);
        const std::int32_t d = manhattan(grid, na, nb);
        const std::int64_t horizon =
            a.horizon >= 0 ? a.horizon : static_cast<std::int64_t>(d) * d;
        const JointChainSpec spec{grid, horizon, na, nb, std::nullopt};
        const double exact = exact_meeting_probability(spec);
        Rng rng(derive_stream_key(a.seed, 0x0AC1u, 0));
        const double est = mc_meeting_probability(spec, trials, rng);
        const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(trials));
        const bool pass = std::abs(est - exact) <= 3.0 * sigma;
        return emit_check(json{{"check", "meeting"},
                               {"config", json{{"side", side}, {"ax", a.ax}, {"ay", a.ay},
                                               {"bx", a.bx}, {"by", a.by}, {"horizon", horizon},
                                               {"trials", trials}, {"seed", a.seed}}},
                               {"exact", exact},
                               {"estimate", est},
                               {"sigma", sigma},
                               {"pass", pass}},
                          a.output, pass);
    }
    if (a.check == "hit") {
        const std::int32_t side = a.side > 0 ? a.side : 9;
        const std::int64_t trials = a.trials > 0 ? a.trials : 100000;
        const GridSpec grid{side};
        const std::int32_t x0 = a.x0 >= 0 ? a.x0 : side / 2;
        const std::int32_t y0 = a.y0 >= 0 ? a.y0 : side / 2;
        const std::int32_t x1 = a.x1 >= 0 ? a.x1 : x0 + 1;
        const std::int32_t y1 = a.y1 >= 0 ? a.y1 : y0;
        const Node v0 = grid.node_at(x0, y0), v = grid.node_at(x1, y1);
        const std::int32_t d = manhattan(grid, v0, v);
        const std::int64_t horizon =
            a.horizon >= 0 ? a.horizon : static_cast<std::int64_t>(d) * d;
        const double exact = exact_hit_probability(grid, v0, v, horizon);
        Rng rng(derive_stream_key(a.seed, 0x0AC2u, 0));
        const double est = mc_hit_probability(grid, v0, v, horizon, trials, rng);
        const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(trials));
        const bool pass = std::abs(est - exact) <= 3.0 * sigma;
        return emit_check(json{{"check", "hit"},
                               {"config", json{{"side", side}, {"x0", x0}, {"y0", y0},
                                               {"x1", x1}, {"y1", y1}, {"horizon", horizon},
                                               {"trials", trials}, {"seed", a.seed}}},
                               {"exact", exact},
                               {"estimate", est},
                               {"sigma", sigma},
                               {"pass", pass}},
                          a.output, pass);
    }
    if (a.check == "deviation") {
        const std::int32_t side = a.side > 0 ? a.side : 64;
        const std::int64_t trials = a.trials > 0 ? a.trials : 20000;
        const std::int64_t steps = a.steps > 0 ? a.steps : 400;
        const GridSpec grid{side};
        const Node v0 = grid.node_at(side / 2, side / 2);
        Rng rng(derive_stream_key(a.seed, 0x0AC3u, 0));
        const DeviationTail tail =
            empirical_deviation_tail(grid, v0, steps, a.lambda, trials, rng);
        const bool pass = tail.empirical <= tail.bound + 3.0 * tail.sigma;
        return emit_check(json{{"check", "deviation"},
                               {"config", json{{"side", side}, {"steps", steps},
                                               {"lambda", a.lambda}, {"trials", trials},
                                               {"seed", a.seed}}},
                               {"empirical", tail.empirical},
                               {"bound", tail.bound},
                               {"sigma", tail.sigma},
                               {"pass", pass}},
                          a.output, pass);
    }
    if (a.check == "range") {
        const std::int32_t side = a.side > 0 ? a.side : 64;
        const std::int64_t trials = a.trials > 0 ? a.trials : 2000;
        const std::int64_t steps = a.steps > 0 ? a.steps : 1024;
        const GridSpec grid{side};
        const Node v0 = grid.node_at(side / 2, side / 2);
        Rng rng_a(derive_stream_key(a.seed, 0x0AC4u, 0));
        Rng rng_b(derive_stream_key(a.seed, 0x0AC4u, 1));
        const RangeSummary first = empirical_range(grid, v0, steps, trials, rng_a);
        const RangeSummary second = empirical_range(grid, v0, steps, trials, rng_b);
        const double hi = std::max(first.empirical_c2, second.empirical_c2);
        const bool pass = first.empirical_c2 > 0.0 && second.empirical_c2 > 0.0 &&
                          std::abs(first.empirical_c2 - second.empirical_c2) <= 0.2 * hi;
        return emit_check(json{{"check", "range"},
                               {"config", json{{"side", side}, {"steps", steps},
                                               {"trials", trials}, {"seed", a.seed}}},
                               {"c2_batch_a", first.empirical_c2},
                               {"c2_batch_b", second.empirical_c2},
                               {"mean_distinct_a", first.mean_distinct},
                               {"mean_distinct_b", second.mean_distinct},
                               {"pass", pass}},
                          a.output, pass);
    }
    if (a.check == "broadcast-expectation") {
        const std::int32_t side = a.side > 0 ? a.side : 3;
        const std::int64_t trials = a.trials > 0 ? a.trials : 100000;
        const GridSpec grid{side};
        const double exact = exact_broadcast_expectation(grid);
        SimConfig cfg;
        cfg.grid = grid;
        cfg.k = 2;
        cfg.r = 0;
        cfg.variant = Variant::broadcast;
        cfg.record_timelines = false;
        double sum = 0.0, sumsq = 0.0;
        for (std::int64_t trial = 0; trial < trials; ++trial) {
            cfg.seed = RngSeed{a.seed, static_cast<std::uint64_t>(trial)};
            const auto t = static_cast<double>(run_broadcast(cfg).finish_time);
            sum += t;
            sumsq += t * t;
        }
        const double est = sum / static_cast<double>(trials);
        const double var = std::max(0.0, sumsq / static_cast<double>(trials) - est * est);
        const double sigma = std::sqrt(var / static_cast<double>(trials));
        const bool pass = std::abs(est - exact) <= 3.0 * sigma;
        return emit_check(json{{"check", "broadcast-expectation"},
                               {"config", json{{"side", side}, {"trials", trials},
                                               {"seed", a.seed}}},
                               {"exact", exact},
                               {"estimate", est},
                               {"sigma", sigma},
                               {"pass", pass}},
                          a.output, pass);
    }
    throw std::invalid_argument("unknown check: " + a.check);
}

int cmd_fit(const std::string& input, const std::string& predictor, const std::string& output) {
    const std::vector<SummaryRow> rows = parse_csv(read_file(input));
    const FitResult fit = fit_scaling(rows, predictor_from_string(predictor));
    const json doc{{"slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"r_squared", fit.r_squared},
                   {"predictor", to_string(fit.predictor)}};
    write_output(doc.dump(2) + "\n", output);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridcast: rumor dissemination on grids via lazy random walks"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run trials of one configuration");
    simulate->add_option("--side", sim.side, "grid side length")->required();
    simulate->add_option("--k", sim.k, "number of agents")->required();
    simulate->add_option("--r", sim.r, "transmission radius");
    simulate->add_option("--variant", sim.variant,
                         "broadcast|gossip|frog|coverage|predator_prey");
    simulate->add_option("--trials", sim.trials, "trials to run");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--max-steps", sim.max_steps, "censoring horizon (0 = default)");
    simulate->add_option("--num-rumors", sim.num_rumors, "rumors (gossip)");
    simulate->add_option("--prey-count", sim.prey_count, "preys (predator_prey)");
    simulate->add_flag("--all-informed-start", sim.all_informed_start,
                       "coverage: start with every agent informed");
    simulate->add_flag("--track-frontier", sim.track_frontier,
                       "record the informed-area frontier per step");
    simulate->add_option("--bootstrap-resamples", sim.bootstrap_resamples,
                         "bootstrap resamples for the median CI");
    simulate->add_option("--output", sim.output, "output path (default stdout)");
    simulate->add_option("--format", sim.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string sweep_config, sweep_output, sweep_format = "csv";
    auto* sweep = app.add_subcommand("sweep", "run a sweep from a JSON config");
    sweep->add_option("--config", sweep_config, "JSON sweep config")->required();
    sweep->add_option("--output", sweep_output, "output path (default stdout)");
    sweep->add_option("--format", sweep_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::int32_t perc_side = 64, perc_k = 16;
    std::int64_t perc_trials = 200;
    double perc_threshold = 0.5;
    std::uint64_t perc_seed = 0;
    std::string perc_output;
    auto* percolation = app.add_subcommand("percolation", "estimate the percolation radius");
    percolation->add_option("--side", perc_side, "grid side length")->required();
    percolation->add_option("--k", perc_k, "number of agents")->required();
    percolation->add_option("--trials", perc_trials, "placements per radius probe");
    percolation->add_option("--threshold", perc_threshold, "giant-component fraction");
    percolation->add_option("--seed", perc_seed, "master seed");
    percolation->add_option("--output", perc_output, "output path (default stdout)");

    OracleArgs ora;
    auto* oracle = app.add_subcommand("oracle-check", "compare Monte Carlo against exact values");
    oracle->add_option("--check", ora.check,
                       "meeting|hit|deviation|range|broadcast-expectation")
        ->required()
        ->check(CLI::IsMember({"meeting", "hit", "deviation", "range",
                               "broadcast-expectation"}));
    oracle->add_option("--side", ora.side, "grid side (0 = per-check default)");
    oracle->add_option("--trials", ora.trials, "trials (0 = per-check default)");
    oracle->add_option("--horizon", ora.horizon, "horizon (-1 = distance^2)");
    oracle->add_option("--seed", ora.seed, "master seed");
    oracle->add_option("--ax", ora.ax, "meeting: first walk start x");
    oracle->add_option("--ay", ora.ay, "meeting: first walk start y");
    oracle->add_option("--bx", ora.bx, "meeting: second walk start x");
    oracle->add_option("--by", ora.by, "meeting: second walk start y");
    oracle->add_option("--x0", ora.x0, "hit: start x (-1 = center)");
    oracle->add_option("--y0", ora.y0, "hit: start y (-1 = center)");
    oracle->add_option("--x1", ora.x1, "hit: target x (-1 = adjacent)");
    oracle->add_option("--y1", ora.y1, "hit: target y (-1 = adjacent)");
    oracle->add_option("--steps", ora.steps, "deviation/range: walk length");
    oracle->add_option("--lambda", ora.lambda, "deviation: tail parameter");
    oracle->add_option("--output", ora.output, "output path (default stdout)");

    std::string fit_input, fit_predictor = "n", fit_output;
    auto* fit = app.add_subcommand("fit", "log-log scaling fit over a sweep CSV");
    fit->add_option("--input", fit_input, "CSV produced by sweep")->required();
    fit->add_option("--predictor", fit_predictor, "n|k|n_over_sqrt_k")
        ->check(CLI::IsMember({"n", "k", "n_over_sqrt_k"}));
    fit->add_option("--output", fit_output, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_output, sweep_format);
        if (percolation->parsed())
            return cmd_percolation(perc_side, perc_k, perc_trials, perc_threshold, perc_seed,
                                   perc_output);
        if (oracle->parsed()) return cmd_oracle_check(ora);
        if (fit->parsed()) return cmd_fit(fit_input, fit_predictor, fit_output);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadArgs;
    }
    return kExitBadArgs;
}
