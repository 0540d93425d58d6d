// Acceptance gate for the gridcast library.
//
// Runs the full battery of release criteria (C1..C11) against the shipped
// headers and prints one [PASS]/[FAIL] line per criterion.  Exit status is 0
// iff every criterion passes.  Everything is seeded, so the binary is fully
// deterministic across runs and machines with the same floating-point model.

#include <gridcast/dissemination.hpp>
#include <gridcast/experiment.hpp>
#include <gridcast/grid.hpp>
#include <gridcast/oracle.hpp>
#include <gridcast/rng.hpp>
#include <gridcast/stats.hpp>
#include <gridcast/visibility.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

namespace gc = gridcast;

namespace {

constexpr std::uint64_t kSeed = 20260819ULL;

int g_failures = 0;

void report(const char* id, bool pass, const char* what, const std::string& detail) {
  std::printf("[%s] %s %s (%s)\n", pass ? "PASS" : "FAIL", id, what, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

double median_of(std::vector<double> v) { return gc::median(v); }

// Mean finish time of a variant run with a generous horizon (no censoring).
struct EngineMean {
  double mean = 0.0;
  double se_mean = 0.0;
  int censored = 0;
};

EngineMean engine_mean(const gc::SimConfig& base, int trials) {
  gc::SimConfig cfg = base;
  cfg.record_timelines = false;
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(trials));
  int censored = 0;
  for (int t = 0; t < trials; ++t) {
    cfg.seed = gc::RngSeed{base.seed.master_seed, base.seed.stream_id + static_cast<std::uint64_t>(t)};
    const gc::TrialResult res = gc::run_trial(cfg);
    if (res.censored) {
      ++censored;
      continue;
    }
    xs.push_back(static_cast<double>(res.finish_time));
  }
  EngineMean out;
  out.censored = censored;
  out.mean = gc::mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double n = static_cast<double>(xs.size());
  out.se_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

}  // namespace

int main() {
  std::printf("gridcast acceptance battery (seed %" PRIu64 ")\n", kSeed);

  // ---------------------------------------------------------------- shared sweep
  // One 9-cell sweep feeds the scaling criteria (C1, C2, C8) and the
  // reproducibility criterion (C11).
  gc::SweepSpec spec;
  spec.trials = 200;
  spec.master_seed = kSeed;
  spec.cells = {
      {32, 16, 0, gc::Variant::broadcast},   // 0
      {64, 16, 0, gc::Variant::broadcast},   // 1
      {128, 16, 0, gc::Variant::broadcast},  // 2
      {128, 4, 0, gc::Variant::broadcast},   // 3
      {128, 64, 0, gc::Variant::broadcast},  // 4
      {128, 256, 0, gc::Variant::broadcast}, // 5
      {32, 16, 0, gc::Variant::frog},        // 6
      {64, 16, 0, gc::Variant::frog},        // 7
      {128, 16, 0, gc::Variant::frog},       // 8
  };
  std::fprintf(stderr, "running shared 9-cell sweep (pass 1)...\n");
  const std::vector<gc::SummaryRow> rows = gc::run_sweep(spec);

  // ------------------------------------------------------------------------- C1
  // Broadcast completion grows near-linearly in n at fixed k (slope of
  // log median vs log n close to 1, strong linear fit).
  {
    const std::vector<gc::SummaryRow> sub = {rows[0], rows[1], rows[2]};
    const gc::FitResult fit = gc::fit_scaling(sub, gc::Predictor::n);
    const bool pass = fit.slope >= 0.85 && fit.slope <= 1.25 && fit.r_squared >= 0.98;
    report("C1", pass, "broadcast time scales ~n at fixed k",
           fmt("slope=%.4f in [0.85,1.25], r2=%.4f >= 0.98", fit.slope, fit.r_squared));
  }

  // ------------------------------------------------------------------------- C2
  // More walkers help: at fixed n the fitted exponent in k is clearly
  // negative and consistent with an inverse-square-root speedup.
  {
    const std::vector<gc::SummaryRow> sub = {rows[3], rows[2], rows[4], rows[5]};
    const gc::FitResult fit = gc::fit_scaling(sub, gc::Predictor::k);
    const bool pass = fit.slope >= -0.70 && fit.slope <= -0.30;
    report("C2", pass, "broadcast time shrinks ~k^-1/2 at fixed n",
           fmt("slope=%.4f in [-0.70,-0.30], r2=%.4f", fit.slope, fit.r_squared));
  }

  // ------------------------------------------------------------------------- C3
  // Monotone coupling in the visibility radius: under the shared-randomness
  // coupling a larger radius never finishes later, and medians drop with r.
  {
    gc::SimConfig base;
    base.grid = gc::GridSpec{128};
    base.k = 64;
    base.variant = gc::Variant::broadcast;
    base.record_timelines = false;

    struct Pair { std::int32_t r1, r2; std::uint64_t stream; };
    const Pair pairs[] = {{0, 4, 0xC30000ULL}, {4, 8, 0xC31000ULL}, {0, 8, 0xC32000ULL}};
    std::int64_t violations = 0;
    bool ok = true;
    double m0 = 0, m4 = 0, m8 = 0;
    for (const Pair& p : pairs) {
      base.seed = gc::RngSeed{kSeed, p.stream};
      const gc::CouplingReport rep = gc::verify_monotone_coupling(base, p.r1, p.r2, 200);
      violations += rep.violations;
      std::vector<double> f1(rep.finish_r1.begin(), rep.finish_r1.end());
      std::vector<double> f2(rep.finish_r2.begin(), rep.finish_r2.end());
      if (p.r1 == 0 && p.r2 == 4) { m0 = median_of(f1); m4 = median_of(f2); }
      if (p.r1 == 4 && p.r2 == 8) { m8 = median_of(f2); }
    }
    ok = violations == 0 && m0 >= m4 && m4 >= m8 && m8 > 0.0 && (m0 / m8) <= 4.0;
    report("C3", ok, "larger visibility radius never finishes later (coupled)",
           fmt("violations=%lld, medians r0=%.0f >= r4=%.0f >= r8=%.0f, ratio=%.2f <= 4",
               static_cast<long long>(violations), m0, m4, m8, m8 > 0 ? m0 / m8 : -1.0));
  }

  // ------------------------------------------------------------------------- C4
  // Simulator and exact finite-horizon oracles agree: meeting probability,
  // hitting probability, and expected two-walker broadcast time.
  {
    bool pass = true;
    std::string detail;

    // Meeting probability on a 5x5 grid, exact DP vs Monte Carlo.
    gc::JointChainSpec mspec;
    mspec.grid = gc::GridSpec{5};
    mspec.start_a = mspec.grid.node_at(1, 2);
    mspec.start_b = mspec.grid.node_at(3, 2);
    mspec.horizon = 4;
    const double p_exact = gc::exact_meeting_probability(mspec);
    gc::Rng mc_rng(gc::derive_stream_key(kSeed, 0xC4, 0));
    const double p_mc = gc::mc_meeting_probability(mspec, 100000, mc_rng);
    const double sd_m = 3.0 * std::sqrt(p_exact * (1.0 - p_exact) / 100000.0);
    if (std::abs(p_mc - p_exact) > sd_m) pass = false;
    detail += fmt("meet |%.5f-%.5f|<=%.5f", p_mc, p_exact, sd_m);

    // Hitting probability: adjacent target at horizon 1 is exactly 1/5.
    gc::GridSpec g9{9};
    const gc::Node c = g9.node_at(4, 4);
    const double p_adj = gc::exact_hit_probability(g9, c, g9.node_at(5, 4), 1);
    if (std::abs(p_adj - 0.2) > 1e-12) pass = false;
    gc::Rng hit_rng(gc::derive_stream_key(kSeed, 0xC4, 1));
    const double p_hit_exact = gc::exact_hit_probability(g9, c, g9.node_at(6, 4), 4);
    const double p_hit_mc = gc::mc_hit_probability(g9, c, g9.node_at(6, 4), 4, 100000, hit_rng);
    const double sd_h = 3.0 * std::sqrt(p_hit_exact * (1.0 - p_hit_exact) / 100000.0);
    if (std::abs(p_hit_mc - p_hit_exact) > sd_h) pass = false;
    detail += fmt("; hit1=%.12f, |%.5f-%.5f|<=%.5f", p_adj, p_hit_mc, p_hit_exact, sd_h);

    // Expected broadcast time for two walkers, engine vs linear solve.
    for (int side : {2, 3}) {
      gc::GridSpec g{side};
      const double expect = gc::exact_broadcast_expectation(g);
      gc::SimConfig cfg;
      cfg.grid = g;
      cfg.k = 2;
      cfg.r = 0.0;
      cfg.variant = gc::Variant::broadcast;
      cfg.max_steps = 1000000;
      cfg.seed = gc::RngSeed{gc::derive_stream_key(kSeed, 0xC4, 2 + static_cast<std::uint64_t>(side)), 0};
      const EngineMean em = engine_mean(cfg, 100000);
      if (em.censored != 0 || std::abs(em.mean - expect) > 3.0 * em.se_mean) pass = false;
      detail += fmt("; side%d |%.4f-%.4f|<=%.4f", side, em.mean, expect, 3.0 * em.se_mean);
    }
    report("C4", pass, "engine matches exact meeting/hitting/broadcast oracles", detail);
  }

  // ------------------------------------------------------------------------- C5
  // The lazy walk preserves the uniform distribution: after a long warm-up
  // from uniform starts, walker positions are uniform over nodes (chi-square
  // goodness of fit at the 0.1% level).
  {
    const gc::GridSpec grid{32};
    const int n = grid.n();
    const int k = 64;
    const int snapshots = 1000;
    const int warm = 10 * n;
    std::vector<std::int64_t> bins(static_cast<std::size_t>(n), 0);
    for (int s = 0; s < snapshots; ++s) {
      gc::Rng rng(gc::derive_stream_key(kSeed, 0xC5, static_cast<std::uint64_t>(s)));
      for (int a = 0; a < k; ++a) {
        const gc::Node start = static_cast<gc::Node>(rng.bounded(static_cast<std::uint64_t>(n)));
        std::int32_t x = grid.x_of(start);
        std::int32_t y = grid.y_of(start);
        for (int t = 0; t < warm; ++t) gc::lazy_step_xy(grid, x, y, rng);
        ++bins[static_cast<std::size_t>(grid.node_at(x, y))];
      }
    }
    const double chi2 = gc::chi_square_uniform(bins);
    const double crit = gc::chi_square_quantile(0.999, n - 1);
    const bool pass = chi2 <= crit;
    report("C5", pass, "long-run walker positions are uniform on the grid",
           fmt("chi2=%.1f <= %.1f (dof=%d, %d samples)", chi2, crit, n - 1, snapshots * k));
  }

  // ------------------------------------------------------------------------- C6
  // Single-walk displacement concentrates: the empirical tail of exceeding
  // lambda*sqrt(steps) stays below the sub-Gaussian envelope 2*exp(-l^2/2).
  {
    const gc::GridSpec grid{64};
    bool pass = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
      const double lambda = 1.0 + i;
      gc::Rng rng(gc::derive_stream_key(kSeed, 0xC6, static_cast<std::uint64_t>(i)));
      const gc::DeviationTail tail =
          gc::empirical_deviation_tail(grid, grid.node_at(32, 32), 400, lambda, 20000, rng);
      const double sd = 3.0 * std::sqrt(std::max(tail.empirical, 1e-6) * (1.0 - std::min(tail.empirical, 1.0 - 1e-9)) / 20000.0);
      if (tail.empirical > tail.bound + sd) pass = false;
      detail += fmt("%sl=%.0f: %.4f<=%.4f", i ? "; " : "", lambda, tail.empirical, tail.bound + sd);
    }
    report("C6", pass, "walk displacement tail obeys sub-Gaussian envelope", detail);
  }

  // ------------------------------------------------------------------------- C7
  // Below the connectivity threshold the visibility graph stays shattered:
  // the 99th percentile of the largest island stays small and grows only
  // modestly as the walker density rises with r ~ sqrt(n/k)/2.
  {
    const gc::GridSpec grid{128};
    struct Cfg { int k; double r; };
    const Cfg cfgs[] = {{16, 16.0}, {64, 8.0}, {256, 4.0}};
    double p99[3] = {0, 0, 0};
    gc::ComponentScratch scratch;
    for (int i = 0; i < 3; ++i) {
      gc::Rng rng(gc::derive_stream_key(kSeed, 0xC7, static_cast<std::uint64_t>(i)));
      std::vector<double> maxima;
      maxima.reserve(1000);
      gc::ComponentLabeling lab;
      std::vector<std::int32_t> xs(static_cast<std::size_t>(cfgs[i].k));
      std::vector<std::int32_t> ys(static_cast<std::size_t>(cfgs[i].k));
      for (int s = 0; s < 1000; ++s) {
        for (int a = 0; a < cfgs[i].k; ++a) {
          const gc::Node v = static_cast<gc::Node>(rng.bounded(static_cast<std::uint64_t>(grid.n())));
          xs[static_cast<std::size_t>(a)] = grid.x_of(v);
          ys[static_cast<std::size_t>(a)] = grid.y_of(v);
        }
        gc::components_into(grid, xs, ys, cfgs[i].r, scratch, lab);
        const gc::IslandStats st = gc::island_stats(lab);
        maxima.push_back(static_cast<double>(st.max_size));
      }
      p99[i] = gc::quantile(maxima, 0.99);
    }
    const bool pass = p99[0] >= 1.0 && p99[1] / p99[0] <= 2.5 && p99[2] / p99[1] <= 2.5;
    report("C7", pass, "islands stay small below the percolation radius",
           fmt("p99 max island = %.0f, %.0f, %.0f (ratios %.2f, %.2f <= 2.5)",
               p99[0], p99[1], p99[2], p99[1] / p99[0], p99[2] / p99[1]));
  }

  // ------------------------------------------------------------------------- C8
  // The frog variant (uninformed walkers sleep) still completes in time that
  // scales near-linearly with n at fixed k.
  {
    const std::vector<gc::SummaryRow> sub = {rows[6], rows[7], rows[8]};
    const gc::FitResult fit = gc::fit_scaling(sub, gc::Predictor::n);
    const bool pass = fit.slope >= 0.80 && fit.slope <= 1.30;
    report("C8", pass, "frog-variant time scales ~n at fixed k",
           fmt("slope=%.4f in [0.80,1.30], r2=%.4f", fit.slope, fit.r_squared));
  }

  // ------------------------------------------------------------------------- C9
  // Cover time drops with the number of walkers: quadrupling k cuts the
  // median all-informed cover time by roughly 4x (within a generous band).
  {
    double med[2] = {0, 0};
    int idx = 0;
    for (int k : {16, 64}) {
      gc::SimConfig cfg;
      cfg.grid = gc::GridSpec{64};
      cfg.k = k;
      cfg.r = 0.0;
      cfg.variant = gc::Variant::coverage;
      cfg.all_informed_start = true;
      cfg.record_timelines = false;
      std::vector<double> xs;
      xs.reserve(200);
      for (int t = 0; t < 200; ++t) {
        cfg.seed = gc::RngSeed{gc::derive_stream_key(kSeed, 0xC9, static_cast<std::uint64_t>(k)),
                               static_cast<std::uint64_t>(t)};
        const gc::TrialResult res = gc::run_trial(cfg);
        xs.push_back(static_cast<double>(res.finish_time));
      }
      med[idx++] = gc::median(xs);
    }
    const double ratio = med[0] / med[1];
    const bool pass = ratio >= 2.6 && ratio <= 5.4;
    report("C9", pass, "4x walkers cover the grid ~4x faster",
           fmt("median k16=%.0f, k64=%.0f, ratio=%.2f in [2.6,5.4]", med[0], med[1], ratio));
  }

  // ------------------------------------------------------------------------ C10
  // The estimated percolation radius of the visibility graph sits at the
  // sqrt(n/k) scale.
  {
    gc::Rng rng(gc::derive_stream_key(kSeed, 0xC10, 0));
    const gc::PercolationEstimate est =
        gc::estimate_percolation_radius(gc::GridSpec{128}, 64, 200, 0.25, rng);
    const double target = std::sqrt(16384.0 / 64.0);  // 16
    const bool pass = !est.degenerate && est.r_c >= target / 2.0 && est.r_c <= target * 2.0;
    report("C10", pass, "percolation radius estimate sits at the sqrt(n/k) scale",
           fmt("r_c=%d in [%.0f,%.0f]", est.r_c, target / 2.0, target * 2.0));
  }

  // ------------------------------------------------------------------------ C11
  // Bitwise reproducibility: rerunning the identical sweep yields a
  // byte-identical CSV.
  {
    std::fprintf(stderr, "running shared 9-cell sweep (pass 2)...\n");
    const std::vector<gc::SummaryRow> rows2 = gc::run_sweep(spec);
    const bool pass = gc::write_csv(rows) == gc::write_csv(rows2);
    report("C11", pass, "identical seeds reproduce byte-identical results",
           fmt("csv bytes %s", pass ? "equal" : "differ"));
  }

  std::printf("%d/11 criteria passed\n", 11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
