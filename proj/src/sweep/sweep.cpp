#include "fracenv/sweep/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "fracenv/errors.hpp"
#include "fracenv/parallel.hpp"

namespace fracenv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

FracParamsd SweepConfig::params(double s) const {
    auto p = radius > 0 ? FracParamsd::make(s, radius, tol) : FracParamsd::for_domain(s, domain, tol);
    p.min_kernel_nodes = min_kernel_nodes;
    return p;
}

std::vector<Point2d> oracle_probes(const Domaind& domain, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-domain.a(), domain.a());
    std::uniform_real_distribution<double> uy(-domain.b(), domain.b());
    std::vector<Point2d> out;
    while (static_cast<int>(out.size()) < count) {
        const Point2d x = domain.center() + Point2d(ux(rng), domain.is_interval() ? 0.0 : uy(rng));
        if (domain.level(x) <= 0.81)
            out.push_back(x);
    }
    return out;
}

OracleCheck hull_cross_check(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& classical,
                             std::span<const Point2d> probes, int samples) {
    const auto pts = domain.boundary_samples(samples);
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& p : pts)
        vals.push_back(g(p));
    OracleCheck out;
    out.samples = samples;
    for (const auto& x : probes) {
        OracleProbe pr;
        pr.x = x;
        pr.classical = classical.sample(x, domain, g);
        pr.oracle = hull_envelope_oracle(pts, vals, x);
        out.max_difference = std::max(out.max_difference, std::abs(pr.classical - pr.oracle));
        out.probes.push_back(pr);
    }
    return out;
}

GapTable half_relaxed_gap(std::span<const GridFunctiond> envelopes, std::span<const double> s_values,
                          std::span<const double> thresholds, int min_count) {
    if (envelopes.size() != s_values.size())
        throw InvalidArgument("half_relaxed_gap: one envelope per s-value expected");
    std::vector<double> sorted(thresholds.begin(), thresholds.end());
    std::sort(sorted.begin(), sorted.end());
    GapTable out;
    double last = std::numeric_limits<double>::infinity();
    for (double s0 : sorted) {
        GapRow row;
        row.threshold = s0;
        std::vector<std::size_t> members;
        for (std::size_t k = 0; k < s_values.size(); ++k)
            if (s_values[k] >= s0)
                members.push_back(k);
        row.count = static_cast<int>(members.size());
        if (row.count < min_count) {
            row.skipped = true;
            row.note = "fewer than " + std::to_string(min_count) + " s-values at or above threshold";
            out.rows.push_back(row);
            continue;
        }
        const GridFunctiond& first = envelopes[members.front()];
        for (int i = 0; i < first.size(); ++i) {
            if (!first.interior(i))
                continue;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (auto k : members) {
                lo = std::min(lo, envelopes[k][i]);
                hi = std::max(hi, envelopes[k][i]);
            }
            row.spread = std::max(row.spread, hi - lo);
        }
        if (row.spread > last)
            out.nonincreasing = false;
        last = row.spread;
        out.rows.push_back(row);
    }
    return out;
}

SweepResult run_convergence_sweep(const SweepConfig& config) {
    if (config.s_values.empty())
        throw InvalidArgument("sweep: no s-values");
    if (!std::is_sorted(config.s_values.begin(), config.s_values.end()))
        throw InvalidArgument("sweep: s-values must be ascending");
    if (config.s_values.front() < 0.6 || config.s_values.back() > 0.995)
        throw InvalidArgument("sweep: s-values must lie in [0.6, 0.995]");
    const GridFunctiond grid = config.grid();
    const DirectionSet dirs = DirectionSet::wide_stencil(config.width);
    const int n = static_cast<int>(config.s_values.size());

    SweepResult r;
    r.s_values = config.s_values;
    r.floor = config.floor();
    r.trend_slack = config.trend_slack();

    auto t0 = Clock::now();
    r.classical = classical_envelope(config.domain, config.g, grid, dirs, config.tol, config.workers);
    r.timings.emplace_back("classical", seconds_since(t0));

    t0 = Clock::now();
    const auto probes = oracle_probes(config.domain, config.probes, config.seed);
    r.oracle = hull_cross_check(config.domain, config.g, r.classical.solution, probes,
                                config.domain.boundary_sample_count());
    r.timings.emplace_back("oracle", seconds_since(t0));

    // s-runs side by side; leftover workers go to each run
    const int outer = std::max(1, std::min(config.workers, n));
    const int inner = std::max(1, config.workers / outer);
    r.envelopes.resize(static_cast<std::size_t>(n));
    std::vector<double> run_seconds(static_cast<std::size_t>(n));
    parallel_for(n, outer, [&](int k) {
        const auto tk = Clock::now();
        const double s = config.s_values[static_cast<std::size_t>(k)];
        r.envelopes[static_cast<std::size_t>(k)] =
            fractional_envelope(config.domain, config.g, config.params(s), grid, dirs, inner);
        run_seconds[static_cast<std::size_t>(k)] = seconds_since(tk);
    });
    for (int k = 0; k < n; ++k)
        r.timings.emplace_back(fmt("fractional s=%.4g", config.s_values[static_cast<std::size_t>(k)]),
                               run_seconds[static_cast<std::size_t>(k)]);

    const Eigen::VectorXd& ref = r.classical.solution.values();
    for (int k = 0; k < n; ++k) {
        const auto& u = r.envelopes[static_cast<std::size_t>(k)];
        DistanceRow row;
        row.s = config.s_values[static_cast<std::size_t>(k)];
        row.iterations = u.iterations;
        int count = 0;
        for (int i = 0; i < grid.size(); ++i) {
            if (!grid.interior(i))
                continue;
            const double d = std::abs(u.solution[i] - ref[i]);
            row.sup_distance = std::max(row.sup_distance, d);
            row.mean_distance += d;
            ++count;
        }
        row.mean_distance /= std::max(count, 1);
        r.table.push_back(row);
    }

    t0 = Clock::now();
    std::vector<GridFunctiond> grids;
    grids.reserve(r.envelopes.size());
    for (const auto& e : r.envelopes)
        grids.push_back(e.solution);
    r.gap = half_relaxed_gap(grids, config.s_values, config.thresholds);
    r.timings.emplace_back("gap", seconds_since(t0));

    for (std::size_t k = 1; k < r.table.size(); ++k)
        if (r.table[k].sup_distance > r.table[k - 1].sup_distance + r.trend_slack)
            r.trend_ok = false;
    r.floor_ok = r.table.back().sup_distance <= r.floor;
    r.oracle_ok = r.oracle.max_difference <= r.floor;
    if (config.improvement > 0)
        r.improvement_ok = r.table.back().sup_distance <= config.improvement * r.table.front().sup_distance;

    if (!r.trend_ok)
        r.failures.push_back("distance trend increases beyond slack " + fmt("%.3g", r.trend_slack));
    if (!r.floor_ok)
        r.failures.push_back("final distance above floor " + fmt("%.6g", r.floor));
    if (!r.oracle_ok)
        r.failures.push_back("classical envelope differs from hull oracle by " +
                             fmt("%.6g", r.oracle.max_difference));
    if (!r.improvement_ok)
        r.failures.push_back("final distance not below " + fmt("%.3g", config.improvement) +
                             " times the first");
    if (!r.gap.nonincreasing)
        r.failures.push_back("half-relaxed spread increases with the threshold");
    return r;
}

std::string format_table(const SweepResult& r) {
    std::string out = "       s   sup_distance  mean_distance  iterations\n";
    for (const auto& row : r.table) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%8.4f  %13.6e  %13.6e  %10d\n", row.s, row.sup_distance, row.mean_distance,
                      row.iterations);
        out += buf;
    }
    return out;
}

} // namespace fracenv
