// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracenv/cli/cli.hpp"
#include "fracenv/envelope/envelope.hpp"
#include "fracenv/frac1d/constant.hpp"
#include "fracenv/frac1d/kernel.hpp"
#include "fracenv/frac1d/line.hpp"
#include "fracenv/sweep/sweep.hpp"
#include "fracenv/validate/validate.hpp"

using namespace fracenv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& n : o.notes)
        std::printf("    %s\n", n.c_str());
    std::printf("%s criterion %d: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass)
        ++failures;
}

double constant_oracle(double s) {
    return std::pow(2.0, 2 * s) * s * boost::math::tgamma(s + 0.5) /
           (std::sqrt(std::numbers::pi) * boost::math::tgamma(1 - s));
}

double bump(double t, double s) { return std::abs(t) < 1 ? std::pow(1 - t * t, s) : 0.0; }

// continuum operator of the bump at t: Taylor near r = 0, tanh-sinh between kinks, closed-form tail
double bump_operator_oracle(double s, double t) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double vt = bump(t, s);
    const double q = 1 - t * t;
    const double v2 = -2 * s * std::pow(q, s - 1) + 4 * s * (s - 1) * t * t * std::pow(q, s - 2);
    const double eps = 1e-3;
    auto f = [&](double r) { return (bump(t + r, s) + bump(t - r, s) - 2 * vt) * std::pow(r, -1 - 2 * s); };
    const double a = 1 - std::abs(t), b = 1 + std::abs(t);
    double acc = v2 * std::pow(eps, 2 - 2 * s) / (2 - 2 * s);
    acc += ts.integrate(f, eps, a);
    if (b > a)
        acc += ts.integrate(f, a, b);
    acc += -2 * vt / (2 * s * std::pow(b, 2 * s));
    return constant_oracle(s) * acc;
}

LineProblem<double> sampled_line(int n, double l, double t0, const std::function<double(double)>& v, double far) {
    LineProblem<double> p;
    p.spacing = l;
    p.values.resize(n);
    for (int j = 0; j < n; ++j)
        p.values[j] = v(t0 + j * l);
    p.exterior.value = [=](long i) { return v(t0 + double(i) * l); };
    p.exterior.far_field = [far](long, int) { return std::optional<double>(far); };
    return p;
}

const Domaind disk = Domaind::disk({0, 0}, 1.0);

Outcome constant_criterion() {
    Outcome o;
    const double e = std::abs(frac_constant(0.5) - 1 / std::numbers::pi);
    o.require(e <= 1e-12, fmt("|c(1/2) - 1/pi| = %.3g", e));
    const double eo = std::abs(frac_constant(0.5) - constant_oracle(0.5));
    o.require(eo <= 1e-12, fmt("|c(1/2) - gamma oracle| = %.3g", eo));
    const double r = frac_constant(0.99) / (2 * (1 - 0.99));
    o.require(r >= 0.95 && r <= 1.05, fmt("c(0.99) / (2 (1 - 0.99)) = %.6f", r));
    return o;
}

Outcome operator_criterion() {
    Outcome o;
    {
        const auto p = LineProblem<double>::constant(31, 1.0 / 32, 0.731);
        double worst = 0;
        for (double s : {0.3, 0.6, 0.95}) {
            const auto kw = kernel_weights(s, 1.0 / 32, 256);
            for (int j = 0; j < 31; ++j)
                worst = std::max(worst, std::abs(apply_frac_lap_line(p, kw, j)));
        }
        o.require(worst == 0.0, fmt("constant sequences: max |L c| = %.3g", worst));
    }
    {
        const double l = 1.0 / 64;
        const double scale = 250.0;
        double worst = 0;
        for (double s : {0.6, 0.8, 0.95}) {
            const auto kw = kernel_weights(s, l, 8 * 64);
            LineProblem<double> p;
            p.spacing = l;
            p.values.resize(21);
            for (int j = 0; j < 21; ++j)
                p.values[j] = scale * (0.3 - j * l);
            p.exterior.value = [=](long i) { return scale * (0.3 - double(i) * l); };
            // symmetric truncation: the far constants mirror each other about node j
            p.exterior.far_field = [=](long j, int side) {
                return std::optional<double>(scale * (0.3 - (double(j) + side * 1e4) * l));
            };
            for (int j = 0; j < 21; ++j)
                worst = std::max(worst, std::abs(apply_frac_lap_line(p, kw, j)));
        }
        o.require(worst <= 1e-10 * scale, fmt("affine data: max |L v| = %.3g, bound %.3g", worst, 1e-10 * scale));
    }
    for (double s : {0.6, 0.8}) {
        const double oracle = bump_operator_oracle(s, 0.0);
        const double l = 1.0 / 256;
        const auto p = sampled_line(511, l, -1 + l, [s](double t) { return bump(t, s); }, 0.0);
        const auto kw = kernel_weights(s, l, 8 * 256);
        const double discrete = apply_frac_lap_line(p, kw, 255);
        const double rel = std::abs(discrete - oracle) / std::abs(oracle);
        o.require(rel <= 0.01, fmt("bump at s = %.1f: discrete %.6f, adaptive oracle %.6f, relative %.2e", s,
                                   discrete, oracle, rel));
    }
    return o;
}

// Exterior 0 on the collar (-theta, 0], M elsewhere; the limit is the line from 0 to M over [0, L].
Outcome step_limit_criterion() {
    Outcome o;
    const double L = 1, theta = 0.5, M = 1, h = 1.0 / 256;
    const int n = static_cast<int>(std::lround(L / h)) - 1;
    LineProblem<double> p;
    p.spacing = h;
    p.values = Eigen::VectorXd::Zero(n);
    p.exterior.value = [=](long i) {
        const double t = (i + 1) * h;
        return (t <= 0 && t > -theta) ? 0.0 : M;
    };
    p.exterior.far_field = [M](long, int) { return std::optional<double>(M); };
    std::vector<double> dist;
    for (double s : {0.6, 0.8, 0.95}) {
        const auto sol = solve_dirichlet_1d(p, FracParamsd::make(s, 8 * L, Tolerances::scaled(M)));
        double d = 0;
        for (int j = 0; j < n; ++j)
            d = std::max(d, std::abs(sol.values[j] - M * (j + 1) * h / L));
        dist.push_back(d);
    }
    o.require(dist[1] < dist[0] && dist[2] < dist[1],
              fmt("sup distances %.5f, %.5f, %.5f strictly decrease", dist[0], dist[1], dist[2]));
    o.require(dist[2] <= 0.5 * dist[0], fmt("final / initial = %.4f <= 0.5", dist[2] / dist[0]));
    return o;
}

Outcome comparison_criterion() {
    Outcome o;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(-1, 1);
    std::uniform_real_distribution<double> S(0.1, 0.99);
    const double l = 1.0 / 32;
    int bounded = 0, ordered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double s = S(rng);
        const int n = 3 + trial % 60;
        const auto params = FracParamsd::make(s, 1.0 + n * l);
        const int K = params.kernel_nodes(l);
        std::vector<double> lo(static_cast<std::size_t>(n + 2 * K)), hi(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = U(rng);
            hi[i] = lo[i] + 0.5 * (U(rng) + 1);
        }
        const double far_lo = U(rng), far_hi = far_lo + 0.5 * (U(rng) + 1);
        auto make = [&](const std::vector<double>& ext, double far) {
            LineProblem<double> p;
            p.spacing = l;
            p.values = Eigen::VectorXd::Zero(n);
            p.exterior.value = [&ext, K](long i) { return ext[static_cast<std::size_t>(i + K)]; };
            p.exterior.far_field = [far](long, int) { return std::optional<double>(far); };
            return p;
        };
        const auto a = solve_dirichlet_1d(make(lo, far_lo), params);
        const auto b = solve_dirichlet_1d(make(hi, far_hi), params);
        double emin = far_lo, emax = far_lo;
        for (long i = -K; i < n + K; ++i)
            if (i < 0 || i >= n) {
                emin = std::min(emin, lo[static_cast<std::size_t>(i + K)]);
                emax = std::max(emax, lo[static_cast<std::size_t>(i + K)]);
            }
        bounded += a.values.minCoeff() >= emin - 1e-12 && a.values.maxCoeff() <= emax + 1e-12;
        ordered += (b.values - a.values).minCoeff() >= -1e-12;
    }
    o.require(bounded == 100, fmt("1-D solves within exterior bounds: %d / 100", bounded));
    o.require(ordered == 100, fmt("1-D ordered data give ordered solutions: %d / 100", ordered));

    const auto grid = GridFunctiond::covering(disk, 1.0 / 16);
    const auto dirs = DirectionSet::wide_stencil(3);
    const ExteriorDatumd g(datum::CosineAngle<double>{});
    const ExteriorDatumd gh(datum::CosineAngle<double>{1.0, 2, 0.0, 0.25});
    for (double s : {0.6, 0.9}) {
        const auto p = FracParamsd::for_domain(s, disk, Tolerances::scaled(2));
        const auto u = fractional_envelope(disk, g, p, grid, dirs);
        const auto v = fractional_envelope(disk, gh, p, grid, dirs);
        double lo = 1e300, hi = -1e300, gap = 1e300;
        for (int i : grid.interior_indices()) {
            lo = std::min(lo, u.solution[i]);
            hi = std::max(hi, u.solution[i]);
            gap = std::min(gap, v.solution[i] - u.solution[i]);
        }
        const double tol = p.tol.fixed_point;
        o.require(lo >= g.inf() - tol && hi <= g.sup() + tol,
                  fmt("2-D s = %.1f: envelope in [%.4f, %.4f] within datum bounds [%.0f, %.0f]", s, lo, hi, g.inf(),
                      g.sup()));
        o.require(gap >= -tol, fmt("2-D s = %.1f: raised datum gives min(v - u) = %.3g >= 0", s, gap));
    }
    return o;
}

Outcome oracle_criterion() {
    Outcome o;
    const int W = 3;
    const double Cf = 1.0;
    const auto dirs = DirectionSet::wide_stencil(W);
    const auto probes = oracle_probes(disk, 25, 0);
    const int m = disk.boundary_sample_count();
    const ExteriorDatumd y2(datum::ClippedQuadratic<double>{{0, 1}, {0, 0}, 2, 0});
    const ExteriorDatumd cos2(datum::CosineAngle<double>{});
    const std::vector<std::pair<std::string, const ExteriorDatumd*>> data{{"y1^2", &y2}, {"cos 2theta", &cos2}};
    const std::vector<double> hs{1.0 / 16, 1.0 / 32};
    for (const auto& [name, g] : data) {
        std::vector<double> err;
        for (double h : hs) {
            const double floor = Cf * (h + 1.0 / (W * W));
            const auto grid = GridFunctiond::covering(disk, h);
            const auto k = classical_envelope(disk, *g, grid, dirs, Tolerances::scaled(g->sup() - g->inf()));
            const auto check = hull_cross_check(disk, *g, k.solution, probes, m);
            err.push_back(check.max_difference);
            o.require(check.max_difference <= floor,
                      fmt("%s h = 1/%d: max |classical - oracle| = %.5f <= %.5f (25 probes, %d boundary samples)",
                          name.c_str(), int(std::lround(1 / h)), check.max_difference, floor, m));
            if (g == &cos2) {
                const int center = grid.index(grid.nx() / 2, grid.ny() / 2);
                const double c = k.solution[center];
                o.require(grid.node(center).norm() == 0.0 && std::abs(c + 1) <= floor,
                          fmt("cos 2theta h = 1/%d: center value %.6f, |c + 1| <= %.5f", int(std::lround(1 / h)), c,
                              floor));
            }
        }
        const double ratio = err[1] / err[0];
        o.require(ratio >= 0.3 && ratio <= 0.9, fmt("%s refinement ratio %.3f in [0.3, 0.9]", name.c_str(), ratio));
    }
    return o;
}

Outcome interval_criterion() {
    Outcome o;
    const auto interval = Domaind::interval({0, 0}, 1.0);
    const ExteriorDatumd g(datum::SmoothedStep<double>{{1, 0}, 0.2, 0.25, -1.0, 1.5});
    const double h = 1.0 / 32;
    const auto grid = GridFunctiond::covering(interval, h);
    for (double s : {0.3, 0.6, 0.9}) {
        // stopping tolerances well below the comparison bound
        const auto params = FracParamsd::for_domain(s, interval, Tolerances{1e-13, 1e-10, 2000000});
        const auto env = fractional_envelope(interval, g, params, grid, DirectionSet::axis());
        const auto line = LineProblem<double>::along_datum(interval, g, {0, 0}, {h, 0}, g.sup());
        const auto sol = solve_dirichlet_1d(line, params);
        const auto nodes = grid.interior_indices();
        if (static_cast<Eigen::Index>(nodes.size()) != sol.values.size()) {
            o.require(false, "node counts differ");
            continue;
        }
        double d = 0;
        for (std::size_t j = 0; j < nodes.size(); ++j)
            d = std::max(d, std::abs(env.solution[nodes[j]] - sol.values[static_cast<Eigen::Index>(j)]));
        o.require(d <= 1e-8, fmt("s = %.1f: max |envelope - line solve| = %.3g over %zu nodes", s, d, nodes.size()));
    }
    return o;
}

SweepConfig disk_sweep_config(const ExteriorDatumd& g) {
    SweepConfig c(disk, g);
    c.h = 1.0 / 32;
    c.width = 3;
    c.s_values = {0.6, 0.7, 0.8, 0.9, 0.95};
    c.thresholds = c.s_values;
    c.tol = Tolerances::scaled(g.sup() - g.inf());
    c.improvement = 0.5;
    c.floor_constant = 1.0;
    c.seed = 1;
    return c;
}

void sweep_notes(Outcome& o, const SweepResult& r, const SweepConfig& c) {
    for (const auto& row : r.table)
        o.notes.push_back(fmt("     s = %.2f  sup %.6g  mean %.6g  iterations %d", row.s, row.sup_distance,
                              row.mean_distance, row.iterations));
    for (const auto& row : r.gap.rows)
        o.notes.push_back(row.skipped ? fmt("     s0 = %.2f  spread skipped (%s)", row.threshold, row.note.c_str())
                                      : fmt("     s0 = %.2f  spread %.6g over %d orders", row.threshold, row.spread,
                                            row.count));
    const auto& t = r.table;
    bool trend = true;
    for (std::size_t i = 1; i < t.size(); ++i)
        trend = trend && t[i].sup_distance <= t[i - 1].sup_distance + c.trend_slack();
    o.require(trend, fmt("sup distance nonincreasing with slack %.3g", c.trend_slack()));
    o.require(t.back().sup_distance <= 0.5 * t.front().sup_distance,
              fmt("final %.6g <= 0.5 x initial %.6g", t.back().sup_distance, t.front().sup_distance));
    o.require(r.gap.nonincreasing, "half-relaxed spread nonincreasing in s0");
}

struct DiskSweep {
    SweepConfig config;
    SweepResult result;
};

DiskSweep& disk_sweep() {
    static DiskSweep run = [] {
        const ExteriorDatumd g(datum::ClippedQuadratic<double>{{1, 0}, {0, 0}, 2, 0});
        auto c = disk_sweep_config(g);
        auto r = run_convergence_sweep(c);
        return DiskSweep{c, std::move(r)};
    }();
    return run;
}

Outcome sweep_criterion() {
    Outcome o;
    const auto& run = disk_sweep();
    sweep_notes(o, run.result, run.config);
    return o;
}

Outcome barrier_criterion() {
    Outcome o;
    const auto& run = disk_sweep();
    const auto& c = run.config;
    const auto& g = c.g;
    const auto grid = c.grid();
    const auto dirs = DirectionSet::wide_stencil(c.width);
    const double tol = 1e-5 * (g.sup() - g.inf() + 1);

    std::vector<FracParamsd> all;
    for (double s : c.s_values)
        all.push_back(c.params(s));

    const auto upper = boundary_anchored_barriers(disk, g, grid, dirs, 10, 0.2, 0.5);
    o.require(upper.size() == 10, fmt("%zu boundary-anchored upper barriers", upper.size()));

    std::vector<BarrierSpec> lower;
    for (double deg : {90.0, 270.0}) {
        const Point2d x0 = disk.boundary_point(deg * std::numbers::pi / 180);
        lower.push_back(calibrate_lower_barrier(disk, g, grid, dirs, all, x0, 0.3, 0.5, 0.05, 0.5));
        o.notes.push_back(fmt("     lower barrier at %.0f deg: slope %.6g, strip %.6g, epsilon 0.05, eta 0.3", deg,
                              lower.back().slope, lower.back().strip));
    }

    // operator positivity for every swept order
    for (std::size_t k = 0; k < c.s_values.size(); ++k)
        for (const auto& spec : lower) {
            const LowerBarrier b(disk, g, spec);
            const auto op = lower_barrier_operator(b, disk, grid, dirs, all[k]);
            o.require(op.value > 0, fmt("s = %.2f, x0 = (%.0f, %.0f): min discrete operator %.4g > 0", c.s_values[k],
                                        spec.x0.x(), spec.x0.y(), op.value));
        }

    for (std::size_t k = 0; k < c.s_values.size(); ++k) {
        const double s = c.s_values[k];
        if (s != 0.8 && s != 0.9 && s != 0.95)
            continue;
        const auto& u = run.result.envelopes[k];
        double up = -1e300, rad = 1e300;
        for (const auto& spec : upper) {
            const auto r = barrier_upper_check(u, disk, spec, g, all[k], tol);
            up = std::max(up, r.max_violation);
            rad = std::min(rad, r.radius);
        }
        o.require(up <= tol, fmt("s = %.2f: max(u_s - w_s) over 10 segments = %.3g <= %.3g (min radius %.3f)", s, up,
                                 tol, rad));
        for (const auto& spec : lower) {
            const auto r = barrier_lower_check(u, disk, spec, g, all[k], dirs, tol);
            o.require(r.strip_ok(), fmt("s = %.2f, x0 = (%.0f, %.0f): strip margin %.4g < 0", s, spec.x0.x(),
                                        spec.x0.y(), r.strip_margin));
            o.require(r.below_ok(), fmt("s = %.2f, x0 = (%.0f, %.0f): max(lower - u_s) = %.4g <= %.3g", s,
                                        spec.x0.x(), spec.x0.y(), r.max_excess, tol));
        }
    }
    return o;
}

Outcome convexity_criterion() {
    Outcome o;
    const auto& run = disk_sweep();
    const auto& c = run.config;
    const auto grid = c.grid();
    const auto dirs = DirectionSet::wide_stencil(c.width);
    const double tol = 1e-5 * (c.g.sup() - c.g.inf() + 1);
    const auto segments = lattice_segments(disk, grid, dirs, 50, 12345);
    o.require(segments.size() == 50, fmt("%zu seeded lattice segments", segments.size()));
    for (std::size_t k = 0; k < c.s_values.size(); ++k) {
        const auto r = s_convexity_check(run.result.envelopes[k].solution, disk, c.g, c.params(c.s_values[k]),
                                         segments, tol);
        o.require(r.passed(), fmt("s = %.2f: max(u - v) = %.3g <= %.3g", c.s_values[k], r.max_violation, tol));
    }
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fracenv");
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

Outcome determinism_criterion() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "fracenv_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.json";
    std::ofstream(cfg) << R"({
  "domain": {"kind": "disk", "radius": 1},
  "datum": {"type": "clipped_quadratic", "coeffs": [1, 0], "cap": 2},
  "grid": {"h": 0.0625},
  "fractional": {"s": [0.6, 0.8, 0.95]},
  "validate": {"segments": 20},
  "seed": 11
})";
    for (const std::string cmd : {"solve1d", "envelope", "envelope-classical", "validate", "sweep"}) {
        std::vector<std::vector<std::pair<std::string, std::string>>> runs;
        for (int workers : {1, 8}) {
            const fs::path dir = root / (cmd + "_w" + std::to_string(workers));
            const int code = run_cli({cmd, "--config", cfg.string(), "--out", dir.string(), "--workers",
                                      std::to_string(workers)});
            if (code != cli::exit_ok)
                o.require(false, fmt("%s with %d workers exited with %d", cmd.c_str(), workers, code));
            std::vector<std::pair<std::string, std::string>> files;
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().filename() != "timings.json")
                    files.emplace_back(e.path().filename().string(), slurp(e.path()));
            std::sort(files.begin(), files.end());
            runs.push_back(std::move(files));
        }
        bool same = runs[0].size() == runs[1].size() && !runs[0].empty();
        for (std::size_t i = 0; same && i < runs[0].size(); ++i)
            same = runs[0][i] == runs[1][i];
        o.require(same, fmt("%s: %zu files bitwise identical at 1 and 8 workers", cmd.c_str(), runs[0].size()));
    }
    fs::remove_all(root);
    return o;
}

// Not a criterion: the bowl datum has a non-trivial classical envelope, so the
// distance trend there carries information the degenerate datum cannot.
void supplementary_bowl() {
    const auto t0 = std::chrono::steady_clock::now();
    const ExteriorDatumd bowl(datum::ClippedQuadratic<double>{{1, 1}, {0, 0}, 2, 0});
    const auto c = disk_sweep_config(bowl);
    Outcome o;
    try {
        const auto r = run_convergence_sweep(c);
        sweep_notes(o, r, c);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    for (const auto& n : o.notes)
        std::printf("    %s\n", n.c_str());
    std::printf("%s supplementary: disk sweep on the bowl |x|^2 (not counted) (%.1f s)\n",
                o.pass ? "PASS" : "FAIL",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::fflush(stdout);
}

} // namespace

int main() {
    report(1, "normalizing constant", constant_criterion);
    report(2, "1-D operator exactness and bump quadrature", operator_criterion);
    report(3, "1-D step exterior tends to the affine limit", step_limit_criterion);
    report(4, "maximum principle and comparison", comparison_criterion);
    report(5, "classical envelope against the hull oracle", oracle_criterion);
    report(6, "interval envelope equals the line solve", interval_criterion);
    report(7, "s-sweep on the disk with min(x1^2, 2)", sweep_criterion);
    report(8, "barrier sandwich", barrier_criterion);
    report(9, "s-convexity audit on 50 seeded segments", convexity_criterion);
    report(10, "determinism across worker counts", determinism_criterion);
    supplementary_bowl();
    std::printf("%d of 10 criteria failed\n", failures);
    return failures ? 1 : 0;
}
