#include "fracenv/cli/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include "fracenv/envelope/envelope.hpp"
#include "fracenv/errors.hpp"
#include "fracenv/frac1d/line.hpp"
#include "fracenv/sweep/sweep.hpp"
#include "fracenv/validate/validate.hpp"

namespace fracenv::cli {

using nlohmann::ordered_json;

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double secs = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return secs;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string s_tag(double s) { return "s" + format_double(s); }

DirectionSet directions_for(const Config& c) {
    return c.domain.is_interval() ? DirectionSet::axis() : DirectionSet::wide_stencil(c.width);
}

ordered_json point_json(const Point2d& p) { return ordered_json::array({p.x(), p.y()}); }

// Residual summary shared by both envelope commands.
std::vector<Cell> envelope_row(double s, const EnvelopeResult& r) {
    return {s, static_cast<long long>(r.iterations), r.final_update, r.residual.max_abs_min_residual,
            r.residual.most_negative};
}

const std::vector<std::string> envelope_columns{"s", "iterations", "final_update", "max_abs_residual",
                                                "most_negative"};

CommandResult cmd_solve1d(const Config& c, int) {
    CommandResult res;
    auto& out = res.outputs;
    Stopwatch clock;
    Table values{"solve1d.csv", {"s", "x", "value"}, {}};
    Table summary{"solve1d_summary.csv", {"s", "nodes", "residual", "iterations", "direct"}, {}};
    const Point2d step(c.h, 0.0);
    for (double s : c.s_values) {
        auto p = LineProblem<double>::along_datum(c.domain, c.datum, c.domain.center(), step, c.datum.sup());
        const auto sol = solve_dirichlet_1d(p, c.params(s));
        const Point2d base = c.domain.center();
        const double tm = c.domain.clip(base, step).first;
        long first = static_cast<long>(std::floor(tm)) - 1;
        while (!c.domain.contains(base + double(first) * step))
            ++first;
        for (int j = 0; j < sol.values.size(); ++j)
            values.add({s, (base + double(first + j) * step).x(), sol.values[j]});
        summary.add({s, static_cast<long long>(sol.values.size()), sol.residual,
                     static_cast<long long>(sol.iterations), std::string(sol.direct ? "true" : "false")});
        out.timings.emplace_back("solve1d " + s_tag(s), clock.lap());
    }
    out.tables.push_back(std::move(values));
    out.tables.push_back(std::move(summary));
    return res;
}

CommandResult cmd_envelope(const Config& c, int workers) {
    CommandResult res;
    auto& out = res.outputs;
    Stopwatch clock;
    const auto grid = GridFunctiond::covering(c.domain, c.h, c.padding);
    require_resolution(c.domain, grid, 2);
    const auto dirs = directions_for(c);
    Table table{"envelope.csv", envelope_columns, {}};
    Table trace{"envelope_trace.csv", {"s", "sweep", "update"}, {}};
    for (double s : c.s_values) {
        const auto r = fractional_envelope(c.domain, c.datum, c.params(s), grid, dirs, workers);
        table.add(envelope_row(s, r));
        for (std::size_t k = 0; k < r.trace.size(); ++k)
            trace.add({s, static_cast<long long>(k + 1), r.trace[k]});
        if (c.write_grids)
            out.grids.push_back({"envelope_" + s_tag(s) + ".grid", r.solution, s});
        out.timings.emplace_back("envelope " + s_tag(s), clock.lap());
    }
    out.tables.push_back(std::move(table));
    out.tables.push_back(std::move(trace));
    return res;
}

CommandResult cmd_envelope_classical(const Config& c, int workers) {
    if (c.domain.is_interval())
        throw ConfigError("envelope-classical needs a planar domain");
    CommandResult res;
    auto& out = res.outputs;
    Stopwatch clock;
    const auto grid = GridFunctiond::covering(c.domain, c.h, c.padding);
    require_resolution(c.domain, grid, 2);
    const auto r = classical_envelope(c.domain, c.datum, grid, directions_for(c), c.tol, workers);
    out.timings.emplace_back("classical", clock.lap());
    Table table{"classical.csv", {"iterations", "final_update", "max_abs_residual", "most_negative"}, {}};
    table.add({static_cast<long long>(r.iterations), r.final_update, r.residual.max_abs_min_residual,
               r.residual.most_negative});

    const auto probes = oracle_probes(c.domain, c.probes, c.seed);
    const auto check = hull_cross_check(c.domain, c.datum, r.solution, probes, c.domain.boundary_sample_count());
    out.timings.emplace_back("oracle", clock.lap());
    Table oracle{"oracle.csv", {"x", "y", "classical", "oracle", "difference"}, {}};
    for (const auto& p : check.probes)
        oracle.add({p.x.x(), p.x.y(), p.classical, p.oracle, std::abs(p.classical - p.oracle)});
    const double floor = c.floor_constant * (c.h + 1.0 / (double(c.width) * c.width));
    if (!(check.max_difference <= floor))
        res.failures.push_back("classical envelope differs from the hull oracle by " +
                               format_double(check.max_difference) + " > " + format_double(floor));

    if (c.write_grids)
        out.grids.push_back({"classical.grid", r.solution, std::nullopt});
    out.tables.push_back(std::move(table));
    out.tables.push_back(std::move(oracle));
    return res;
}

CommandResult cmd_validate(const Config& c, int workers) {
    if (c.domain.is_interval())
        throw ConfigError("validate needs a planar domain");
    const auto& v = c.validate;
    std::vector<double> orders;
    for (double s : c.s_values)
        if (s >= v.s_min)
            orders.push_back(s);
    if (orders.empty())
        throw ConfigError("validate: no fractional.s value is at least validate.s_min");

    CommandResult res;
    auto& out = res.outputs;
    Stopwatch clock;
    const double tol = c.validate_tol();
    const auto grid = GridFunctiond::covering(c.domain, c.h, c.padding);
    require_resolution(c.domain, grid, 2);
    const auto dirs = directions_for(c);
    std::vector<FracParamsd> params;
    for (double s : orders)
        params.push_back(c.params(s));

    const auto segments = v.segment_kind == "lattice" ? lattice_segments(c.domain, grid, dirs, v.segments, c.seed)
                                                      : random_segments(c.domain, grid, v.segments, c.seed);
    const auto upper = boundary_anchored_barriers(c.domain, c.datum, grid, dirs, v.upper_count, v.upper_eta,
                                                  v.upper_reach);

    ordered_json lower_setup = ordered_json::array();
    std::vector<BarrierSpec> lower;
    for (double deg : v.lower_angles_deg) {
        const Point2d x0 = c.domain.boundary_point(deg * std::numbers::pi / 180.0);
        if (!v.lower_calibrate) {
            lower.push_back(BarrierSpec::lower(x0, v.lower_slope, v.lower_epsilon, v.lower_strip, v.lower_eta));
            continue;
        }
        try {
            lower.push_back(calibrate_lower_barrier(c.domain, c.datum, grid, dirs, params, x0, v.lower_eta,
                                                    v.lower_slope, v.lower_epsilon, v.lower_strip, workers));
        } catch (const ConvergenceError&) {
            throw;
        } catch (const Error& e) {
            res.failures.push_back("lower barrier at " + format_double(deg) + " degrees: " + e.what());
        }
    }
    for (const auto& b : lower)
        lower_setup.push_back({{"x0", point_json(b.x0)},
                               {"slope", b.slope},
                               {"epsilon", b.epsilon},
                               {"strip", b.strip},
                               {"eta", b.eta}});
    out.timings.emplace_back("setup", clock.lap());

    Table conv{"convexity.csv",
               {"s", "segment", "from_x", "from_y", "to_x", "to_y", "nodes", "worst", "worst_t"},
               {}};
    Table up{"barriers_upper.csv",
             {"s", "barrier", "x0_x", "x0_y", "xhat_x", "xhat_y", "theta", "max_violation", "worst_t",
              "affine_distance", "radius"},
             {}};
    Table lo{"barriers_lower.csv",
             {"s", "barrier", "x0_x", "x0_y", "slope", "strip", "strip_margin", "min_operator", "max_excess"},
             {}};
    Table bnd{"bounds.csv",
              {"s", "bound_violations", "boundary_nodes", "max_boundary_deviation", "boundary_threshold",
               "boundary_violations"},
              {}};
    ordered_json per_s = ordered_json::array();

    for (std::size_t k = 0; k < orders.size(); ++k) {
        const double s = orders[k];
        const auto& p = params[k];
        const auto u = fractional_envelope(c.domain, c.datum, p, grid, dirs, workers);
        ordered_json rep;
        rep["s"] = s;
        rep["iterations"] = u.iterations;

        const auto cr = s_convexity_check(u.solution, c.domain, c.datum, p, segments, tol, workers);
        for (const auto& sc : cr.segments)
            conv.add({s, static_cast<long long>(sc.index), sc.segment.from.x(), sc.segment.from.y(),
                      sc.segment.to.x(), sc.segment.to.y(), static_cast<long long>(sc.segment.nodes), sc.worst,
                      sc.worst_t});
        rep["convexity"] = {{"segments", cr.segments.size()},
                            {"max_violation", cr.max_violation},
                            {"worst_segment", cr.worst_segment},
                            {"passed", cr.passed()}};
        if (!cr.passed())
            res.failures.push_back(s_tag(s) + ": s-convexity violation " + format_double(cr.max_violation));

        double up_worst = -std::numeric_limits<double>::infinity();
        int up_failed = 0;
        for (std::size_t b = 0; b < upper.size(); ++b) {
            const auto ur = barrier_upper_check(u, c.domain, upper[b], c.datum, p, tol);
            up.add({s, static_cast<long long>(b), ur.spec.x0.x(), ur.spec.x0.y(), ur.spec.xhat.x(),
                    ur.spec.xhat.y(), ur.spec.theta, ur.max_violation, ur.worst_t, ur.affine_distance, ur.radius});
            up_worst = std::max(up_worst, ur.max_violation);
            if (!ur.passed())
                ++up_failed;
        }
        rep["upper_barriers"] = {{"count", upper.size()},
                                 {"max_violation", upper.empty() ? 0.0 : up_worst},
                                 {"failed", up_failed}};
        if (up_failed)
            res.failures.push_back(s_tag(s) + ": " + std::to_string(up_failed) + " upper barrier(s) violated");

        ordered_json lows = ordered_json::array();
        for (std::size_t b = 0; b < lower.size(); ++b) {
            const auto lr = barrier_lower_check(u, c.domain, lower[b], c.datum, p, dirs, tol, workers);
            lo.add({s, static_cast<long long>(b), lr.spec.x0.x(), lr.spec.x0.y(), lr.spec.slope, lr.spec.strip,
                    lr.strip_margin, lr.min_operator, lr.max_excess});
            lows.push_back({{"strip_ok", lr.strip_ok()}, {"convex_ok", lr.convex_ok()}, {"below_ok", lr.below_ok()}});
            if (!lr.passed())
                res.failures.push_back(s_tag(s) + ": lower barrier " + std::to_string(b) + " failed (strip " +
                                       format_double(lr.strip_margin) + ", operator " +
                                       format_double(lr.min_operator) + ", excess " +
                                       format_double(lr.max_excess) + ")");
        }
        rep["lower_barriers"] = lows;

        const auto br = bounds_and_boundary_check(u, c.datum, c.domain, tol, v.boundary_constant);
        bnd.add({s, static_cast<long long>(br.bound_violations.size()), static_cast<long long>(br.boundary_nodes),
                 br.max_boundary_deviation, br.boundary_threshold,
                 static_cast<long long>(br.boundary_violations.size())});
        rep["bounds"] = {{"passed", br.passed()},
                         {"max_boundary_deviation", br.max_boundary_deviation},
                         {"boundary_threshold", br.boundary_threshold}};
        if (!br.passed())
            res.failures.push_back(s_tag(s) + ": bounds or boundary check failed");
        per_s.push_back(std::move(rep));
        if (c.write_grids)
            out.grids.push_back({"envelope_" + s_tag(s) + ".grid", u.solution, s});
        out.timings.emplace_back("validate " + s_tag(s), clock.lap());
    }

    ordered_json report;
    report["tol"] = tol;
    report["segment_kind"] = v.segment_kind;
    report["lower_barriers"] = lower_setup;
    report["orders"] = per_s;
    report["failures"] = res.failures;
    report["passed"] = res.passed();
    out.reports.emplace_back("validate.json", std::move(report));
    out.tables.push_back(std::move(conv));
    out.tables.push_back(std::move(up));
    out.tables.push_back(std::move(lo));
    out.tables.push_back(std::move(bnd));
    return res;
}

CommandResult cmd_sweep(const Config& c, int workers) {
    if (c.domain.is_interval())
        throw ConfigError("sweep needs a planar domain");
    for (std::size_t i = 0; i < c.s_values.size(); ++i)
        if (c.s_values[i] < 0.6)
            throw ConfigError("fractional.s[" + std::to_string(i) + "] must lie in [0.6, 0.995] for sweep");
    const auto r = run_convergence_sweep(c.sweep_config(workers));

    CommandResult res;
    res.failures = r.failures;
    auto& out = res.outputs;
    Table dist{"distance.csv", {"s", "sup_distance", "mean_distance", "iterations"}, {}};
    for (const auto& row : r.table)
        dist.add({row.s, row.sup_distance, row.mean_distance, static_cast<long long>(row.iterations)});
    Table gap{"gap.csv", {"threshold", "count", "spread", "skipped", "note"}, {}};
    for (const auto& row : r.gap.rows)
        gap.add({row.threshold, static_cast<long long>(row.count), row.spread,
                 std::string(row.skipped ? "true" : "false"), row.note});
    Table oracle{"oracle.csv", {"x", "y", "classical", "oracle", "difference"}, {}};
    for (const auto& p : r.oracle.probes)
        oracle.add({p.x.x(), p.x.y(), p.classical, p.oracle, std::abs(p.classical - p.oracle)});

    ordered_json report;
    report["floor"] = r.floor;
    report["trend_slack"] = r.trend_slack;
    report["oracle_samples"] = r.oracle.samples;
    report["oracle_max_difference"] = r.oracle.max_difference;
    report["checks"] = {{"trend", r.trend_ok},
                        {"floor", r.floor_ok},
                        {"oracle", r.oracle_ok},
                        {"improvement", r.improvement_ok},
                        {"gap_nonincreasing", r.gap.nonincreasing}};
    report["failures"] = r.failures;
    report["passed"] = r.passed();
    out.reports.emplace_back("sweep.json", std::move(report));

    if (c.write_grids) {
        for (std::size_t i = 0; i < r.s_values.size(); ++i)
            out.grids.push_back({"envelope_" + s_tag(r.s_values[i]) + ".grid", r.envelopes[i].solution,
                                 r.s_values[i]});
        out.grids.push_back({"classical.grid", r.classical.solution, std::nullopt});
    }
    out.tables.push_back(std::move(dist));
    out.tables.push_back(std::move(gap));
    out.tables.push_back(std::move(oracle));
    out.timings = r.timings;
    return res;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"solve1d", "envelope", "envelope-classical", "validate", "sweep"};
    return names;
}

CommandResult run_command(const std::string& name, const Config& config, int workers) {
    if (workers < 1)
        throw ConfigError("workers must be at least 1");
    if (config.s_values.empty() && name != "envelope-classical")
        throw ConfigError("fractional.s must not be empty");
    CommandResult res;
    if (name == "solve1d")
        res = cmd_solve1d(config, workers);
    else if (name == "envelope")
        res = cmd_envelope(config, workers);
    else if (name == "envelope-classical")
        res = cmd_envelope_classical(config, workers);
    else if (name == "validate")
        res = cmd_validate(config, workers);
    else if (name == "sweep")
        res = cmd_sweep(config, workers);
    else
        throw ConfigError("unknown command " + name);
    res.outputs.command = name;
    return res;
}

int main(int argc, char** argv) {
    CLI::App app{"Fractional and classical convex envelopes on planar domains"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    int workers = 1;
    std::uint64_t seed = 0;
    bool strict = true;
    app.add_option("--config", config_path, "configuration document (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory, overrides output.directory");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "random seed, overrides the config seed");
    app.add_flag("--strict,!--no-strict", strict, "reject unknown configuration keys (default on)");
    for (const auto& name : command_names())
        app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        Config config = load_config(config_path, strict);
        if (*seed_opt) {
            config.seed = seed;
            config.echo["seed"] = seed;
        }
        const std::string dir = out_dir.empty() ? config.out_dir : out_dir;
        CommandResult res = run_command(command, config, workers);
        res.outputs.run = {{"workers", workers}, {"directory", dir}};
        write_outputs(res.outputs, config.echo, config.defaults_applied, dir);
        if (!res.passed()) {
            for (const auto& f : res.failures)
                std::cerr << "check failed: " << f << '\n';
            return exit_check;
        }
        std::cout << command << ": outputs written to " << dir << '\n';
        return exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return exit_convergence;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return exit_io;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
}

} // namespace fracenv::cli
