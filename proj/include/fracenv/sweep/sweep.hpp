#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracenv/core/datum.hpp"
#include "fracenv/core/domain.hpp"
#include "fracenv/core/grid.hpp"
#include "fracenv/core/params.hpp"
#include "fracenv/envelope/envelope.hpp"

namespace fracenv {

struct SweepConfig {
    SweepConfig(Domaind d, ExteriorDatumd datum) : domain(std::move(d)), g(std::move(datum)) {}

    Domaind domain;
    ExteriorDatumd g;
    double h = 1.0 / 32;
    double padding = 0.0;
    int width = 3;                  ///< stencil width W
    std::vector<double> s_values;   ///< ascending
    double radius = 0.0;            ///< kernel truncation, 0 for eight diameters
    int min_kernel_nodes = 2;
    Tolerances tol;
    std::vector<double> thresholds; ///< s0 values for the spread table
    double floor_constant = 1.0;    ///< C_f in C_f (h + 1/W^2)
    double improvement = 0.0;       ///< when > 0, final distance <= improvement * first distance
    int probes = 25;
    std::uint64_t seed = 0;
    int workers = 1;

    double floor() const { return floor_constant * (h + 1.0 / (double(width) * width)); }
    double trend_slack() const { return 1e-3 * (g.sup() - g.inf()); }
    FracParamsd params(double s) const;
    GridFunctiond grid() const { return GridFunctiond::covering(domain, h, padding); }
};

struct DistanceRow {
    double s = 0.0;
    double sup_distance = 0.0;
    double mean_distance = 0.0;
    int iterations = 0;
};

struct GapRow {
    double threshold = 0.0;
    int count = 0;       ///< s-values at or above the threshold
    double spread = 0.0; ///< sup over nodes of max_s u_s - min_s u_s
    bool skipped = false;
    std::string note;
};

struct GapTable {
    std::vector<GapRow> rows; ///< ascending threshold
    bool nonincreasing = true;
};

struct OracleProbe {
    Point2d x{0, 0};
    double classical = 0.0;
    double oracle = 0.0;
};

struct OracleCheck {
    std::vector<OracleProbe> probes;
    int samples = 0;             ///< boundary samples fed to the oracle
    double max_difference = 0.0;
};

struct SweepResult {
    std::vector<double> s_values;
    std::vector<EnvelopeResult> envelopes; ///< one per s
    EnvelopeResult classical;
    std::vector<DistanceRow> table;
    GapTable gap;
    OracleCheck oracle;
    double floor = 0.0;
    double trend_slack = 0.0;
    bool trend_ok = true;
    bool floor_ok = true;
    bool oracle_ok = true;
    bool improvement_ok = true;
    std::vector<std::string> failures;
    std::vector<std::pair<std::string, double>> timings; ///< seconds per stage

    bool passed() const { return failures.empty(); }
};

/// `count` seeded points with level <= 0.81, i.e. inside the domain scaled by 0.9.
std::vector<Point2d> oracle_probes(const Domaind& domain, int count, std::uint64_t seed);

/// Classical envelope (bilinear u^g) against the hull oracle on `samples`
/// equally spaced boundary points.
OracleCheck hull_cross_check(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& classical,
                             std::span<const Point2d> probes, int samples);

/// Per threshold s0, the sup over interior nodes of the spread of u_s over
/// s >= s0. Thresholds with fewer than `min_count` such s are skipped.
GapTable half_relaxed_gap(std::span<const GridFunctiond> envelopes, std::span<const double> s_values,
                          std::span<const double> thresholds, int min_count = 2);

/// Fractional envelopes for every s, the classical envelope with its hull
/// cross-check, sup and mean distances, and the spread table. Checks are
/// recorded in the result; solver failures throw.
SweepResult run_convergence_sweep(const SweepConfig& config);

/// Fixed-width text rendering of the distance table.
std::string format_table(const SweepResult& r);

} // namespace fracenv
