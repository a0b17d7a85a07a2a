#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fracenv/core/datum.hpp"
#include "fracenv/core/domain.hpp"
#include "fracenv/core/params.hpp"
#include "fracenv/sweep/sweep.hpp"

namespace fracenv::cli {

struct ValidateSpec {
    int segments = 50;
    std::string segment_kind = "lattice"; ///< "lattice" or "random"
    double tol = 0.0;                     ///< 0 for 1e-5 (M - m + 1)
    double s_min = 0.6;
    int upper_count = 10;
    double upper_eta = 0.2;
    double upper_reach = 0.5;
    std::vector<double> lower_angles_deg{90.0, 270.0};
    double lower_eta = 0.3;
    double lower_slope = 0.5;
    double lower_epsilon = 0.05;
    double lower_strip = 0.5;
    bool lower_calibrate = true;
    double boundary_constant = 2.0; ///< C_b
};

struct Config {
    Domaind domain = Domaind::disk({0, 0}, 1.0);
    ExteriorDatumd datum{datum::Constant<double>{0.0}};
    double h = 1.0 / 32;
    double padding = 0.0;
    int width = 3;
    std::vector<double> s_values;
    double radius = 0.0; ///< 0 for eight domain diameters
    int min_kernel_nodes = 2;
    Tolerances tol;
    std::vector<double> thresholds;
    double floor_constant = 1.0;
    double improvement = 0.0;
    int probes = 25;
    ValidateSpec validate;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool write_grids = true;

    nlohmann::ordered_json echo;              ///< the document with every default filled in
    std::vector<std::string> defaults_applied; ///< key paths that took a default

    FracParamsd params(double s) const;
    SweepConfig sweep_config(int workers) const;
    double validate_tol() const;
};

/// Parses and validates a configuration document. In strict mode unknown
/// keys are errors; otherwise they are ignored. Throws ConfigError with a
/// path-qualified message.
Config parse_config(std::string_view document, bool strict = true);

Config load_config(const std::string& path, bool strict = true);

} // namespace fracenv::cli
