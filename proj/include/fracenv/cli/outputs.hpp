#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracenv/core/grid.hpp"

namespace fracenv::cli {

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double v);
/// Fixed 17 significant digits, independent of the C locale.
std::string format_double17(double v);

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::string name; ///< file name, e.g. "distance.csv"
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    std::string render() const;
};

struct GridDump {
    std::string name; ///< file name
    GridFunctiond grid;
    std::optional<double> s;
};

/// Header lines "nx", "ny", "origin", "h", "s" (value or "none"), then
/// row-major values, one per line, 17 significant digits.
std::string render_grid(const GridFunctiond& grid, std::optional<double> s);

struct ParsedGrid {
    GridFunctiond grid; ///< values only; the mask is empty
    std::optional<double> s;
};

ParsedGrid parse_grid(const std::string& text);
ParsedGrid read_grid(const std::filesystem::path& path);

struct OutputSet {
    std::string command;
    std::vector<GridDump> grids;
    std::vector<Table> tables;
    std::vector<std::pair<std::string, nlohmann::ordered_json>> reports; ///< file name, document
    std::vector<std::pair<std::string, double>> timings;               ///< stage, seconds
    nlohmann::ordered_json run;                                        ///< run facts that vary (workers)
};

/// Writes every grid, table and report into `dir`, then manifest.json, and
/// timings.json when there are timings. Each file goes through a temporary
/// name and a rename. On failure every file written by this call is removed
/// and IoError is thrown. Returns the manifest.
nlohmann::ordered_json write_outputs(const OutputSet& out, const nlohmann::ordered_json& config_echo,
                                     const std::vector<std::string>& defaults_applied,
                                     const std::filesystem::path& dir);

} // namespace fracenv::cli
