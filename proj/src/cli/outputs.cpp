#include "fracenv/cli/outputs.hpp"

#include <Eigen/Core>

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fracenv/errors.hpp"

namespace fracenv::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string format_double17(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw InvalidArgument("table " + name + ": row width differs from header");
    rows.push_back(std::move(row));
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c))
        return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c))
        return std::to_string(*i);
    return csv_field(std::get<std::string>(c));
}

double parse_number(std::string_view s) {
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw IoError("grid dump: bad number '" + std::string(s) + "'");
    return v;
}

} // namespace

std::string Table::render() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i)
        out += (i ? "," : "") + csv_field(columns[i]);
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + render_cell(row[i]);
        out += '\n';
    }
    return out;
}

std::string render_grid(const GridFunctiond& grid, std::optional<double> s) {
    std::string out;
    out.reserve(static_cast<std::size_t>(grid.size()) * 26 + 128);
    out += "nx " + std::to_string(grid.nx()) + '\n';
    out += "ny " + std::to_string(grid.ny()) + '\n';
    out += "origin " + format_double17(grid.origin().x()) + ' ' + format_double17(grid.origin().y()) + '\n';
    out += "h " + format_double17(grid.spacing()) + '\n';
    out += "s " + (s ? format_double17(*s) : std::string("none")) + '\n';
    for (int i = 0; i < grid.size(); ++i) {
        out += format_double17(grid[i]);
        out += '\n';
    }
    return out;
}

ParsedGrid parse_grid(const std::string& text) {
    std::istringstream in(text);
    std::string key;
    auto expect = [&](const char* k) {
        if (!(in >> key) || key != k)
            throw IoError(std::string("grid dump: expected header field '") + k + "'");
    };
    auto word = [&] {
        std::string w;
        if (!(in >> w))
            throw IoError("grid dump: truncated");
        return w;
    };
    expect("nx");
    const int nx = static_cast<int>(parse_number(word()));
    expect("ny");
    const int ny = static_cast<int>(parse_number(word()));
    expect("origin");
    const double ox = parse_number(word());
    const double oy = parse_number(word());
    expect("h");
    const double h = parse_number(word());
    expect("s");
    const std::string sw = word();
    ParsedGrid out{GridFunctiond(Point2d(ox, oy), h, nx, ny), std::nullopt};
    if (sw != "none")
        out.s = parse_number(sw);
    for (int i = 0; i < out.grid.size(); ++i)
        out.grid[i] = parse_number(word());
    std::string extra;
    if (in >> extra)
        throw IoError("grid dump: trailing data");
    return out;
}

ParsedGrid read_grid(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid(ss.str());
}

namespace {

// Writes files through temporaries; removes everything on destruction
// unless committed.
class Transaction {
public:
    explicit Transaction(fs::path dir) : dir_(std::move(dir)) {}
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;

    ~Transaction() {
        if (committed_)
            return;
        std::error_code ec;
        for (const auto& p : written_)
            fs::remove(p, ec);
        fs::remove(tmp_, ec);
    }

    std::uintmax_t write(const std::string& name, const std::string& content) {
        const fs::path target = dir_ / name;
        tmp_ = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp_, std::ios::binary | std::ios::trunc);
            if (!out)
                throw IoError("cannot write " + tmp_.string());
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.flush();
            if (!out)
                throw IoError("write failed for " + tmp_.string());
        }
        std::error_code ec;
        fs::rename(tmp_, target, ec);
        if (ec)
            throw IoError("cannot rename " + tmp_.string() + ": " + ec.message());
        tmp_.clear();
        written_.push_back(target);
        return content.size();
    }

    void commit() { committed_ = true; }

private:
    fs::path dir_;
    fs::path tmp_;
    std::vector<fs::path> written_;
    bool committed_ = false;
};

} // namespace

ordered_json write_outputs(const OutputSet& out, const ordered_json& config_echo,
                           const std::vector<std::string>& defaults_applied, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string());

    Transaction tx(dir);
    ordered_json files = ordered_json::array();
    auto record = [&](const std::string& name, const std::string& kind, std::uintmax_t bytes) {
        files.push_back({{"name", name}, {"kind", kind}, {"bytes", bytes}});
    };
    for (const auto& g : out.grids)
        record(g.name, "grid", tx.write(g.name, render_grid(g.grid, g.s)));
    for (const auto& t : out.tables)
        record(t.name, "table", tx.write(t.name, t.render()));
    for (const auto& [name, doc] : out.reports)
        record(name, "report", tx.write(name, doc.dump(2) + "\n"));

    const bool has_timings = !out.timings.empty();
    if (has_timings) {
        ordered_json t;
        t["run"] = out.run;
        ordered_json stages = ordered_json::array();
        for (const auto& [stage, secs] : out.timings)
            stages.push_back({{"stage", stage}, {"seconds", secs}});
        t["stages"] = stages;
        tx.write("timings.json", t.dump(2) + "\n");
    }

    ordered_json manifest;
    manifest["tool"] = "fracenv";
    manifest["version"] = "0.1.0";
    manifest["command"] = out.command;
    manifest["versions"] = {
        {"fracenv", "0.1.0"},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", __VERSION__},
    };
    manifest["config"] = config_echo;
    manifest["defaults_applied"] = defaults_applied;
    manifest["files"] = files;
    manifest["timings"] = has_timings ? ordered_json("timings.json") : ordered_json(nullptr);
    tx.write("manifest.json", manifest.dump(2) + "\n");
    tx.commit();
    return manifest;
}

} // namespace fracenv::cli
