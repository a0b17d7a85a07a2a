#include "fracenv/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "fracenv/errors.hpp"

namespace fracenv::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// One JSON object of the document. Reads typed fields, fills defaults, and
// mirrors every resolved value into `echo`.
class Section {
public:
    Section(const json* j, std::string path, bool strict, std::vector<std::string>& defaults, ordered_json& echo)
        : j_(j), path_(std::move(path)), strict_(strict), defaults_(defaults), echo_(echo) {
        if (j_ && !j_->is_object())
            throw ConfigError(label() + " must be an object");
        echo_ = ordered_json::object();
    }

    bool has(const char* key) const { return j_ && j_->contains(key); }

    void allow(std::initializer_list<const char*> keys) const {
        if (!j_ || !strict_)
            return;
        for (const auto& item : j_->items()) {
            if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; }) == keys.end())
                throw ConfigError("unknown key " + join(path_, item.key()));
        }
    }

    double number(const char* key, std::optional<double> def) {
        if (const json* v = get(key, def.has_value())) {
            if (!v->is_number())
                throw ConfigError(join(path_, key) + " must be a number");
            const double x = v->get<double>();
            if (!std::isfinite(x))
                throw ConfigError(join(path_, key) + " must be finite");
            echo_[key] = x;
            return x;
        }
        echo_[key] = *def;
        return *def;
    }

    double positive(const char* key, std::optional<double> def) {
        const double x = number(key, def);
        if (!(x > 0))
            throw ConfigError(join(path_, key) + " must be positive");
        return x;
    }

    long long integer(const char* key, std::optional<long long> def) {
        if (const json* v = get(key, def.has_value())) {
            if (!v->is_number_integer())
                throw ConfigError(join(path_, key) + " must be an integer");
            const auto x = v->get<long long>();
            echo_[key] = x;
            return x;
        }
        echo_[key] = *def;
        return *def;
    }

    std::uint64_t unsigned_integer(const char* key, std::optional<std::uint64_t> def) {
        if (const json* v = get(key, def.has_value())) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
                throw ConfigError(join(path_, key) + " must be a nonnegative integer");
            const auto x = v->get<std::uint64_t>();
            echo_[key] = x;
            return x;
        }
        echo_[key] = *def;
        return *def;
    }

    bool boolean(const char* key, std::optional<bool> def) {
        if (const json* v = get(key, def.has_value())) {
            if (!v->is_boolean())
                throw ConfigError(join(path_, key) + " must be true or false");
            echo_[key] = v->get<bool>();
            return v->get<bool>();
        }
        echo_[key] = *def;
        return *def;
    }

    std::string string(const char* key, std::optional<std::string> def) {
        if (const json* v = get(key, def.has_value())) {
            if (!v->is_string())
                throw ConfigError(join(path_, key) + " must be a string");
            echo_[key] = v->get<std::string>();
            return v->get<std::string>();
        }
        echo_[key] = *def;
        return *def;
    }

    std::vector<double> numbers(const char* key, std::optional<std::vector<double>> def) {
        std::vector<double> out;
        if (const json* v = get(key, def.has_value())) {
            if (!v->is_array())
                throw ConfigError(join(path_, key) + " must be an array of numbers");
            for (std::size_t i = 0; i < v->size(); ++i) {
                const json& e = (*v)[i];
                if (!e.is_number() || !std::isfinite(e.get<double>()))
                    throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "] must be a finite number");
                out.push_back(e.get<double>());
            }
        } else {
            out = *def;
        }
        echo_[key] = out;
        return out;
    }

    Point2d point(const char* key, std::optional<Point2d> def) {
        std::optional<std::vector<double>> d;
        if (def)
            d = std::vector<double>{def->x(), def->y()};
        const auto v = numbers(key, d);
        if (v.size() != 2)
            throw ConfigError(join(path_, key) + " must have two entries");
        return Point2d(v[0], v[1]);
    }

    Section child(const char* key, bool required) {
        const json* c = get(key, !required);
        return Section(c, join(path_, key), strict_, defaults_, echo_[key]);
    }

    std::string path(const char* key) const { return join(path_, key); }

    /// Null when the key is absent and a default exists.
    const json* get(const char* key, bool has_default) {
        if (j_ && j_->contains(key) && !(*j_)[key].is_null())
            return &(*j_)[key];
        if (!has_default)
            throw ConfigError("missing required key " + join(path_, key));
        if (j_ || path_.empty())
            defaults_.push_back(join(path_, key));
        return nullptr;
    }

private:
    std::string label() const { return path_.empty() ? "document" : path_; }

    const json* j_;
    std::string path_;
    bool strict_;
    std::vector<std::string>& defaults_;
    ordered_json& echo_;
};

Domaind parse_domain(Section sec) {
    const std::string kind = sec.string("kind", std::nullopt);
    const Point2d center = sec.point("center", Point2d(0, 0));
    if (kind == "disk") {
        sec.allow({"kind", "center", "radius", "boundary_samples"});
        const double r = sec.positive("radius", 1.0);
        const auto m = sec.integer("boundary_samples", 256);
        if (m < 3)
            throw ConfigError(sec.path("boundary_samples") + " must be at least 3");
        return Domaind::disk(center, r, static_cast<int>(m));
    }
    if (kind == "ellipse") {
        sec.allow({"kind", "center", "semi_axes", "boundary_samples"});
        const Point2d ab = sec.point("semi_axes", std::nullopt);
        if (!(ab.x() > 0 && ab.y() > 0))
            throw ConfigError(sec.path("semi_axes") + " must be positive");
        const auto m = sec.integer("boundary_samples", 256);
        if (m < 3)
            throw ConfigError(sec.path("boundary_samples") + " must be at least 3");
        return Domaind::ellipse(center, ab.x(), ab.y(), static_cast<int>(m));
    }
    if (kind == "interval") {
        sec.allow({"kind", "center", "half_length"});
        return Domaind::interval(center, sec.positive("half_length", 0.5));
    }
    throw ConfigError(sec.path("kind") + " must be one of disk, ellipse, interval");
}

ExteriorDatumd parse_datum(Section sec) {
    const std::string type = sec.string("type", std::nullopt);
    ExteriorDatumd::Expression e = datum::Constant<double>{};
    if (type == "constant") {
        sec.allow({"type", "value", "bounds"});
        e = datum::Constant<double>{sec.number("value", std::nullopt)};
    } else if (type == "clipped_quadratic") {
        sec.allow({"type", "coeffs", "center", "cap", "offset", "bounds"});
        datum::ClippedQuadratic<double> q;
        q.coeffs = sec.point("coeffs", q.coeffs);
        q.center = sec.point("center", q.center);
        q.cap = sec.number("cap", q.cap);
        q.offset = sec.number("offset", q.offset);
        if (q.coeffs.x() < 0 || q.coeffs.y() < 0)
            throw ConfigError(sec.path("coeffs") + " must be nonnegative");
        e = q;
    } else if (type == "cosine_angle") {
        sec.allow({"type", "amplitude", "frequency", "phase", "offset", "center", "bounds"});
        datum::CosineAngle<double> c;
        c.amplitude = sec.number("amplitude", c.amplitude);
        c.frequency = static_cast<int>(sec.integer("frequency", c.frequency));
        c.phase = sec.number("phase", c.phase);
        c.offset = sec.number("offset", c.offset);
        c.center = sec.point("center", c.center);
        e = c;
    } else if (type == "smoothed_step") {
        sec.allow({"type", "axis", "shift", "width", "low", "high", "bounds"});
        datum::SmoothedStep<double> st;
        st.axis = sec.point("axis", st.axis);
        st.shift = sec.number("shift", st.shift);
        st.width = sec.positive("width", st.width);
        st.low = sec.number("low", st.low);
        st.high = sec.number("high", st.high);
        e = st;
    } else if (type == "clamped_affine") {
        sec.allow({"type", "slope", "intercept", "low", "high", "bounds"});
        datum::ClampedAffine<double> a;
        a.slope = sec.point("slope", a.slope);
        a.intercept = sec.number("intercept", a.intercept);
        a.low = sec.number("low", a.low);
        a.high = sec.number("high", a.high);
        if (!(a.low <= a.high))
            throw ConfigError(sec.path("low") + " must not exceed high");
        e = a;
    } else {
        throw ConfigError(sec.path("type") +
                          " must be one of constant, clipped_quadratic, cosine_angle, smoothed_step, clamped_affine");
    }
    const ExteriorDatumd natural(e);
    const Point2d b = sec.point("bounds", Point2d(natural.inf(), natural.sup()));
    if (!(b.x() <= b.y()))
        throw ConfigError(sec.path("bounds") + " must satisfy m <= M");
    return ExteriorDatumd(e, b.x(), b.y());
}

} // namespace

FracParamsd Config::params(double s) const {
    auto p = radius > 0 ? FracParamsd::make(s, radius, tol) : FracParamsd::for_domain(s, domain, tol);
    p.min_kernel_nodes = min_kernel_nodes;
    return p;
}

SweepConfig Config::sweep_config(int workers) const {
    SweepConfig c(domain, datum);
    c.h = h;
    c.padding = padding;
    c.width = width;
    c.s_values = s_values;
    c.radius = radius;
    c.min_kernel_nodes = min_kernel_nodes;
    c.tol = tol;
    c.thresholds = thresholds;
    c.floor_constant = floor_constant;
    c.improvement = improvement;
    c.probes = probes;
    c.seed = seed;
    c.workers = workers;
    return c;
}

double Config::validate_tol() const {
    return validate.tol > 0 ? validate.tol : 1e-5 * (datum.sup() - datum.inf() + 1);
}

Config parse_config(std::string_view document, bool strict) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    Config c;
    Section root(&doc, "", strict, c.defaults_applied, c.echo);
    root.allow({"domain", "datum", "grid", "directions", "fractional", "sweep", "validate", "seed", "output"});

    c.domain = parse_domain(root.child("domain", true));
    c.datum = parse_datum(root.child("datum", true));
    const double range = c.datum.sup() - c.datum.inf();

    {
        Section g = root.child("grid", false);
        g.allow({"h", "padding"});
        c.h = g.positive("h", 1.0 / 32);
        c.padding = g.number("padding", 0.0);
        if (c.padding < 0)
            throw ConfigError("grid.padding must be nonnegative");
    }
    {
        Section d = root.child("directions", false);
        d.allow({"width"});
        const auto w = d.integer("width", 3);
        if (w < 1)
            throw ConfigError("directions.width must be at least 1");
        c.width = static_cast<int>(w);
    }
    {
        Section f = root.child("fractional", true);
        f.allow({"s", "radius", "min_kernel_nodes", "tol_fp", "tol_res", "max_iterations"});
        c.s_values = f.numbers("s", std::nullopt);
        if (c.s_values.empty())
            throw ConfigError("fractional.s must not be empty");
        for (std::size_t i = 0; i < c.s_values.size(); ++i)
            if (!(c.s_values[i] >= 0.1 && c.s_values[i] <= 0.995))
                throw ConfigError("fractional.s[" + std::to_string(i) + "] must lie in [0.1, 0.995]");
        for (std::size_t i = 1; i < c.s_values.size(); ++i)
            if (!(c.s_values[i] > c.s_values[i - 1]))
                throw ConfigError("fractional.s must be ascending");
        c.radius = f.positive("radius", 8 * c.domain.diameter());
        if (!(c.radius > c.domain.diameter()))
            throw ConfigError("fractional.radius must exceed the domain diameter");
        const auto k = f.integer("min_kernel_nodes", 2);
        if (k < 2)
            throw ConfigError("fractional.min_kernel_nodes must be at least 2");
        c.min_kernel_nodes = static_cast<int>(k);
        const Tolerances scaled = Tolerances::scaled(range);
        c.tol.fixed_point = f.positive("tol_fp", scaled.fixed_point);
        c.tol.residual = f.positive("tol_res", scaled.residual);
        const auto it = f.integer("max_iterations", scaled.max_iterations);
        if (it < 1 || it > 1'000'000'000)
            throw ConfigError("fractional.max_iterations must lie in [1, 1e9]");
        c.tol.max_iterations = static_cast<int>(it);
    }
    {
        Section s = root.child("sweep", false);
        s.allow({"thresholds", "floor_constant", "improvement", "probes"});
        c.thresholds = s.numbers("thresholds", c.s_values);
        c.floor_constant = s.positive("floor_constant", 1.0);
        c.improvement = s.number("improvement", 0.0);
        if (c.improvement < 0)
            throw ConfigError("sweep.improvement must be nonnegative");
        const auto p = s.integer("probes", 25);
        if (p < 25)
            throw ConfigError("sweep.probes must be at least 25");
        c.probes = static_cast<int>(p);
    }
    {
        Section v = root.child("validate", false);
        v.allow({"segments", "segment_kind", "tol", "s_min", "upper", "lower", "boundary_constant"});
        auto& vs = c.validate;
        const auto n = v.integer("segments", vs.segments);
        if (n < 0)
            throw ConfigError("validate.segments must be nonnegative");
        vs.segments = static_cast<int>(n);
        vs.segment_kind = v.string("segment_kind", vs.segment_kind);
        if (vs.segment_kind != "lattice" && vs.segment_kind != "random")
            throw ConfigError("validate.segment_kind must be lattice or random");
        vs.tol = v.positive("tol", 1e-5 * (range + 1));
        vs.s_min = v.number("s_min", vs.s_min);
        vs.boundary_constant = v.positive("boundary_constant", vs.boundary_constant);
        {
            Section u = v.child("upper", false);
            u.allow({"count", "eta", "reach"});
            const auto cnt = u.integer("count", vs.upper_count);
            if (cnt < 0)
                throw ConfigError("validate.upper.count must be nonnegative");
            vs.upper_count = static_cast<int>(cnt);
            vs.upper_eta = u.positive("eta", vs.upper_eta);
            vs.upper_reach = u.positive("reach", vs.upper_reach);
        }
        {
            Section l = v.child("lower", false);
            l.allow({"angles_deg", "eta", "slope", "epsilon", "strip", "calibrate"});
            vs.lower_angles_deg = l.numbers("angles_deg", vs.lower_angles_deg);
            vs.lower_eta = l.positive("eta", vs.lower_eta);
            vs.lower_slope = l.positive("slope", vs.lower_slope);
            vs.lower_epsilon = l.number("epsilon", vs.lower_epsilon);
            if (vs.lower_epsilon < 0)
                throw ConfigError("validate.lower.epsilon must be nonnegative");
            vs.lower_strip = l.positive("strip", vs.lower_strip);
            vs.lower_calibrate = l.boolean("calibrate", vs.lower_calibrate);
        }
    }
    c.seed = root.unsigned_integer("seed", 0);
    {
        Section o = root.child("output", false);
        o.allow({"directory", "grids"});
        c.out_dir = o.string("directory", "out");
        c.write_grids = o.boolean("grids", true);
    }

    const auto audit = c.datum.audit(c.domain, c.radius, 10000, c.seed);
    if (!audit.consistent)
        throw ConfigError("datum.bounds: declared bounds [" + std::to_string(c.datum.inf()) + ", " +
                          std::to_string(c.datum.sup()) + "] disagree with sampled range [" +
                          std::to_string(audit.sampled_min) + ", " + std::to_string(audit.sampled_max) + "]");
    return c;
}

Config load_config(const std::string& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), strict);
}

} // namespace fracenv::cli
