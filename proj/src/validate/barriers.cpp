#include "fracenv/validate/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "fracenv/errors.hpp"
#include "fracenv/frac1d/line.hpp"

namespace fracenv {

namespace {

double cross(const Point2d& a, const Point2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Smallest integer vector parallel to z (same orientation), if one exists
// with entries up to `limit`.
std::optional<Point2d> lattice_vector(const Point2d& z, int limit = 16) {
    for (int p = -limit; p <= limit; ++p)
        for (int q = -limit; q <= limit; ++q) {
            if (std::gcd(p, q) != 1)
                continue;
            const Point2d v(p, q);
            if (std::abs(cross(v.normalized(), z)) < 1e-10 && v.dot(z) > 0)
                return v;
        }
    return std::nullopt;
}

bool on_lattice(const GridFunctiond& grid, const Point2d& x) {
    const double fx = (x.x() - grid.origin().x()) / grid.spacing();
    const double fy = (x.y() - grid.origin().y()) / grid.spacing();
    return std::abs(fx - std::round(fx)) < 1e-9 && std::abs(fy - std::round(fy)) < 1e-9;
}

} // namespace

BarrierSpec BarrierSpec::upper(const Point2d& x0, const Point2d& xhat, double theta, double eta, double cap) {
    BarrierSpec b;
    b.kind = BarrierKind::Upper;
    b.x0 = x0;
    b.xhat = xhat;
    b.theta = theta;
    b.eta = eta;
    b.cap = cap;
    return b;
}

BarrierSpec BarrierSpec::lower(const Point2d& x0, double slope, double epsilon, double strip, double eta) {
    BarrierSpec b;
    b.kind = BarrierKind::Lower;
    b.x0 = x0;
    b.slope = slope;
    b.epsilon = epsilon;
    b.strip = strip;
    b.eta = eta;
    return b;
}

void BarrierSpec::check(const Domaind& domain) const {
    if (std::abs(domain.level(x0) - 1.0) > 1e-9)
        throw InvalidArgument("barrier: x0 must lie on the boundary");
    if (!(eta > 0))
        throw InvalidArgument("barrier: eta must be positive");
    if (kind == BarrierKind::Upper) {
        if (!domain.contains(xhat))
            throw InvalidArgument("upper barrier: xhat must be interior");
        if (!(theta > 0))
            throw InvalidArgument("upper barrier: collar theta must be positive");
    } else {
        if (!(slope > 0) || !(strip > 0) || epsilon < 0)
            throw InvalidArgument("lower barrier: need slope > 0, strip > 0, epsilon >= 0");
    }
}

double calibrate_collar(const Domaind& domain, const ExteriorDatumd& g, const Point2d& x0, const Point2d& xhat,
                        double eta, double theta_max) {
    (void)domain;
    const Point2d z = (xhat - x0).normalized();
    const double level = g(x0) + eta / 3.0;
    constexpr int steps = 4096;
    const double dt = theta_max / steps;
    for (int k = 1; k <= steps; ++k)
        if (g(x0 - double(k) * dt * z) > level)
            return double(std::max(k - 1, 1)) * dt;
    return theta_max;
}

BarrierSpec lattice_upper_barrier(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                                  int node, const LatticeDirection& dir, double eta, double theta_max) {
    if (!grid.interior(node))
        throw InvalidArgument("lattice_upper_barrier: node must be interior");
    const Point2d xhat = grid.node(node);
    const Point2d unit = dir.unit();
    const auto [tm, tp] = domain.clip(xhat, unit);
    (void)tp;
    const Point2d x0 = xhat + tm * unit;
    const double theta = calibrate_collar(domain, g, x0, xhat, eta, theta_max);
    return BarrierSpec::upper(x0, xhat, theta, eta, g.sup());
}

std::vector<BarrierSpec> boundary_anchored_barriers(const Domaind& domain, const ExteriorDatumd& g,
                                                    const GridFunctiond& grid, const DirectionSet& dirs, int count,
                                                    double eta, double reach) {
    std::vector<BarrierSpec> out;
    for (int k = 0; k < count; ++k) {
        const double phi = 2 * std::numbers::pi * (k + 0.5) / count;
        const Point2d b = domain.boundary_point(phi);
        const Point2d inward = -domain.outward_normal(b);
        int best = 0;
        double best_dot = -2;
        for (int d = 0; d < dirs.size(); ++d) {
            const double c = std::abs(dirs[d].unit().dot(inward));
            if (c > best_dot) {
                best_dot = c;
                best = d;
            }
        }
        LatticeDirection dir = dirs[best];
        if (dir.unit().dot(inward) < 0)
            dir = {-dir.p, -dir.q};
        const Point2d q = b + reach * dir.unit();
        const long ix = std::lround((q.x() - grid.origin().x()) / grid.spacing());
        const long iy = std::lround((q.y() - grid.origin().y()) / grid.spacing());
        if (!grid.interior(static_cast<int>(ix), static_cast<int>(iy)))
            throw GeometryError("boundary_anchored_barriers: reach leaves the domain");
        const int node = grid.index(static_cast<int>(ix), static_cast<int>(iy));
        out.push_back(lattice_upper_barrier(domain, g, grid, node, dir, eta, domain.diameter()));
    }
    return out;
}

double upper_barrier_limit(const BarrierSpec& spec, double gx0, double t) {
    const double L = (spec.xhat - spec.x0).norm();
    const double base = gx0 + spec.eta / 3.0;
    return base + t * (spec.cap - base) / L;
}

UpperBarrierReport barrier_upper_check(const EnvelopeResult& u_s, const Domaind& domain, const BarrierSpec& spec,
                                       const ExteriorDatumd& g, const FracParamsd& params, double tol) {
    if (spec.kind != BarrierKind::Upper)
        throw InvalidArgument("barrier_upper_check: spec is not an upper barrier");
    spec.check(domain);
    const GridFunctiond& u = u_s.solution;
    const double L = (spec.xhat - spec.x0).norm();
    const Point2d z = (spec.xhat - spec.x0) / L;

    double ell = 0.0;
    if (auto v = lattice_vector(z); v && on_lattice(u, spec.xhat))
        ell = u.spacing() * v->norm();
    else
        ell = L / std::ceil(L / u.spacing());

    // samples at t = L - k ell, k >= 1, t > 0
    int n = 0;
    while (L - double(n + 1) * ell > 1e-12 * L)
        ++n;
    if (n < 1)
        throw GeometryError("barrier_upper_check: chord shorter than one lattice step");
    auto t_of = [L, ell, n](long i) { return L - double(n - i) * ell; };

    const double gx0 = g(spec.x0);
    const double collar = gx0 + spec.eta / 3.0;
    LineProblem<double> p;
    p.spacing = ell;
    p.values = Eigen::VectorXd::Zero(n);
    p.exterior.value = [=](long i) {
        const double t = t_of(i);
        return (t <= 0 && t > -spec.theta) ? collar : spec.cap;
    };
    p.exterior.far_field = [cap = spec.cap](long, int) { return std::optional<double>(cap); };
    const auto w = solve_dirichlet_1d(p, params);

    UpperBarrierReport rep;
    rep.spec = spec;
    rep.s = params.s;
    rep.nodes = n;
    rep.tol = tol;
    rep.t.resize(n);
    rep.barrier = w.values;
    rep.envelope.resize(n);
    rep.max_violation = -std::numeric_limits<double>::infinity();
    bool inside = true;
    for (int j = 0; j < n; ++j) {
        const double t = t_of(j);
        rep.t[j] = t;
        rep.envelope[j] = u.sample(spec.x0 + t * z, domain, g);
        const double d = rep.envelope[j] - rep.barrier[j];
        if (d > rep.max_violation) {
            rep.max_violation = d;
            rep.worst_t = t;
        }
        rep.affine_distance = std::max(rep.affine_distance, std::abs(rep.barrier[j] - upper_barrier_limit(spec, gx0, t)));
        if (inside && rep.envelope[j] <= gx0 + spec.eta)
            rep.radius = t;
        else
            inside = false;
    }
    return rep;
}

LowerBarrier::LowerBarrier(const Domaind& domain, const ExteriorDatumd& g, const BarrierSpec& spec)
    : domain_(domain), spec_(spec), gx0_(g(spec.x0)), floor_(g.inf()),
      inward_(-domain.outward_normal(spec.x0)) {
    if (spec.kind != BarrierKind::Lower)
        throw InvalidArgument("LowerBarrier: spec is not a lower barrier");
    spec.check(domain);
}

Point2d LowerBarrier::normalized(const Point2d& x) const {
    const Point2d d = x - spec_.x0;
    return Point2d(d.dot(inward_), cross(inward_, d));
}

double LowerBarrier::smooth(const Point2d& x) const {
    const Point2d y = normalized(x);
    return gx0_ - spec_.eta / 2.0 - spec_.slope * y.x() + spec_.epsilon * y.squaredNorm();
}

bool LowerBarrier::in_support(const Point2d& x) const {
    return domain_.contains(x) || domain_.distance_to_boundary(x) <= spec_.strip;
}

double LowerBarrier::operator()(const Point2d& x) const { return in_support(x) ? smooth(x) : floor_; }

double lower_barrier_strip_margin(const LowerBarrier& b, const Domaind& domain, const ExteriorDatumd& g,
                                  const GridFunctiond* grid, Point2d* witness) {
    const double strip = b.spec().strip;
    double worst = -std::numeric_limits<double>::infinity();
    Point2d at(0, 0);
    auto visit = [&](const Point2d& x) {
        const double d = b.smooth(x) - g(x);
        if (d > worst) {
            worst = d;
            at = x;
        }
    };
    constexpr int angles = 4096;
    constexpr int depths = 16;
    for (int k = 0; k < angles; ++k) {
        const Point2d y = domain.boundary_point(2 * std::numbers::pi * k / angles);
        const Point2d n = domain.outward_normal(y);
        for (int j = 0; j <= depths; ++j)
            visit(y + (strip * j / depths) * n);
    }
    visit(b.spec().x0);
    if (grid) {
        const double h = grid->spacing();
        const long x_lo = std::lround(std::floor((domain.center().x() - domain.a() - strip - grid->origin().x()) / h));
        const long x_hi = std::lround(std::ceil((domain.center().x() + domain.a() + strip - grid->origin().x()) / h));
        const long y_lo = std::lround(std::floor((domain.center().y() - domain.b() - strip - grid->origin().y()) / h));
        const long y_hi = std::lround(std::ceil((domain.center().y() + domain.b() + strip - grid->origin().y()) / h));
        for (long iy = y_lo; iy <= y_hi; ++iy)
            for (long ix = x_lo; ix <= x_hi; ++ix) {
                const Point2d x = grid->node(ix, iy);
                if (!domain.contains(x) && domain.distance_to_boundary(x) <= strip)
                    visit(x);
            }
    }
    if (witness)
        *witness = at;
    return worst;
}

LowerBarrierReport barrier_lower_check(const EnvelopeResult& u_s, const Domaind& domain, const BarrierSpec& spec,
                                       const ExteriorDatumd& g, const FracParamsd& params, const DirectionSet& dirs,
                                       double tol, int workers) {
    const LowerBarrier b(domain, g, spec);
    const GridFunctiond& u = u_s.solution;
    LowerBarrierReport rep;
    rep.spec = spec;
    rep.s = params.s;
    rep.tol = tol;
    rep.strip_margin = lower_barrier_strip_margin(b, domain, g, &u, &rep.strip_witness);

    const auto op = lower_barrier_operator(b, domain, u, dirs, params, workers);
    rep.min_operator = op.value;
    rep.operator_node = op.node;
    rep.operator_direction = op.direction;

    Eigen::VectorXd vals = Eigen::VectorXd::Zero(u.size());
    for (int i = 0; i < u.size(); ++i)
        vals[i] = b(u.node(i));
    rep.max_excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < u.size(); ++i)
        if (u.interior(i)) {
            const double e = vals[i] - u[i];
            if (e > rep.max_excess) {
                rep.max_excess = e;
                rep.excess_node = i;
            }
        }
    return rep;
}

BarrierOperatorMin lower_barrier_operator(const LowerBarrier& b, const Domaind& domain, const GridFunctiond& grid,
                                          const DirectionSet& dirs, const FracParamsd& params, int workers) {
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        vals[i] = b(grid.node(i));
    const double floor = b.floor();
    const FractionalScheme scheme(
        domain, grid, dirs, params, [&b](const Point2d& x) { return b(x); },
        [floor](const Point2d&, const Point2d&) { return std::optional<double>(floor); }, workers);
    Eigen::VectorXd alpha(grid.size());
    Eigen::VectorXd op(grid.size());
    BarrierOperatorMin out;
    out.value = std::numeric_limits<double>::infinity();
    for (int d = 0; d < scheme.directions(); ++d) {
        scheme.evaluate(vals, d, alpha, op, workers);
        for (int i = 0; i < grid.size(); ++i)
            if (grid.interior(i) && op[i] < out.value) {
                out.value = op[i];
                out.node = i;
                out.direction = d;
            }
    }
    return out;
}

double calibrate_strip(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                       const Point2d& x0, double eta, double slope, double epsilon, double strip_max) {
    auto margin = [&](double strip) {
        const LowerBarrier b(domain, g, BarrierSpec::lower(x0, slope, epsilon, strip, eta));
        return lower_barrier_strip_margin(b, domain, g, &grid);
    };
    double bad = strip_max;
    if (margin(bad) < 0)
        return bad;
    double good = 0.0;
    for (double w = strip_max / 2; w > strip_max * 1e-6; w /= 2) {
        if (margin(w) < 0) {
            good = w;
            break;
        }
        bad = w;
    }
    if (good == 0.0)
        return 0.0;
    for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (good + bad);
        (margin(mid) < 0 ? good : bad) = mid;
    }
    return good;
}

BarrierSpec calibrate_lower_barrier(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                                    const DirectionSet& dirs, std::span<const FracParamsd> orders,
                                    const Point2d& x0, double eta, double slope_max, double epsilon,
                                    double strip_max, int workers) {
    // Barrier for `slope` when both the strip condition and operator positivity hold.
    auto attempt = [&](double slope) -> std::optional<BarrierSpec> {
        const double strip = calibrate_strip(domain, g, grid, x0, eta, slope, epsilon, strip_max);
        if (strip == 0.0)
            return std::nullopt;
        const auto spec = BarrierSpec::lower(x0, slope, epsilon, strip, eta);
        const LowerBarrier b(domain, g, spec);
        for (const auto& params : orders)
            if (!(lower_barrier_operator(b, domain, grid, dirs, params, workers).value > 0))
                return std::nullopt;
        return spec;
    };
    double fail = 0.0;
    for (int j = 0; j <= 16; ++j) {
        const double slope = std::ldexp(slope_max, -j);
        auto spec = attempt(slope);
        if (!spec) {
            fail = slope;
            continue;
        }
        if (j == 0)
            return *spec;
        double pass = slope;
        for (int it = 0; it < 6; ++it) {
            const double mid = 0.5 * (pass + fail);
            if (auto s = attempt(mid)) {
                pass = mid;
                spec = s;
            } else {
                fail = mid;
            }
        }
        return *spec;
    }
    throw Error("calibrate_lower_barrier: no slope keeps the barrier below the datum and strictly convex");
}

} // namespace fracenv
