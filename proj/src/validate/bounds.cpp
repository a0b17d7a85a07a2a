#include "fracenv/validate/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracenv {

double datum_modulus(const Domaind& domain, const ExteriorDatumd& g, double r, int samples) {
    constexpr int offsets = 8;
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Point2d y = domain.boundary_point(2 * std::numbers::pi * k / samples);
        const double gy = g(y);
        for (int j = 0; j < offsets; ++j) {
            const double a = 2 * std::numbers::pi * j / offsets;
            worst = std::max(worst, std::abs(g(y + r * Point2d(std::cos(a), std::sin(a))) - gy));
        }
    }
    return worst;
}

BoundsReport bounds_and_boundary_check(const EnvelopeResult& u_s, const ExteriorDatumd& g, const Domaind& domain,
                                       double tol, double boundary_constant) {
    const GridFunctiond& u = u_s.solution;
    const double h = u.spacing();
    BoundsReport rep;
    rep.lower = g.inf() - tol;
    rep.upper = g.sup() + tol;
    rep.modulus = datum_modulus(domain, g, h);
    rep.boundary_threshold = boundary_constant * (h + rep.modulus);
    for (int i = 0; i < u.size(); ++i) {
        if (!u.interior(i))
            continue;
        const double v = u[i];
        if (!std::isfinite(v) || v < rep.lower)
            rep.bound_violations.push_back({i, v, rep.lower});
        else if (v > rep.upper)
            rep.bound_violations.push_back({i, v, rep.upper});

        const Point2d x = u.node(i);
        if (domain.distance_to_boundary(x) >= h)
            continue;
        ++rep.boundary_nodes;
        const double dev = std::abs(v - g(domain.project(x)));
        rep.max_boundary_deviation = std::max(rep.max_boundary_deviation, dev);
        if (dev > rep.boundary_threshold)
            rep.boundary_violations.push_back({i, dev, rep.boundary_threshold});
    }
    return rep;
}

} // namespace fracenv
