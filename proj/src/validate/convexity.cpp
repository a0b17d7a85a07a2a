#include "fracenv/validate/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracenv/errors.hpp"
#include "fracenv/frac1d/line.hpp"
#include "fracenv/parallel.hpp"

namespace fracenv {

std::vector<Segment> lattice_segments(const Domaind& domain, const GridFunctiond& grid, const DirectionSet& dirs,
                                      int count, std::uint64_t seed) {
    if (dirs.empty())
        throw InvalidArgument("lattice_segments: empty direction set");
    const auto nodes = grid.interior_indices();
    if (nodes.empty())
        throw GeometryError("lattice_segments: grid has no interior nodes");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_node(0, nodes.size() - 1);
    std::uniform_int_distribution<int> pick_dir(0, dirs.size() - 1);
    std::uniform_int_distribution<int> pick_sign(0, 1);

    std::vector<Segment> out;
    out.reserve(static_cast<std::size_t>(count));
    long attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > 1000L * std::max(count, 1))
            throw GeometryError("lattice_segments: domain too small for segments of two lattice steps");
        const int i = nodes[pick_node(rng)];
        const LatticeDirection d = dirs[pick_dir(rng)];
        const int sign = pick_sign(rng) ? 1 : -1;
        const int ix = grid.ix(i);
        const int iy = grid.iy(i);
        int reach = 0;
        while (grid.interior(ix + (reach + 1) * sign * d.p, iy + (reach + 1) * sign * d.q))
            ++reach;
        if (reach < 2)
            continue;
        std::uniform_int_distribution<int> pick_len(2, reach);
        const int n = pick_len(rng);
        Segment seg;
        seg.from = grid.node(ix, iy);
        seg.to = grid.node(ix + n * sign * d.p, iy + n * sign * d.q);
        seg.nodes = n;
        if (!domain.contains(seg.from) || !domain.contains(seg.to))
            continue;
        out.push_back(seg);
    }
    return out;
}

std::vector<Segment> random_segments(const Domaind& domain, const GridFunctiond& grid, int count,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(domain.center().x() - domain.a(), domain.center().x() + domain.a());
    std::uniform_real_distribution<double> uy(domain.center().y() - domain.b(), domain.center().y() + domain.b());
    auto draw = [&] {
        for (;;) {
            const Point2d p(ux(rng), domain.is_interval() ? domain.center().y() : uy(rng));
            if (domain.contains(p))
                return p;
        }
    };
    std::vector<Segment> out;
    out.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(out.size()) < count) {
        Segment seg;
        seg.from = draw();
        seg.to = draw();
        const double len = (seg.to - seg.from).norm();
        seg.nodes = std::max(2, static_cast<int>(std::ceil(len / grid.spacing())));
        if (len > 2 * grid.spacing())
            out.push_back(seg);
    }
    return out;
}

ConvexityReport s_convexity_check(const GridFunctiond& u, const Domaind& domain, const ExteriorDatumd& g,
                                  const FracParamsd& params, std::span<const Segment> segments, double tol,
                                  int workers) {
    for (const auto& seg : segments) {
        if (!domain.contains(seg.from) || !domain.contains(seg.to))
            throw GeometryError("s_convexity_check: segment endpoint outside the domain");
        if (seg.nodes < 2)
            throw InvalidArgument("s_convexity_check: a segment needs at least two cells");
    }
    ConvexityReport rep;
    rep.tol = tol;
    rep.segments.resize(segments.size());

    parallel_for(static_cast<int>(segments.size()), workers, [&](int k) {
        const Segment& seg = segments[static_cast<std::size_t>(k)];
        const int n = seg.nodes;
        const Point2d step = (seg.to - seg.from) / double(n);
        const Point2d unit = step.normalized();
        const Point2d from = seg.from;
        auto point = [from, step](long i) { return Point2d(from + double(i + 1) * step); };

        LineProblem<double> p;
        p.spacing = step.norm();
        p.values.resize(n - 1);
        for (int j = 0; j < n - 1; ++j)
            p.values[j] = u.sample(point(j), domain, g);
        p.exterior.value = [&, point](long i) { return u.sample(point(i), domain, g); };
        p.exterior.far_field = [&, point, unit](long j, int side) {
            return g.far_field(point(j), double(side) * unit);
        };
        const auto v = solve_dirichlet_1d(p, params);

        SegmentCheck c;
        c.index = k;
        c.segment = seg;
        c.worst = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n - 1; ++j) {
            const double d = p.values[j] - v.values[j];
            if (d > c.worst) {
                c.worst = d;
                c.worst_t = double(j + 1) / n;
            }
        }
        rep.segments[static_cast<std::size_t>(k)] = c;
    });

    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& c : rep.segments)
        if (c.worst > rep.max_violation) {
            rep.max_violation = c.worst;
            rep.worst_segment = c.index;
        }
    if (rep.segments.empty())
        rep.max_violation = 0.0;
    return rep;
}

} // namespace fracenv
