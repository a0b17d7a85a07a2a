#include <doctest.h>

#include <cmath>
#include <map>

#include "fracenv/validate/validate.hpp"

using namespace fracenv;

namespace {

const Domaind disk = Domaind::disk({0, 0}, 1.0);
const ExteriorDatumd parabola{datum::ClippedQuadratic<double>{}};
const ExteriorDatumd flat{datum::Constant<double>{0.7}};
const DirectionSet dirs3 = DirectionSet::wide_stencil(3);

FracParamsd params_for(double s, const Domaind& d, const ExteriorDatumd& g) {
    return FracParamsd::for_domain(s, d, Tolerances::scaled(g.sup() - g.inf()));
}

double tol_for(const ExteriorDatumd& g) { return 1e-5 * (g.sup() - g.inf() + 1); }

// Envelopes of the parabola datum on the unit disk, computed once per (s, h).
const EnvelopeResult& parabola_envelope(double s, double h) {
    static std::map<std::pair<double, double>, EnvelopeResult> cache;
    auto it = cache.find({s, h});
    if (it == cache.end()) {
        const auto grid = GridFunctiond::covering(disk, h);
        it = cache.emplace(std::pair(s, h), fractional_envelope(disk, parabola, params_for(s, disk, parabola), grid, dirs3))
                 .first;
    }
    return it->second;
}

EnvelopeResult constant_result(const Domaind& d, const ExteriorDatumd& g, double h, double value) {
    EnvelopeResult r;
    r.solution = GridFunctiond::covering(d, h);
    r.solution.fill(g, value);
    return r;
}

} // namespace

TEST_SUITE("validate") {

TEST_CASE("segment generators are seeded and well formed") {
    const auto grid = GridFunctiond::covering(disk, 1.0 / 16);
    const auto a = lattice_segments(disk, grid, dirs3, 50, 11);
    const auto b = lattice_segments(disk, grid, dirs3, 50, 11);
    const auto c = lattice_segments(disk, grid, dirs3, 50, 12);
    REQUIRE(a.size() == 50);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].from == b[i].from);
        CHECK(a[i].to == b[i].to);
        differs |= a[i].from != c[i].from || a[i].to != c[i].to;
        CHECK(disk.contains(a[i].from));
        CHECK(disk.contains(a[i].to));
        CHECK(a[i].nodes >= 2);
    }
    CHECK(differs);
    const auto r = random_segments(disk, grid, 20, 3);
    REQUIRE(r.size() == 20);
    for (const auto& s : r) {
        CHECK(disk.contains(s.from));
        CHECK(disk.contains(s.to));
    }
}

TEST_CASE("convexity audit of constants finds nothing") {
    const auto u = constant_result(disk, flat, 1.0 / 16, 0.7);
    const auto grid = u.solution;
    const auto segs = lattice_segments(disk, grid, dirs3, 20, 1);
    const auto rep = s_convexity_check(u.solution, disk, flat, params_for(0.7, disk, flat), segs, 1e-5);
    CHECK(rep.passed());
    CHECK(std::abs(rep.max_violation) <= 1e-12);
}

TEST_CASE("converged envelope passes the convexity audit and a bump fails it") {
    const double h = 1.0 / 16, s = 0.8;
    const auto& u = parabola_envelope(s, h);
    const auto p = params_for(s, disk, parabola);
    const double tol = tol_for(parabola);
    const auto lattice = lattice_segments(disk, u.solution, dirs3, 50, 5);
    const auto rep = s_convexity_check(u.solution, disk, parabola, p, lattice, tol, 2);
    CHECK(rep.passed());
    CHECK(rep.segments.size() == 50);
    for (std::size_t i = 0; i < rep.segments.size(); ++i)
        CHECK(rep.segments[i].index == static_cast<int>(i));
    const auto general = random_segments(disk, u.solution, 50, 5);
    CHECK(s_convexity_check(u.solution, disk, parabola, p, general, tol).passed());

    // raise the center node; vertical lines are where the envelope of x1^2 is flat
    Segment seg{{0.0, -0.5}, {0.0, 0.5}, 16};
    auto bumped = u.solution;
    const int mid = bumped.index(bumped.nx() / 2, bumped.ny() / 2);
    bumped[mid] += 0.1;
    const std::vector<Segment> one{seg};
    const auto bad = s_convexity_check(bumped, disk, parabola, p, one, tol);
    CHECK_FALSE(bad.passed());
    CHECK(bad.max_violation > tol);
    CHECK(bad.segments[0].worst_t == doctest::Approx(0.5));
}

TEST_CASE("upper barrier above a constant") {
    const auto u = constant_result(disk, flat, 1.0 / 16, 0.7);
    const auto spec = BarrierSpec::upper({1, 0}, {0, 0}, 0.1, 0.2, flat.sup());
    const auto rep = barrier_upper_check(u, disk, spec, flat, params_for(0.8, disk, flat), 1e-5);
    CHECK(rep.passed());
    CHECK(rep.barrier.minCoeff() >= 0.7 - 1e-12);
}

TEST_CASE("upper barrier along the horizontal radius") {
    const double h = 1.0 / 16;
    const double theta = calibrate_collar(disk, parabola, {1, 0}, {0, 0}, 0.2, 2.0);
    CHECK(theta > 0);
    // collar condition
    for (int k = 0; k <= 100; ++k)
        CHECK(parabola(Point2d(1 + theta * k / 100.0, 0)) <= parabola(Point2d(1, 0)) + 0.2 / 3 + 1e-12);
    const auto spec = BarrierSpec::upper({1, 0}, {0, 0}, theta, 0.2, parabola.sup());
    CHECK_NOTHROW(spec.check(disk));
    double radius_min = 1e9;
    for (double s : {0.6, 0.9, 0.97}) {
        const auto& u = parabola_envelope(s, h);
        const auto rep = barrier_upper_check(u, disk, spec, parabola, params_for(s, disk, parabola), tol_for(parabola));
        CHECK(rep.passed());
        CHECK(rep.nodes > 0);
        radius_min = std::min(radius_min, rep.radius);
    }
    CHECK(radius_min >= 0.5);
}

TEST_CASE("upper barrier limit line") {
    const auto spec = BarrierSpec::upper({1, 0}, {-0.5, 0}, 0.1, 0.3, 2.0);
    CHECK(upper_barrier_limit(spec, 1.0, 0.0) == doctest::Approx(1.1));
    CHECK(upper_barrier_limit(spec, 1.0, 1.5) == doctest::Approx(2.0));
    CHECK(upper_barrier_limit(spec, 1.0, 0.75) == doctest::Approx(1.55));
}

TEST_CASE("barrier specs are validated") {
    CHECK_THROWS_AS(BarrierSpec::upper({0.5, 0}, {0, 0}, 0.1, 0.2, 2).check(disk), InvalidArgument);
    CHECK_THROWS_AS(BarrierSpec::upper({1, 0}, {2, 0}, 0.1, 0.2, 2).check(disk), InvalidArgument);
    CHECK_THROWS_AS(BarrierSpec::upper({1, 0}, {0, 0}, 0.0, 0.2, 2).check(disk), InvalidArgument);
    CHECK_THROWS_AS(BarrierSpec::lower({0, 1}, 0.0, 0.1, 0.1, 0.3).check(disk), InvalidArgument);
    CHECK_THROWS_AS(BarrierSpec::lower({0, 1}, 0.1, 0.1, 0.1, 0.0).check(disk), InvalidArgument);
}

TEST_CASE("boundary anchored barriers") {
    const auto grid = GridFunctiond::covering(disk, 1.0 / 16);
    const auto specs = boundary_anchored_barriers(disk, parabola, grid, dirs3, 10, 0.2, 0.5);
    REQUIRE(specs.size() == 10);
    for (const auto& b : specs) {
        CHECK_NOTHROW(b.check(disk));
        CHECK(grid.interior(static_cast<int>(std::lround((b.xhat.x() - grid.origin().x()) / grid.spacing())),
                            static_cast<int>(std::lround((b.xhat.y() - grid.origin().y()) / grid.spacing()))));
        CHECK((b.xhat - b.x0).norm() > 0.3);
    }
}

TEST_CASE("lower barrier under a constant") {
    const auto u = constant_result(disk, flat, 1.0 / 16, 0.7);
    const auto spec = BarrierSpec::lower({0, 1}, 4.0, 0.01, 0.01, 0.2);
    const auto rep = barrier_lower_check(u, disk, spec, flat, params_for(0.9, disk, flat), dirs3, 1e-5);
    CHECK(rep.strip_ok());
    CHECK(rep.below_ok());
    CHECK(rep.max_excess < -0.05);
}

TEST_CASE("lower barrier on the shifted disk") {
    // disk in the right half plane touching the origin, g = min(x1^2, 2) + 1
    const auto shifted = Domaind::disk({1, 0}, 1.0);
    const ExteriorDatumd g(datum::ClippedQuadratic<double>{{1, 0}, {0, 0}, 2, 1});
    const auto grid = GridFunctiond::covering(shifted, 1.0 / 16);
    const auto p = params_for(0.9, shifted, g);
    const auto u = fractional_envelope(shifted, g, p, grid, dirs3);
    const double tol = tol_for(g);

    SUBCASE("calibrated parameters pass every check") {
        const std::vector<FracParamsd> orders{p};
        const auto spec = calibrate_lower_barrier(shifted, g, grid, dirs3, orders, {0, 0}, 0.3, 8.0, 0.05, 0.5);
        CHECK(spec.slope > 0);
        CHECK(spec.slope < 8.0);
        const auto rep = barrier_lower_check(u, shifted, spec, g, p, dirs3, tol);
        CHECK(rep.strip_ok());
        CHECK(rep.convex_ok());
        CHECK(rep.below_ok());
    }
    SUBCASE("a steep slope with a wide strip is reported") {
        const auto spec = BarrierSpec::lower({0, 0}, 8.0, 0.05, 0.1, 0.3);
        const auto rep = barrier_lower_check(u, shifted, spec, g, p, dirs3, tol);
        CHECK_FALSE(rep.passed());
        CHECK_FALSE(rep.strip_ok());
        CHECK(rep.strip_margin > 0);
    }
}

TEST_CASE("flat barrier direction is not mistaken for strict convexity") {
    // at (1, 0) the cut to min g = 0 lies below the affine part, and with no
    // quadratic term the directional operator goes negative
    const auto grid = GridFunctiond::covering(disk, 1.0 / 16);
    const auto p = params_for(0.9, disk, parabola);
    const LowerBarrier b(disk, parabola, BarrierSpec::lower({1, 0}, 0.1, 0.0, 0.1, 0.3));
    const auto op = lower_barrier_operator(b, disk, grid, dirs3, p);
    CHECK(op.value <= 0.0);
    CHECK(op.node >= 0);
    CHECK(op.direction >= 0);
    const auto u = constant_result(disk, parabola, 1.0 / 16, 0.0);
    const auto rep = barrier_lower_check(u, disk, b.spec(), parabola, p, dirs3, 1e-5);
    CHECK_FALSE(rep.convex_ok());
    CHECK_FALSE(rep.passed());
}

TEST_CASE("lower barrier geometry") {
    const LowerBarrier b(disk, parabola, BarrierSpec::lower({0, 1}, 0.1, 0.05, 0.2, 0.3));
    // x0 maps to the origin and the inward normal to e1
    CHECK(b.normalized({0, 1}).norm() <= 1e-12);
    CHECK(b.normalized({0, 0.5}).x() == doctest::Approx(0.5));
    CHECK(b({0, 1}) == doctest::Approx(parabola(Point2d(0, 1)) - 0.15));
    CHECK(b.in_support({0, 1.1}));
    CHECK_FALSE(b.in_support({0, 1.3}));
    CHECK(b({0, 1.3}) == b.floor());
}

TEST_CASE("bounds and boundary checks") {
    SUBCASE("constant datum is reproduced exactly") {
        const auto u = constant_result(disk, flat, 1.0 / 16, 0.7);
        const auto rep = bounds_and_boundary_check(u, flat, disk, 1e-5, 2.0);
        CHECK(rep.passed());
        CHECK(rep.max_boundary_deviation == 0.0);
        CHECK(rep.boundary_nodes > 0);
    }
    SUBCASE("boundary deviation shrinks with h") {
        double previous = 1e9;
        for (double h : {1.0 / 16, 1.0 / 32}) {
            const auto& u = parabola_envelope(0.9, h);
            const auto rep = bounds_and_boundary_check(u, parabola, disk, tol_for(parabola), 2.0);
            CHECK(rep.passed());
            CHECK(rep.max_boundary_deviation < rep.boundary_threshold);
            CHECK(rep.max_boundary_deviation < previous);
            previous = rep.max_boundary_deviation;
        }
    }
    SUBCASE("values far above the datum fail loudly") {
        auto u = parabola_envelope(0.9, 1.0 / 16);
        Eigen::VectorXd v = u.solution.values();
        for (int i : u.solution.interior_indices())
            v[i] += 2 * (parabola.sup() - parabola.inf());
        u.solution = u.solution.with_values(v);
        const auto rep = bounds_and_boundary_check(u, parabola, disk, tol_for(parabola), 2.0);
        CHECK_FALSE(rep.passed());
        CHECK(rep.bound_violations.size() > 0);
    }
    CHECK(datum_modulus(disk, parabola, 0.1) == doctest::Approx(0.2).epsilon(0.2));
}

}
