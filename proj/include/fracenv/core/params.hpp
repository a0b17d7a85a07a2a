#pragma once

#include <algorithm>
#include <cmath>

#include "fracenv/core/domain.hpp"
#include "fracenv/errors.hpp"
#include "fracenv/frac1d/constant.hpp"

namespace fracenv {

/// Stopping tolerances shared by the iterative solvers.
struct Tolerances {
    double fixed_point = 1e-8; ///< bound on the sup-norm of the last sweep's change
    double residual = 1e-6;    ///< bound on the discrete operator residual
    int max_iterations = 200000;

    /// Defaults scaled by the datum range, tol = base * (M - m + 1).
    static Tolerances scaled(double range, int max_iterations = 200000) {
        return {1e-8 * (range + 1), 1e-6 * (range + 1), max_iterations};
    }
};

/// Fractional order with its constant, kernel truncation radius and tolerances.
template <typename Scalar>
struct FracParams {
    Scalar s{};
    Scalar c{};
    Scalar radius{};     ///< kernel truncation radius, length units
    int min_kernel_nodes = 2;
    Tolerances tol;

    static FracParams make(Scalar s, Scalar radius, Tolerances tol = {}) {
        if (!(s > Scalar(0) && s < Scalar(1)))
            throw InvalidArgument("fractional order s must lie in (0, 1)");
        if (!(radius > Scalar(0)))
            throw InvalidArgument("truncation radius must be positive");
        if (!(tol.fixed_point > 0) || !(tol.residual > 0) || tol.max_iterations < 1)
            throw InvalidArgument("tolerances and iteration cap must be positive");
        FracParams p;
        p.s = s;
        p.c = frac_constant(s);
        p.radius = radius;
        p.tol = tol;
        return p;
    }

    /// Truncation defaults to eight domain diameters.
    static FracParams for_domain(Scalar s, const Domain<Scalar>& d, Tolerances tol = {}) {
        return make(s, Scalar(8) * d.diameter(), tol);
    }

    void check_against(const Domain<Scalar>& d) const {
        if (!(radius > d.diameter()))
            throw InvalidArgument("truncation radius must exceed the domain diameter");
    }

    /// Kernel node count per side for lattice spacing `spacing`.
    int kernel_nodes(Scalar spacing) const {
        const auto k = static_cast<long>(std::ceil(radius / spacing - Scalar(1e-9)));
        return static_cast<int>(std::max<long>(min_kernel_nodes, k));
    }
};

using FracParamsd = FracParams<double>;

} // namespace fracenv
