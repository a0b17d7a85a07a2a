#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "fracenv/core/datum.hpp"
#include "fracenv/core/domain.hpp"
#include "fracenv/core/params.hpp"
#include "fracenv/errors.hpp"
#include "fracenv/frac1d/kernel.hpp"

namespace fracenv {

/// Values seen by a line problem outside its unknowns. Node indices are
/// relative to the first unknown (index 0); `value` is queried for indices
/// outside [0, n), `far_field(j, side)` for the constant beyond the kernel
/// truncation as seen from node j on side +1 or -1.
template <typename Scalar>
struct LineExterior {
    std::function<Scalar(long)> value;
    std::function<std::optional<Scalar>(long, int)> far_field;
};

/// Dirichlet problem for the one-dimensional fractional Laplacian on a run
/// of equally spaced nodes with prescribed exterior values.
template <typename Scalar>
struct LineProblem {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Scalar spacing{};
    Vector values;
    LineExterior<Scalar> exterior;

    int size() const noexcept { return static_cast<int>(values.size()); }

    Scalar at(long i) const {
        if (i >= 0 && i < values.size())
            return values[static_cast<Eigen::Index>(i)];
        return exterior.value(i);
    }

    Scalar far(long j, int side) const {
        if (!exterior.far_field)
            throw DatumError("line exterior has no far-field provider");
        auto v = exterior.far_field(j, side);
        if (!v)
            throw DatumError("line exterior cannot supply a far-field constant");
        return *v;
    }

    /// n unknowns, every exterior node and both far fields equal to `c`.
    static LineProblem constant(int n, Scalar spacing, Scalar c) {
        LineProblem p;
        p.spacing = spacing;
        p.values = Vector::Constant(n, c);
        p.exterior.value = [c](long) { return c; };
        p.exterior.far_field = [c](long, int) { return std::optional<Scalar>(c); };
        return p;
    }

    /// The lattice line through `base` with step vector `step`; unknowns are
    /// the points base + k step inside the domain, everything else reads the
    /// datum. Unknowns start at the given interior value.
    static LineProblem along_datum(const Domain<Scalar>& d, const ExteriorDatum<Scalar>& g,
                                   const Point2<Scalar>& base, const Point2<Scalar>& step,
                                   Scalar initial) {
        if (!d.contains(base))
            throw GeometryError("along_datum: base point must be interior");
        auto [tm, tp] = d.clip(base, step);
        long k_lo = static_cast<long>(std::floor(tm)) - 1;
        long k_hi = static_cast<long>(std::ceil(tp)) + 1;
        while (!d.contains(base + Scalar(k_lo) * step))
            ++k_lo;
        while (!d.contains(base + Scalar(k_hi) * step))
            --k_hi;
        const Point2<Scalar> first = base + Scalar(k_lo) * step;
        const Point2<Scalar> unit = step.normalized();
        LineProblem p;
        p.spacing = step.norm();
        p.values = Vector::Constant(k_hi - k_lo + 1, initial);
        p.exterior.value = [g, first, step](long i) { return g(first + Scalar(i) * step); };
        p.exterior.far_field = [g, first, step, unit](long j, int side) {
            return g.far_field(first + Scalar(j) * step, Scalar(side) * unit);
        };
        return p;
    }
};

/// Discrete fractional Laplacian at unknown j, in difference form so that
/// constant data give exactly zero.
template <typename Scalar>
Scalar apply_frac_lap_line(const LineProblem<Scalar>& p, const KernelWeights<Scalar>& w, int j) {
    const Scalar vj = p.values[j];
    Scalar acc = Scalar(0);
    for (int k = 1; k <= w.K(); ++k)
        acc += w.w(k) * ((p.at(long(j) + k) - vj) + (p.at(long(j) - k) - vj));
    acc += w.tail * ((p.far(j, +1) - vj) + (p.far(j, -1) - vj));
    return acc;
}

/// The value at j that makes the discrete operator vanish there: the
/// weighted mean of every other value it sees.
template <typename Scalar>
Scalar harmonic_replacement(const LineProblem<Scalar>& p, const KernelWeights<Scalar>& w, int j) {
    Scalar acc = Scalar(0);
    for (int k = 1; k <= w.K(); ++k)
        acc += w.w(k) * (p.at(long(j) + k) + p.at(long(j) - k));
    acc += w.tail * (p.far(j, +1) + p.far(j, -1));
    return acc / w.total();
}

template <typename Scalar>
struct LineSolution {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
    Scalar residual{};  ///< max |discrete operator| over unknowns
    int iterations = 0; ///< 0 for the direct path
    bool direct = true;
};

/// Solves the line Dirichlet problem. Up to `direct_limit` unknowns the
/// (symmetric, strictly diagonally dominant) system is factored directly;
/// larger runs use Jacobi sweeps started from the largest exterior value.
template <typename Scalar>
LineSolution<Scalar> solve_dirichlet_1d(const LineProblem<Scalar>& p, const FracParams<Scalar>& params,
                                        int direct_limit = 2048) {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const int n = p.size();
    if (n < 1)
        throw InvalidArgument("solve_dirichlet_1d: no interior nodes");
    const int K = params.kernel_nodes(p.spacing);
    const KernelWeights<Scalar> kw = kernel_weights(params.s, p.spacing, K);
    const Scalar total = kw.total();

    // Exterior values for indices [-K, n + K).
    std::vector<Scalar> ext(static_cast<std::size_t>(n + 2 * K));
    Scalar ext_max = -std::numeric_limits<Scalar>::infinity();
    for (long i = -K; i < n + K; ++i) {
        if (i >= 0 && i < n)
            continue;
        const Scalar v = p.exterior.value(i);
        ext[static_cast<std::size_t>(i + K)] = v;
        ext_max = std::max(ext_max, v);
    }

    Vector rhs(n);
    for (int j = 0; j < n; ++j) {
        Scalar acc = Scalar(0);
        for (int k = 1; k <= K; ++k) {
            if (j + k >= n)
                acc += kw.w(k) * ext[static_cast<std::size_t>(j + k + K)];
            if (j - k < 0)
                acc += kw.w(k) * ext[static_cast<std::size_t>(j - k + K)];
        }
        const Scalar gp = p.far(j, +1);
        const Scalar gm = p.far(j, -1);
        ext_max = std::max({ext_max, gp, gm});
        rhs[j] = acc + kw.tail * (gp + gm);
    }

    LineSolution<Scalar> out;
    if (n <= direct_limit) {
        Matrix A = Matrix::Zero(n, n);
        for (int j = 0; j < n; ++j) {
            A(j, j) = total;
            for (int k = 1; k <= K && j + k < n; ++k) {
                A(j, j + k) = -kw.w(k);
                A(j + k, j) = -kw.w(k);
            }
        }
        const Eigen::LLT<Matrix> llt(A);
        out.values = llt.solve(rhs);
        // one step of iterative refinement
        out.values += llt.solve(rhs - A * out.values);
        out.direct = true;
    } else {
        Vector v = Vector::Constant(n, ext_max);
        Vector next(n);
        const auto& tol = params.tol;
        int it = 0;
        for (; it < tol.max_iterations; ++it) {
            for (int j = 0; j < n; ++j) {
                Scalar acc = rhs[j];
                for (int k = 1; k <= K; ++k) {
                    if (j + k < n)
                        acc += kw.w(k) * v[j + k];
                    if (j - k >= 0)
                        acc += kw.w(k) * v[j - k];
                }
                next[j] = acc / total;
            }
            const Scalar change = (next - v).cwiseAbs().maxCoeff();
            v.swap(next);
            if (change <= tol.fixed_point) {
                LineProblem<Scalar> q = p;
                q.values = v;
                Scalar r = Scalar(0);
                for (int j = 0; j < n; ++j)
                    r = std::max(r, std::abs(apply_frac_lap_line(q, kw, j)));
                if (r <= tol.residual)
                    break;
            }
        }
        if (it == tol.max_iterations)
            throw ConvergenceError("solve_dirichlet_1d: Jacobi did not converge", it,
                                   static_cast<double>((next - v).cwiseAbs().maxCoeff()));
        out.values = v;
        out.iterations = it + 1;
        out.direct = false;
    }

    LineProblem<Scalar> q = p;
    q.values = out.values;
    Scalar r = Scalar(0);
    for (int j = 0; j < n; ++j)
        r = std::max(r, std::abs(apply_frac_lap_line(q, kw, j)));
    out.residual = r;
    if (!(r <= params.tol.residual))
        throw ConvergenceError("solve_dirichlet_1d: residual above tolerance", out.iterations,
                               static_cast<double>(r));
    return out;
}

} // namespace fracenv
