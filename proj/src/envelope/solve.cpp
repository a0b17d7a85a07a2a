#include "fracenv/envelope/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracenv/errors.hpp"

namespace fracenv {

namespace {

struct SweepBuffers {
    std::vector<Eigen::VectorXd> alpha;
    std::vector<Eigen::VectorXd> op;

    SweepBuffers(int directions, int size)
        : alpha(static_cast<std::size_t>(directions), Eigen::VectorXd::Zero(size)),
          op(static_cast<std::size_t>(directions), Eigen::VectorXd::Zero(size)) {}
};

// Evaluates every direction at u; fills the report for u and, when `next` is
// given, the Jacobi update min(u, min_d alpha_d). Returns the largest
// pre-clamp increase min_d alpha_d - u.
double sweep(const DirectionalScheme& scheme, const Eigen::VectorXd& u, SweepBuffers& buf, ResidualReport& rep,
             Eigen::VectorXd* next, int workers) {
    const GridFunctiond& grid = scheme.grid();
    const int D = scheme.directions();
    for (int d = 0; d < D; ++d)
        scheme.evaluate(u, d, buf.alpha[static_cast<std::size_t>(d)], buf.op[static_cast<std::size_t>(d)], workers);

    rep.min_residual = Eigen::VectorXd::Zero(grid.size());
    rep.argmin.assign(static_cast<std::size_t>(grid.size()), -1);
    rep.max_abs_min_residual = 0.0;
    rep.most_negative = 0.0;
    rep.worst_node = -1;
    double increase = 0.0;
    bool first = true;
    for (int i = 0; i < grid.size(); ++i) {
        if (!grid.interior(i))
            continue;
        double best_op = std::numeric_limits<double>::infinity();
        double best_alpha = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int d = 0; d < D; ++d) {
            const double o = buf.op[static_cast<std::size_t>(d)][i];
            if (o < best_op) {
                best_op = o;
                arg = d;
            }
            best_alpha = std::min(best_alpha, buf.alpha[static_cast<std::size_t>(d)][i]);
        }
        rep.min_residual[i] = best_op;
        rep.argmin[static_cast<std::size_t>(i)] = arg;
        if (first || best_op < rep.most_negative)
            rep.most_negative = best_op;
        if (first || std::abs(best_op) > rep.max_abs_min_residual) {
            rep.max_abs_min_residual = std::abs(best_op);
            rep.worst_node = i;
        }
        first = false;
        increase = std::max(increase, best_alpha - u[i]);
        if (next)
            (*next)[i] = std::min(u[i], best_alpha);
    }
    return increase;
}

} // namespace

ResidualReport residual_diagnostics(const Eigen::VectorXd& u, const DirectionalScheme& scheme, int workers) {
    SweepBuffers buf(scheme.directions(), scheme.grid().size());
    ResidualReport rep;
    sweep(scheme, u, buf, rep, nullptr, workers);
    return rep;
}

EnvelopeResult solve_envelope(const DirectionalScheme& scheme, const ExteriorDatumd& g, double start,
                              const Tolerances& tol, int workers) {
    GridFunctiond u = scheme.grid();
    u.fill(g, start);
    Eigen::VectorXd next = u.values();
    SweepBuffers buf(scheme.directions(), u.size());
    EnvelopeResult out;
    double last_update = std::numeric_limits<double>::infinity();
    ResidualReport rep;
    for (int it = 0; it <= tol.max_iterations; ++it) {
        const double increase = sweep(scheme, u.values(), buf, rep, &next, workers);
        if (last_update <= tol.fixed_point && rep.within(tol.residual)) {
            out.solution = std::move(u);
            out.iterations = it;
            out.final_update = last_update;
            out.residual = std::move(rep);
            return out;
        }
        out.max_increase = std::max(out.max_increase, increase);
        last_update = (u.values() - next).cwiseAbs().maxCoeff();
        out.trace.push_back(last_update);
        u.values().swap(next);
    }
    throw ConvergenceError("envelope iteration did not converge", tol.max_iterations,
                           rep.max_abs_min_residual);
}

EnvelopeResult fractional_envelope(const Domaind& domain, const ExteriorDatumd& g, const FracParamsd& params,
                                   const GridFunctiond& grid, const DirectionSet& dirs, int workers) {
    require_resolution(domain, grid);
    const FractionalScheme scheme(domain, grid, dirs, params, g, workers);
    return solve_envelope(scheme, g, g.sup(), params.tol, workers);
}

EnvelopeResult classical_envelope(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                                  const DirectionSet& dirs, const Tolerances& tol, int workers) {
    require_resolution(domain, grid);
    const ClassicalScheme scheme(domain, g, grid, dirs);
    return solve_envelope(scheme, g, g.sup(), tol, workers);
}

} // namespace fracenv
