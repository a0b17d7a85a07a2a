#include "fracenv/envelope/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracenv/errors.hpp"
#include "fracenv/parallel.hpp"

namespace fracenv {

FractionalScheme::FractionalScheme(const Domaind& domain, const GridFunctiond& grid, const DirectionSet& dirs,
                                   const FracParamsd& params, const ExteriorFn& exterior,
                                   const FarFieldFn& far_field, int workers)
    : grid_(grid) {
    if (dirs.empty())
        throw InvalidArgument("fractional scheme: empty direction set");
    params.check_against(domain);
    const double h = grid_.spacing();
    const int D = dirs.size();
    weights_.reserve(static_cast<std::size_t>(D));
    lines_.resize(static_cast<std::size_t>(D));
    exterior_.assign(static_cast<std::size_t>(D), Eigen::VectorXd::Zero(grid_.size()));

    for (int d = 0; d < D; ++d) {
        const LatticeDirection dir = dirs[d];
        const double ell = dir.step(h);
        weights_.push_back(kernel_weights(params.s, ell, params.kernel_nodes(ell)));
        totals_.push_back(weights_.back().total());

        auto& lines = lines_[static_cast<std::size_t>(d)];
        for (int i = 0; i < grid_.size(); ++i) {
            if (!grid_.interior(i))
                continue;
            const int ix = grid_.ix(i);
            const int iy = grid_.iy(i);
            if (grid_.interior(ix - dir.p, iy - dir.q))
                continue;
            Line line;
            for (int jx = ix, jy = iy; grid_.interior(jx, jy); jx += dir.p, jy += dir.q)
                line.nodes.push_back(grid_.index(jx, jy));
            lines.push_back(std::move(line));
        }
    }

    // Exterior sums: every lattice node of the line outside the domain, up to
    // the truncation, plus the far-field tail on both sides.
    std::vector<std::pair<int, int>> tasks;
    for (int d = 0; d < D; ++d)
        for (int l = 0; l < static_cast<int>(lines_[static_cast<std::size_t>(d)].size()); ++l)
            tasks.emplace_back(d, l);

    parallel_for(static_cast<int>(tasks.size()), workers, [&](int t) {
        const auto [d, l] = tasks[static_cast<std::size_t>(t)];
        const LatticeDirection dir = dirs[d];
        const auto& kw = weights_[static_cast<std::size_t>(d)];
        const auto& nodes = lines_[static_cast<std::size_t>(d)][static_cast<std::size_t>(l)].nodes;
        const int L = static_cast<int>(nodes.size());
        const int K = kw.K();
        const long x0 = grid_.ix(nodes.front());
        const long y0 = grid_.iy(nodes.front());
        auto lattice = [&](long i) { return grid_.node(x0 + i * dir.p, y0 + i * dir.q); };

        // ext[i + K] for i in [-K, 0) and [L, L + K)
        std::vector<double> ext(static_cast<std::size_t>(L + 2 * K), 0.0);
        for (long i = -K; i < 0; ++i)
            ext[static_cast<std::size_t>(i + K)] = exterior(lattice(i));
        for (long i = L; i < L + K; ++i)
            ext[static_cast<std::size_t>(i + K)] = exterior(lattice(i));

        const Point2d unit = dir.unit();
        auto& out = exterior_[static_cast<std::size_t>(d)];
        for (int i = 0; i < L; ++i) {
            double acc = 0.0;
            for (int k = 1; k <= K; ++k) {
                if (i + k >= L)
                    acc += kw.w(k) * ext[static_cast<std::size_t>(i + k + K)];
                if (i - k < 0)
                    acc += kw.w(k) * ext[static_cast<std::size_t>(i - k + K)];
            }
            const Point2d x = lattice(i);
            const auto gp = far_field(x, unit);
            const auto gm = far_field(x, -unit);
            if (!gp || !gm)
                throw DatumError("fractional scheme: exterior has no far-field constant along a line");
            out[nodes[static_cast<std::size_t>(i)]] = acc + kw.tail * (*gp + *gm);
        }
    });
}

FractionalScheme::FractionalScheme(const Domaind& domain, const GridFunctiond& grid, const DirectionSet& dirs,
                                   const FracParamsd& params, const ExteriorDatumd& g, int workers)
    : FractionalScheme(
          domain, grid, dirs, params, [g](const Point2d& x) { return g(x); },
          [g](const Point2d& x, const Point2d& z) { return g.far_field(x, z); }, workers) {}

void FractionalScheme::evaluate(const Eigen::VectorXd& u, int d, Eigen::VectorXd& alpha, Eigen::VectorXd& op,
                                int workers) const {
    const auto& lines = lines_[static_cast<std::size_t>(d)];
    const auto& kw = weights_[static_cast<std::size_t>(d)];
    const auto& ext = exterior_[static_cast<std::size_t>(d)];
    const double total = totals_[static_cast<std::size_t>(d)];
    const int K = kw.K();
    parallel_for(static_cast<int>(lines.size()), workers, [&](int l) {
        const auto& nodes = lines[static_cast<std::size_t>(l)].nodes;
        const int L = static_cast<int>(nodes.size());
        std::vector<double> v(static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i)
            v[static_cast<std::size_t>(i)] = u[nodes[static_cast<std::size_t>(i)]];
        for (int i = 0; i < L; ++i) {
            const int node = nodes[static_cast<std::size_t>(i)];
            double acc = ext[node];
            const int lo = std::max(0, i - K);
            const int hi = std::min(L - 1, i + K);
            for (int j = lo; j <= hi; ++j)
                if (j != i)
                    acc += kw.w(std::abs(i - j)) * v[static_cast<std::size_t>(j)];
            alpha[node] = acc / total;
            op[node] = acc - total * v[static_cast<std::size_t>(i)];
        }
    });
}

ClassicalScheme::ClassicalScheme(const Domaind& domain, const ExteriorDatumd& g, const GridFunctiond& grid,
                                 const DirectionSet& dirs)
    : grid_(grid) {
    if (dirs.empty())
        throw InvalidArgument("classical scheme: empty direction set");
    const double h = grid_.spacing();
    arms_.resize(static_cast<std::size_t>(dirs.size()));
    for (int d = 0; d < dirs.size(); ++d) {
        const LatticeDirection dir = dirs[d];
        const Point2d unit = dir.unit();
        const double ell = dir.step(h);
        auto& arms = arms_[static_cast<std::size_t>(d)];
        arms.resize(static_cast<std::size_t>(grid_.size()));
        for (int i = 0; i < grid_.size(); ++i) {
            if (!grid_.interior(i))
                continue;
            const int ix = grid_.ix(i);
            const int iy = grid_.iy(i);
            const Point2d x = grid_.node(i);
            const auto [tm, tp] = domain.clip(x, unit);
            Arms a;
            if (grid_.interior(ix + dir.p, iy + dir.q)) {
                a.forward = {grid_.index(ix + dir.p, iy + dir.q), 0.0, ell};
            } else {
                const double t = std::min(tp, ell);
                a.forward = {-1, g(x + t * unit), t};
            }
            if (grid_.interior(ix - dir.p, iy - dir.q)) {
                a.backward = {grid_.index(ix - dir.p, iy - dir.q), 0.0, ell};
            } else {
                const double t = std::min(-tm, ell);
                a.backward = {-1, g(x - t * unit), t};
            }
            arms[static_cast<std::size_t>(i)] = a;
        }
    }
}

void ClassicalScheme::evaluate(const Eigen::VectorXd& u, int d, Eigen::VectorXd& alpha, Eigen::VectorXd& op,
                               int workers) const {
    const auto& arms = arms_[static_cast<std::size_t>(d)];
    parallel_for(grid_.size(), workers, [&](int i) {
        if (!grid_.interior(i))
            return;
        const Arms& a = arms[static_cast<std::size_t>(i)];
        const double uf = a.forward.node >= 0 ? u[a.forward.node] : a.forward.value;
        const double ub = a.backward.node >= 0 ? u[a.backward.node] : a.backward.value;
        const double lf = a.forward.length;
        const double lb = a.backward.length;
        const double avg = (lb * uf + lf * ub) / (lf + lb);
        alpha[i] = avg;
        op[i] = 2.0 * (avg - u[i]) / (lf * lb);
    });
}

void require_resolution(const Domaind& domain, const GridFunctiond& grid, int min_nodes) {
    auto count_row = [&](int iy) {
        int n = 0;
        for (int ix = 0; ix < grid.nx(); ++ix)
            n += grid.interior(ix, iy) ? 1 : 0;
        return n;
    };
    auto count_col = [&](int ix) {
        int n = 0;
        for (int iy = 0; iy < grid.ny(); ++iy)
            n += grid.interior(ix, iy) ? 1 : 0;
        return n;
    };
    int best_row = 0;
    int best_col = 0;
    for (int iy = 0; iy < grid.ny(); ++iy)
        best_row = std::max(best_row, count_row(iy));
    for (int ix = 0; ix < grid.nx(); ++ix)
        best_col = std::max(best_col, count_col(ix));
    if (best_row < min_nodes || (!domain.is_interval() && best_col < min_nodes))
        throw InvalidArgument("grid does not resolve the domain: need at least " + std::to_string(min_nodes) +
                              " interior nodes per axis");
}

} // namespace fracenv
